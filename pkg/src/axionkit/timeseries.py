"""Uniformly sampled series with provenance metadata, plus file formats.

Two on-disk representations, both versioned:

* CSV, schema ``axionkit-timeseries/1``: one comment line holding the
  JSON metadata, a header row, then ``t,value`` rows (``t,re,im`` for
  complex data).
* binary, same schema tag: a single JSON header line followed by the raw
  little-endian sample bytes.
"""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

TIMESERIES_SCHEMA = "axionkit-timeseries/1"


def canonical_json(obj) -> str:
    """Deterministic JSON text for hashing and manifests."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def short_hash(obj) -> str:
    """Stable 12-hex-digit digest of a JSON-serializable object."""
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:12]


@dataclass
class TimeSeries:
    """Uniform samples starting at epoch t0 with spacing dt (seconds).

    meta carries provenance (geometry hash, seeds, physics parameters)
    and must always be populated.
    """

    t0: float
    dt: float
    samples: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples)
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.samples.ndim != 1 or self.samples.size < 2:
            raise ValueError("samples must be a 1-D array with at least 2 entries")
        if not self.meta:
            raise ValueError("meta must be populated")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.size)

    @property
    def span(self) -> float:
        return self.dt * self.samples.size

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.samples)

    def _header(self) -> dict:
        return {
            "schema": TIMESERIES_SCHEMA,
            "t0": self.t0,
            "dt": self.dt,
            "n": int(self.samples.size),
            "dtype": "complex128" if self.is_complex else "float64",
            "meta": self.meta,
        }

    def to_csv(self, path) -> None:
        lines = ["# " + canonical_json(self._header())]
        if self.is_complex:
            lines.append("t,re,im")
            for t, v in zip(self.times, self.samples):
                lines.append(f"{float(t)!r},{float(v.real)!r},{float(v.imag)!r}")
        else:
            lines.append("t,value")
            for t, v in zip(self.times, self.samples):
                lines.append(f"{float(t)!r},{float(v)!r}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "TimeSeries":
        with open(path) as fh:
            first = fh.readline()
            if not first.startswith("# "):
                raise ValueError(f"{path}: missing timeseries header line")
            header = json.loads(first[2:])
            if header.get("schema") != TIMESERIES_SCHEMA:
                raise ValueError(f"{path}: unsupported schema {header.get('schema')}")
            fh.readline()  # column names
            rows = [line.strip().split(",") for line in fh if line.strip()]
        if header["dtype"] == "complex128":
            samples = np.array([complex(float(r[1]), float(r[2])) for r in rows])
        else:
            samples = np.array([float(r[1]) for r in rows])
        return cls(t0=header["t0"], dt=header["dt"], samples=samples, meta=header["meta"])

    def to_binary(self, path) -> None:
        data = np.ascontiguousarray(
            self.samples, dtype=np.complex128 if self.is_complex else np.float64
        )
        with open(path, "wb") as fh:
            fh.write((canonical_json(self._header()) + "\n").encode())
            fh.write(data.tobytes())

    @classmethod
    def from_binary(cls, path) -> "TimeSeries":
        with open(path, "rb") as fh:
            header = json.loads(fh.readline().decode())
            if header.get("schema") != TIMESERIES_SCHEMA:
                raise ValueError(f"{path}: unsupported schema {header.get('schema')}")
            samples = np.frombuffer(fh.read(), dtype=header["dtype"], count=header["n"])
        return cls(t0=header["t0"], dt=header["dt"], samples=samples.copy(), meta=header["meta"])
