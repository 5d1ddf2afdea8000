"""Run configuration: strict JSON ingestion, dotted-key overrides.

A run configuration is a JSON object with one section per parameter
group.  Unknown keys anywhere are rejected with the offending dotted
path; every field has a default, so the empty object is a valid
configuration.  A previously written run manifest can be passed in
place of a configuration; its embedded config is extracted.
"""

import dataclasses
import json
import types
import typing
from dataclasses import dataclass, field

from .geometry import EphemerisConstants, SiteGeometry
from .halo import AxionParams, HaloParams
from .sensitivity import SearchConfig
from .signals import NoiseConfig, QubitParams

MANIFEST_SCHEMA = "axionkit-manifest/1"


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending key."""


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    formats: tuple = ("csv", "json", "svg")

    def __post_init__(self):
        allowed = {"csv", "json", "svg"}
        bad = set(self.formats) - allowed
        if bad:
            raise ValueError(f"unknown output formats {sorted(bad)}")
        object.__setattr__(self, "formats", tuple(self.formats))


@dataclass(frozen=True)
class RunConfig:
    geometry: SiteGeometry = field(default_factory=SiteGeometry)
    ephemeris: EphemerisConstants = field(default_factory=EphemerisConstants)
    halo: HaloParams = field(default_factory=HaloParams)
    axion: AxionParams = field(default_factory=AxionParams)
    qubit: QubitParams = field(default_factory=QubitParams)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


_SECTIONS = {f.name: f.default_factory for f in dataclasses.fields(RunConfig)}


def _coerce(value, annotation, path):
    origin = typing.get_origin(annotation)
    if origin in (typing.Union, types.UnionType):  # float | None and friends
        args = [a for a in typing.get_args(annotation) if a is not type(None)]
        if value is None:
            return None
        return _coerce(value, args[0], path)
    if annotation is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if annotation is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if annotation is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if annotation is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{path}: expected a list, got {value!r}")
        return tuple(value)
    raise ConfigError(f"{path}: unsupported field type {annotation}")


def _build_section(cls, data: dict, section: str):
    hints = typing.get_type_hints(cls)
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(
            f"{section}.{sorted(unknown)[0]}: unknown key (known: {sorted(known)})"
        )
    kwargs = {
        name: _coerce(value, hints[name], f"{section}.{name}")
        for name, value in data.items()
    }
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{section}: {exc}") from exc


def build_config(data: dict) -> RunConfig:
    """Construct a validated RunConfig from a plain dictionary."""
    if not isinstance(data, dict):
        raise ConfigError(f"configuration root must be an object, got {type(data).__name__}")
    if data.get("schema") == MANIFEST_SCHEMA:
        data = data.get("config", {})
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ConfigError(
            f"{sorted(unknown)[0]}: unknown section (known: {sorted(_SECTIONS)})"
        )
    sections = {}
    for name, factory in _SECTIONS.items():
        payload = data.get(name, {})
        if not isinstance(payload, dict):
            raise ConfigError(f"{name}: expected an object")
        sections[name] = _build_section(factory, payload, name)
    return RunConfig(**sections)


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return build_config(data)


def config_to_dict(cfg: RunConfig) -> dict:
    out = {}
    for name in _SECTIONS:
        section = dataclasses.asdict(getattr(cfg, name))
        if name == "output":
            section["formats"] = list(section["formats"])
        out[name] = section
    return out


def apply_overrides(data: dict, overrides) -> dict:
    """Apply ``section.key=value`` strings onto a config dictionary.

    Values parse as JSON literals, falling back to bare strings.
    """
    result = json.loads(json.dumps(data))  # deep copy
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        parts = key.strip().split(".")
        if len(parts) != 2:
            raise ConfigError(f"override key {key!r} must be section.field")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        result.setdefault(parts[0], {})[parts[1]] = value
    return result


def list_config_keys() -> list[str]:
    """Every dotted configuration key, with its default, for help text."""
    lines = []
    for name, factory in _SECTIONS.items():
        for f in dataclasses.fields(factory):
            default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
            lines.append(f"{name}.{f.name} (default: {default!r})")
    return lines
