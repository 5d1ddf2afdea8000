"""Command-line front end: regenerate every figure dataset from a config.

Each subcommand writes CSV (authoritative), JSON records, optional SVG
inspection plots, and a run manifest that echoes the fully resolved
configuration, subcommand arguments and seed.  Passing a manifest back
as --config reproduces the artifacts byte for byte.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, geometry, sensitivity, signals, spectral, svgplot
from .config import (
    MANIFEST_SCHEMA,
    ConfigError,
    RunConfig,
    apply_overrides,
    build_config,
    config_to_dict,
    list_config_keys,
)
from .constants import SIDEREAL_DAY_S, YEAR_S, uev_to_hz
from .halo import fractional_linewidth_v0, lineshape_support, shm_lineshape
from .timeseries import TimeSeries


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_json(path: Path, record: dict) -> None:
    path.write_text(json.dumps(record, sort_keys=True, indent=2) + "\n")


def _daily_rms_debiased(samples: np.ndarray, per_day: int, noise_var: float) -> np.ndarray:
    n_days = samples.size // per_day
    chunks = samples[: n_days * per_day].reshape(n_days, per_day)
    power = np.mean(chunks**2, axis=1) - noise_var
    return np.sqrt(np.clip(power, 1e-30, None))


class _Runner:
    """Shared plumbing for one subcommand invocation."""

    def __init__(self, cfg: RunConfig, args, manifest_args: dict):
        self.cfg = cfg
        self.args = args
        self.manifest_args = manifest_args
        outdir = args.out or cfg.output.directory
        self.outdir = Path(outdir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.formats = (
            tuple(args.formats.split(",")) if args.formats else cfg.output.formats
        )
        seed = args.seed
        if seed is None:
            seed = manifest_args.get("seed")
        self.seed = cfg.noise.seed if seed is None else int(seed)
        self.noise = dataclasses.replace(cfg.noise, seed=self.seed)
        self.written: list[str] = []

    def arg(self, name: str, default):
        value = getattr(self.args, name.replace("-", "_"))
        if value is not None:
            return value
        if name in self.manifest_args:
            return self.manifest_args[name]
        return default

    def csv(self, name: str, header: str, rows) -> None:
        if "csv" in self.formats:
            _write_csv(self.outdir / name, header, rows)
            self.written.append(name)

    def json(self, name: str, record: dict) -> None:
        if "json" in self.formats:
            _write_json(self.outdir / name, record)
            self.written.append(name)

    def svg(self, name: str, curves, **kwargs) -> None:
        if "svg" in self.formats:
            svgplot.line_plot(self.outdir / name, curves, **kwargs)
            self.written.append(name)

    def manifest(self, subcommand: str, used_args: dict) -> None:
        record = {
            "schema": MANIFEST_SCHEMA,
            "subcommand": subcommand,
            "config": config_to_dict(self.cfg),
            "args": used_args,
            "seed": self.seed,
            "versions": {"axionkit": __version__, "numpy": np.__version__},
            "outputs": sorted(self.written),
        }
        _write_json(self.outdir / "manifest.json", record)
        self.written.append("manifest.json")

    def coefficients(self) -> geometry.ModulationCoefficients:
        return signals._geometry_coefficients(
            self.cfg.geometry, self.cfg.ephemeris, self.cfg.halo.v_ref
        )


def cmd_envelope(run: _Runner) -> dict:
    span_days = float(run.arg("span-days", 366.0))
    dt = float(run.arg("dt", 600.0))
    cfg = run.cfg
    coeffs = run.coefficients()

    days = np.arange(0.0, span_days)
    lo, hi = geometry.daily_envelope(days + 0.5, coeffs, cfg.ephemeris)
    run.csv(
        "envelope_daily.csv",
        "day,env_min,env_max",
        zip(days.astype(int), lo, hi),
    )

    t = np.arange(0.0, span_days * SIDEREAL_DAY_S, dt)
    beta_abs = np.abs(
        geometry.beta_ratio(t, cfg.geometry, cfg.ephemeris, cfg.halo.v_ref)
    )
    run.csv("beta_instantaneous.csv", "t_s,abs_beta_ratio", zip(t, beta_abs))
    run.json(
        "coefficients.json",
        {"schema": "axionkit-coefficients/1", **dataclasses.asdict(coeffs)},
    )
    stride = max(1, t.size // 8000)
    run.svg(
        "envelope.svg",
        [
            {"x": t[::stride] / SIDEREAL_DAY_S, "y": beta_abs[::stride], "label": "|signal|"},
            {"x": days, "y": np.abs(hi), "label": "envelope max"},
        ],
        xlabel="sidereal day",
        ylabel="normalized amplitude",
        title="daily modulation and its annual envelope",
    )
    return {"span-days": span_days, "dt": dt}


def cmd_daily_rms(run: _Runner) -> dict:
    trials = int(run.arg("trials", 16))
    if trials < 2:
        raise ConfigError("daily-rms needs at least 2 trials for the ensemble sigma")
    per_day = int(run.arg("samples-per-day", 48))
    band_sigma = float(run.arg("band-sigma", 5.0))
    cfg = run.cfg
    dt = SIDEREAL_DAY_S / per_day
    coeffs = run.coefficients()

    days = np.arange(0.0, 365.0)
    theory = geometry.daily_rms(days + 0.5, coeffs, cfg.ephemeris)
    theory_norm = theory / np.mean(theory)

    child_seeds = np.random.SeedSequence(run.seed).generate_state(trials)
    per_trial = []
    for child in child_seeds:
        noise = dataclasses.replace(run.noise, seed=int(child))
        ts = signals.synthesize_observable(
            cfg.geometry, cfg.ephemeris, cfg.axion, cfg.halo, cfg.qubit,
            noise, YEAR_S, dt, coeffs=coeffs, readout=True,
        )
        rms = _daily_rms_debiased(
            ts.samples, per_day, ts.meta["noise_var_realized"]
        )[: days.size]
        per_trial.append(rms / np.mean(rms))
    per_trial = np.array(per_trial)
    mc_mean = per_trial.mean(axis=0)
    mc_sigma = per_trial.std(axis=0, ddof=1)

    run.csv(
        "daily_rms.csv",
        "day,theory_norm,mc_mean,mc_sigma,trial0",
        zip(days.astype(int), theory_norm, mc_mean, mc_sigma, per_trial[0]),
    )
    run.svg(
        "daily_rms.svg",
        [
            {"x": days, "y": theory_norm, "label": "geometry only"},
            {"x": days, "y": mc_mean, "label": "ensemble mean", "markers": True},
            {"x": days, "y": mc_mean + band_sigma * mc_sigma, "label": f"+{band_sigma:g} sigma"},
            {"x": days, "y": mc_mean - band_sigma * mc_sigma, "label": f"-{band_sigma:g} sigma"},
        ],
        xlabel="sidereal day",
        ylabel="normalized daily RMS",
        title="daily RMS with readout and noise",
    )
    return {"trials": trials, "samples-per-day": per_day, "band-sigma": band_sigma}


def cmd_psd(run: _Runner) -> dict:
    span_days = float(run.arg("span-days", 4 * 365.25))
    dt = float(run.arg("dt", 1000.0))
    cfg = run.cfg
    ts = signals.synthesize_observable(
        cfg.geometry, cfg.ephemeris, cfg.axion, cfg.halo, cfg.qubit,
        run.noise, span_days * 86400.0, dt,
    )
    window = spectral.WindowSpec("rectangular", 0.0, 0.0)
    spectrum = spectral.periodogram(ts, window)
    delta_f = 1.0 / ts.span

    f_star = cfg.ephemeris.omega_sidereal / (2 * np.pi)
    f_a = cfg.ephemeris.omega_annual / (2 * np.pi)
    run.csv("psd.csv", "f_hz,psd", zip(spectrum.frequencies, spectrum.psd))
    run.json(
        "psd_markers.json",
        {
            "schema": "axionkit-psd-markers/1",
            "f_star_hz": f_star,
            "f_plus_hz": f_star + f_a,
            "f_minus_hz": f_star - f_a,
            "annual_splitting_hz": f_a,
            "delta_f_window_hz": delta_f,
            "resolvable": delta_f < f_a,
        },
    )
    zoom = (spectrum.frequencies > f_star - 10 * f_a) & (
        spectrum.frequencies < f_star + 10 * f_a
    )
    run.svg(
        "psd.svg",
        [{"x": (spectrum.frequencies[zoom] - f_star) / f_a, "y": spectrum.psd[zoom]}],
        xlabel="(f - f_sidereal) / f_annual",
        ylabel="PSD (1/Hz)",
        title="baseband PSD around the sidereal line",
        ylog=True,
    )
    return {"span-days": span_days, "dt": dt}


def cmd_triplet(run: _Runner) -> dict:
    cfg = run.cfg
    data_path = run.arg("data", None)
    psi_daily = run.arg("psi-daily", None)
    psi_annual = run.arg("psi-annual", None)
    used = {"data": data_path, "psi-daily": psi_daily, "psi-annual": psi_annual}

    if data_path is not None:
        if psi_daily is None or psi_annual is None:
            raise ConfigError(
                "triplet on supplied data needs the ephemeris phases: "
                "pass --psi-daily and --psi-annual"
            )
        ts = TimeSeries.from_csv(data_path)
    else:
        span_days = float(run.arg("span-days", 240.0))
        dt = float(run.arg("dt", 1800.0))
        used.update({"span-days": span_days, "dt": dt})
        ts = signals.synthesize_observable(
            cfg.geometry, cfg.ephemeris, cfg.axion, cfg.halo, cfg.qubit,
            run.noise, span_days * 86400.0, dt,
        )
        coeffs = run.coefficients()
        if psi_daily is None:
            psi_daily = coeffs.phase_daily
        if psi_annual is None:
            _, psi_annual = coeffs.envelope_depth_and_phase

    result = spectral.triplet_statistic(
        ts, cfg.ephemeris, float(psi_daily), float(psi_annual)
    )
    record = json.loads(result.to_json())
    record["psi_daily"] = float(psi_daily)
    record["psi_annual"] = float(psi_annual)
    run.json("triplet.json", record)
    run.csv(
        "triplet.csv",
        "component,frequency_hz,power",
        [
            ("star", result.f_star, result.x_star),
            ("plus", result.f_plus, result.x_plus),
            ("minus", result.f_minus, result.x_minus),
        ],
    )
    return used


def cmd_linewidth(run: _Runner) -> dict:
    masses = [float(m) for m in str(run.arg("masses", "1,5,10")).split(",")]
    cfg = run.cfg
    rows = []
    curves = []
    for mass in masses:
        axion = dataclasses.replace(cfg.axion, mass_uev=mass)
        nu_a = uev_to_hz(mass)
        lo, hi = lineshape_support(axion, cfg.halo)
        span = (hi - lo) * 1.05
        offsets = np.linspace(-0.02 * span, span, 1500)
        density = shm_lineshape(nu_a + offsets, axion, cfg.halo)
        rows.extend((mass, off, dens) for off, dens in zip(offsets, density))
        curves.append({"x": offsets, "y": density, "label": f"{mass:g} ueV"})
    run.csv("linewidth.csv", "mass_uev,offset_hz,density_per_hz", rows)
    run.json(
        "linewidth_meta.json",
        {
            "schema": "axionkit-linewidth/1",
            "masses_uev": masses,
            "fractional_scale_width": fractional_linewidth_v0(cfg.halo),
            "halo": dataclasses.asdict(cfg.halo),
        },
    )
    run.svg(
        "linewidth.svg",
        curves,
        xlabel="frequency offset from line origin (Hz)",
        ylabel="density (1/Hz)",
        title="halo line shapes",
    )
    return {"masses": ",".join(f"{m:g}" for m in masses)}


def cmd_sensitivity(run: _Runner) -> dict:
    preset = str(run.arg("preset", "config"))
    gains_mode = str(run.arg("gains", "all"))
    mass_lo = float(run.arg("mass-min", 1.0))
    mass_hi = float(run.arg("mass-max", 10.0))
    n_points = int(run.arg("mass-points", 50))
    cfg = run.cfg

    if preset == "config":
        qubit = cfg.qubit
    elif preset in sensitivity.PRESETS:
        qubit = sensitivity.PRESETS[preset]
    else:
        raise ConfigError(f"unknown preset {preset!r} (use config, current or future)")

    gains = geometry.geometric_gains(cfg.geometry)
    gain_for = {
        "none": None,
        "matched": gains.g_daily,
        "all": gains,
    }
    if gains_mode not in gain_for:
        raise ConfigError(f"unknown gains mode {gains_mode!r} (use none, matched or all)")

    masses = np.geomspace(mass_lo, mass_hi, n_points)
    curve = sensitivity.g_min_curve(
        masses, qubit, cfg.halo, cfg.search, gains=gain_for[gains_mode]
    )
    flat = sensitivity.g_min_curve(
        masses, qubit, cfg.halo, cfg.search,
        gains=gain_for[gains_mode], mass_dependent=False,
    )

    if "csv" in run.formats:
        curve.to_csv(run.outdir / "sensitivity_shm.csv")
        flat.to_csv(run.outdir / "sensitivity_flat.csv")
        run.written += ["sensitivity_shm.csv", "sensitivity_flat.csv"]

    variants = {
        mode: sensitivity.g_min_curve(
            masses, qubit, cfg.halo, cfg.search, gains=gain_for[mode]
        ).g_min
        for mode in ("none", "matched", "all")
    }
    run.csv(
        "sensitivity_variants.csv",
        "m_a_uev,g_min_baseline,g_min_matched,g_min_all_gains,regime",
        zip(masses, variants["none"], variants["matched"], variants["all"], curve.regime),
    )

    dfsz_lo, dfsz_hi, dfsz_bench = sensitivity.dfsz_band(masses)
    run.csv(
        "dfsz.csv",
        "m_a_uev,g_low,g_high,g_tan_beta_1",
        zip(masses, dfsz_lo, dfsz_hi, dfsz_bench),
    )
    run.json(
        "sensitivity.json",
        {
            "schema": "axionkit-sensitivity/1",
            "preset": preset,
            "gains_mode": gains_mode,
            "gains": curve.gains_applied,
            "config": curve.config,
        },
    )
    run.svg(
        "sensitivity.svg",
        [
            {"x": masses, "y": variants["none"], "label": "baseline"},
            {"x": masses, "y": variants["matched"], "label": "matched weighting"},
            {"x": masses, "y": variants["all"], "label": "all gains"},
            {"x": masses, "y": dfsz_bench, "label": "benchmark model"},
        ],
        xlabel="mass (ueV)",
        ylabel="minimum detectable coupling",
        title=f"coupling sensitivity ({preset})",
        xlog=True,
        ylog=True,
    )
    return {
        "preset": preset,
        "gains": gains_mode,
        "mass-min": mass_lo,
        "mass-max": mass_hi,
        "mass-points": n_points,
    }


_COMMANDS = {
    "envelope": (cmd_envelope, "daily min/max envelope and instantaneous amplitude over a year"),
    "daily-rms": (cmd_daily_rms, "geometry-only daily RMS against noisy Monte-Carlo observations"),
    "psd": (cmd_psd, "baseband power spectral density with the annual-splitting markers"),
    "triplet": (cmd_triplet, "heterodyned three-line statistics and annual-depth estimate"),
    "linewidth": (cmd_linewidth, "halo line shapes for a list of masses"),
    "sensitivity": (cmd_sensitivity, "coupling sensitivity curves with gain and preset variants"),
}


def _build_parser() -> argparse.ArgumentParser:
    epilog = "configuration keys for --set:\n  " + "\n  ".join(list_config_keys())
    parser = argparse.ArgumentParser(
        prog="axionkit",
        description="regenerate the wind-modulation figure datasets",
        epilog=epilog,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"axionkit {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, (_, help_text) in _COMMANDS.items():
        p = sub.add_parser(
            name,
            help=help_text,
            epilog=epilog,
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        p.add_argument("--config", help="JSON config file (or a previous run manifest)")
        p.add_argument(
            "--set", action="append", default=[], metavar="KEY=VALUE",
            help="override one config key, e.g. --set halo.v0=220",
        )
        p.add_argument("--seed", type=int, help="master noise seed")
        p.add_argument("--out", help="output directory")
        p.add_argument("--formats", help="comma-separated subset of csv,json,svg")
        if name in ("envelope", "psd"):
            p.add_argument("--span-days", type=float, help="record length in days")
            p.add_argument("--dt", type=float, help="sample spacing in seconds")
        if name == "daily-rms":
            p.add_argument("--trials", type=int, help="Monte-Carlo ensemble size")
            p.add_argument("--samples-per-day", type=int, help="samples per sidereal day")
            p.add_argument("--band-sigma", type=float, help="band half-width in ensemble sigmas")
        if name == "triplet":
            p.add_argument("--data", help="CSV time series to analyze instead of synthesizing")
            p.add_argument("--psi-daily", type=float, help="sidereal phase (rad)")
            p.add_argument("--psi-annual", type=float, help="annual envelope phase (rad)")
            p.add_argument("--span-days", type=float, help="synthesized record length in days")
            p.add_argument("--dt", type=float, help="sample spacing in seconds")
        if name == "linewidth":
            p.add_argument("--masses", help="comma-separated masses in ueV")
        if name == "sensitivity":
            p.add_argument("--preset", help="config, current or future")
            p.add_argument("--gains", help="none, matched or all")
            p.add_argument("--mass-min", type=float, help="grid start (ueV)")
            p.add_argument("--mass-max", type=float, help="grid end (ueV)")
            p.add_argument("--mass-points", type=int, help="grid size")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        raw = {}
        manifest_args = {}
        if args.config:
            try:
                with open(args.config) as fh:
                    raw = json.load(fh)
            except FileNotFoundError as exc:
                raise ConfigError(f"config file not found: {args.config}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: invalid JSON ({exc})") from exc
            if isinstance(raw, dict) and raw.get("schema") == MANIFEST_SCHEMA:
                manifest_args = dict(raw.get("args", {}))
                manifest_args["seed"] = raw.get("seed")
                raw = raw.get("config", {})
        raw = apply_overrides(raw, args.set)
        cfg = build_config(raw)
    except ConfigError as exc:
        print(f"axionkit: config error: {exc}", file=sys.stderr)
        return 2

    runner = _Runner(cfg, args, manifest_args)
    command, _ = _COMMANDS[args.subcommand]
    try:
        used_args = command(runner)
    except ConfigError as exc:
        print(f"axionkit: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical or I/O failure
        print(f"axionkit: {args.subcommand} failed: {exc}", file=sys.stderr)
        return 3
    runner.manifest(args.subcommand, used_args)
    for name in runner.written:
        print(f"wrote {runner.outdir / name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
