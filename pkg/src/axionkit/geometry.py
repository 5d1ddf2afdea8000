"""Lab-frame wind geometry: rotation chain, projections, modulation fit.

A fixed mean-wind direction, given in equatorial coordinates (right
ascension, declination), is combined with the annually rotating orbital
velocity and rotated into the local horizontal frame at the observing
site.  The projection of the wind direction onto the sensor axis is the
slowly varying geometric factor that amplitude-modulates the measurable
signal; its harmonic content at the sidereal and annual frequencies is
summarized by a small set of modulation coefficients.

Conventions
-----------
Equatorial frame: x toward the vernal equinox, z toward the celestial
north pole.  Horizontal frame: (east, north, up).  Device azimuth is
measured from north toward east; elevation from the horizon.  The epoch
t = 0 corresponds simultaneously to the configured initial sidereal
phase and to orbital phase zero; all fitted phases are relative to it.
The wind vector is v_sun * w_hat - u_orbit(t), u_orbit being Earth's
orbital velocity on a circular ecliptic orbit.
"""

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .constants import OBLIQUITY_DEG, OMEGA_ANNUAL, OMEGA_SIDEREAL, SIDEREAL_DAY_S


class DegenerateFitError(ValueError):
    """Raised when the modulation-coefficient design matrix loses rank."""


class GainUnboundedError(ValueError):
    """Raised when the time-averaged projection vanishes and the
    matched-weighting gain is unbounded."""


@dataclass(frozen=True)
class SiteGeometry:
    """Observing site, sensor pointing and wind direction (angles in
    degrees, turntable rate in rad/s, initial sidereal phase in rad).

    The initial local sidereal phase is configured directly through
    lst0_rad; the longitude is carried for provenance but does not enter
    the simulation separately.
    """

    latitude_deg: float = 39.9042
    longitude_deg: float = 116.4074
    wind_ra_deg: float = 270.0
    wind_dec_deg: float = 30.0
    elevation_deg: float = 90.0
    azimuth_deg: float = 0.0
    turntable_rate_rad_s: float = 0.0
    lst0_rad: float = 0.0

    def __post_init__(self):
        if abs(self.latitude_deg) > 90.0:
            raise ValueError(f"latitude must be in [-90, 90], got {self.latitude_deg}")
        if not -90.0 <= self.elevation_deg <= 90.0:
            raise ValueError(f"elevation must be in [-90, 90], got {self.elevation_deg}")
        if abs(self.wind_dec_deg) > 90.0:
            raise ValueError(f"wind declination must be in [-90, 90], got {self.wind_dec_deg}")
        # canonical ranges
        object.__setattr__(self, "wind_ra_deg", self.wind_ra_deg % 360.0)
        object.__setattr__(self, "azimuth_deg", self.azimuth_deg % 360.0)
        object.__setattr__(self, "lst0_rad", self.lst0_rad % (2.0 * math.pi))


@dataclass(frozen=True)
class EphemerisConstants:
    """Angular rates and orbital speeds fixing the deterministic
    modulation frequencies."""

    omega_sidereal: float = OMEGA_SIDEREAL
    omega_annual: float = OMEGA_ANNUAL
    v_sun: float = 230.0
    v_orbit: float = 30.0
    obliquity_deg: float = OBLIQUITY_DEG
    orbital_phase: float = 0.0

    def __post_init__(self):
        if not self.omega_sidereal > self.omega_annual > 0:
            raise ValueError("need omega_sidereal > omega_annual > 0")
        if self.v_sun <= 0 or self.v_orbit < 0:
            raise ValueError("v_sun must be positive and v_orbit non-negative")


@dataclass(frozen=True)
class ModulationCoefficients:
    """Harmonic fingerprint of the projection series.

    model(t) = c0 + c_daily cos(Os t - phase_daily)
                  + c_annual cos(Oa t - phase_annual)
                  + c_cross cos(Os t - phase_daily) cos(Oa t - phase_annual)

    with Os, Oa the sidereal and annual angular rates.  residual_rms
    records the fit residue when the coefficients came from data.
    """

    c0: float
    c_daily: float
    c_annual: float
    c_cross: float
    phase_daily: float
    phase_annual: float
    residual_rms: float = 0.0

    @property
    def annual_depth(self) -> float:
        """Relative annual modulation of the daily tone, c_cross/c_daily."""
        if self.c_daily == 0.0:
            return 0.0
        return self.c_cross / self.c_daily

    @property
    def envelope_depth_and_phase(self) -> tuple[float, float]:
        """Canonical (|depth|, phase) of the daily-tone envelope
        K(t) = c_daily [1 + depth cos(Oa t - phase)]: a negative fitted
        depth is folded into a half-turn phase shift."""
        depth = self.annual_depth
        if depth >= 0:
            return depth, self.phase_annual
        return -depth, (self.phase_annual + math.pi) % (2.0 * math.pi)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ModulationCoefficients":
        return cls(**json.loads(text))


def wind_unit_equatorial(site: SiteGeometry) -> np.ndarray:
    """Mean wind direction as a unit vector in the equatorial frame."""
    ra = math.radians(site.wind_ra_deg)
    dec = math.radians(site.wind_dec_deg)
    return np.array(
        [math.cos(dec) * math.cos(ra), math.cos(dec) * math.sin(ra), math.sin(dec)]
    )


def orbital_velocity_equatorial(t, eph: EphemerisConstants) -> np.ndarray:
    """Earth's orbital velocity in the equatorial frame, km/s.

    Circular ecliptic orbit; the ecliptic plane is tilted about the
    equinox axis by the obliquity.  Shape (..., 3).
    """
    t = np.asarray(t, dtype=float)
    theta = eph.omega_annual * t + eph.orbital_phase
    eps = math.radians(eph.obliquity_deg)
    v = np.empty(t.shape + (3,))
    v[..., 0] = -np.sin(theta)
    v[..., 1] = np.cos(theta) * math.cos(eps)
    v[..., 2] = np.cos(theta) * math.sin(eps)
    return eph.v_orbit * v


def wind_velocity_equatorial(t, site: SiteGeometry, eph: EphemerisConstants) -> np.ndarray:
    """Apparent wind velocity vector in the equatorial frame, km/s.

    Sum of the mean wind (from the solar motion) and the reflex of the
    orbital velocity.  Shape (..., 3).
    """
    t = np.asarray(t, dtype=float)
    w = eph.v_sun * wind_unit_equatorial(site)
    return w - orbital_velocity_equatorial(t, eph)


def equatorial_to_horizontal(lst_rad, latitude_deg: float) -> np.ndarray:
    """Rotation matrix from the equatorial frame to (east, north, up).

    Rows are the horizontal basis vectors expressed in equatorial
    coordinates; orthonormal with determinant +1.  Shape (..., 3, 3) for
    array input.
    """
    lst = np.asarray(lst_rad, dtype=float)
    lam = math.radians(latitude_deg)
    sin_l, cos_l = math.sin(lam), math.cos(lam)
    r = np.empty(lst.shape + (3, 3))
    r[..., 0, 0] = -np.sin(lst)
    r[..., 0, 1] = np.cos(lst)
    r[..., 0, 2] = 0.0
    r[..., 1, 0] = -sin_l * np.cos(lst)
    r[..., 1, 1] = -sin_l * np.sin(lst)
    r[..., 1, 2] = cos_l
    r[..., 2, 0] = cos_l * np.cos(lst)
    r[..., 2, 1] = cos_l * np.sin(lst)
    r[..., 2, 2] = sin_l
    return r


def lab_wind(t, site: SiteGeometry, eph: EphemerisConstants):
    """Wind direction in the horizontal frame and wind speed.

    Returns (direction, speed): direction has shape (..., 3) with unit
    norm, speed is in km/s.
    """
    t = np.asarray(t, dtype=float)
    v_eq = wind_velocity_equatorial(t, site, eph)
    speed = np.linalg.norm(v_eq, axis=-1)
    lst = site.lst0_rad + eph.omega_sidereal * t
    rot = equatorial_to_horizontal(lst, site.latitude_deg)
    v_enu = np.einsum("...ij,...j->...i", rot, v_eq)
    direction = v_enu / speed[..., np.newaxis]
    return direction, speed


def device_axis(t, site: SiteGeometry) -> np.ndarray:
    """Sensor axis in the horizontal frame, including turntable rotation."""
    t = np.asarray(t, dtype=float)
    elev = math.radians(site.elevation_deg)
    azim = math.radians(site.azimuth_deg) + site.turntable_rate_rad_s * t
    q = np.empty(t.shape + (3,))
    q[..., 0] = math.cos(elev) * np.sin(azim)
    q[..., 1] = math.cos(elev) * np.cos(azim)
    q[..., 2] = math.sin(elev)
    return q


def projection(t, site: SiteGeometry, eph: EphemerisConstants, axis=None):
    """cos(theta) between the wind direction and the sensor axis.

    axis, if given, is a unit vector in the horizontal frame overriding
    the site's device pointing.  Always within [-1, 1].
    """
    direction, _ = lab_wind(t, site, eph)
    if axis is None:
        q = device_axis(t, site)
    else:
        q = np.asarray(axis, dtype=float)
        if abs(np.linalg.norm(q) - 1.0) > 1e-9:
            raise ValueError("axis must be unit-norm")
    return np.einsum("...i,...i->...", direction, q)


def beta_ratio(t, site: SiteGeometry, eph: EphemerisConstants, v_ref: float = 230.0):
    """Normalized signal amplitude (v_lab/v_ref) * cos(theta).

    This is the quantity whose daily series and envelope make up the
    year-long geometric modulation; it can exceed one in magnitude when
    the lab speed tops the reference speed.
    """
    direction, speed = lab_wind(t, site, eph)
    q = device_axis(t, site)
    return (speed / v_ref) * np.einsum("...i,...i->...", direction, q)


def modulation_model(t, coeffs: ModulationCoefficients, eph: EphemerisConstants | None = None):
    """Evaluate the harmonic model defined by a coefficient set."""
    if eph is None:
        eph = EphemerisConstants()
    t = np.asarray(t, dtype=float)
    daily = np.cos(eph.omega_sidereal * t - coeffs.phase_daily)
    annual = np.cos(eph.omega_annual * t - coeffs.phase_annual)
    return (
        coeffs.c0
        + coeffs.c_daily * daily
        + coeffs.c_annual * annual
        + coeffs.c_cross * daily * annual
    )


def fit_modulation_coefficients(
    t, series, eph: EphemerisConstants | None = None
) -> ModulationCoefficients:
    """Least-squares harmonic fit of a projection series.

    The basis is {1, cos/sin(Os t), cos/sin(Oa t)} plus the four mixed
    products; the mixed block is then collapsed onto the single
    cross-coefficient consistent with the phases recovered from the pure
    sidereal and annual terms.  Phases come out modulo 2 pi.

    Raises DegenerateFitError if the design matrix is rank deficient
    (for example when the sampling aliases the sidereal rate).
    """
    if eph is None:
        eph = EphemerisConstants()
    t = np.asarray(t, dtype=float)
    y = np.asarray(series, dtype=float)
    if t.ndim != 1 or t.shape != y.shape:
        raise ValueError("t and series must be 1-D arrays of equal length")

    cs, ss = np.cos(eph.omega_sidereal * t), np.sin(eph.omega_sidereal * t)
    ca, sa = np.cos(eph.omega_annual * t), np.sin(eph.omega_annual * t)
    design = np.column_stack(
        [np.ones_like(t), cs, ss, ca, sa, cs * ca, cs * sa, ss * ca, ss * sa]
    )
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        raise DegenerateFitError(
            f"design matrix rank {rank} < {design.shape[1]}; "
            "sampling or geometry degenerate"
        )

    c0 = coef[0]
    c_daily = math.hypot(coef[1], coef[2])
    phase_daily = math.atan2(coef[2], coef[1]) % (2.0 * math.pi)
    c_annual = math.hypot(coef[3], coef[4])
    phase_annual = math.atan2(coef[4], coef[3]) % (2.0 * math.pi)
    # rank-one reduction of the mixed block onto the recovered phases
    u = np.array(
        [
            math.cos(phase_daily) * math.cos(phase_annual),
            math.cos(phase_daily) * math.sin(phase_annual),
            math.sin(phase_daily) * math.cos(phase_annual),
            math.sin(phase_daily) * math.sin(phase_annual),
        ]
    )
    c_cross = float(np.dot(coef[5:9], u))
    resid = y - design @ coef
    return ModulationCoefficients(
        c0=float(c0),
        c_daily=float(c_daily),
        c_annual=float(c_annual),
        c_cross=c_cross,
        phase_daily=phase_daily,
        phase_annual=phase_annual,
        residual_rms=float(np.sqrt(np.mean(resid**2))),
    )


def daily_mean_and_excursion(
    day, coeffs: ModulationCoefficients, eph: EphemerisConstants | None = None
):
    """Slow components at the given (fractional) sidereal day index:
    daily mean mu(t) = c0 + c_annual cos(Oa t - phase_annual) and daily
    excursion K(t) = c_daily + c_cross cos(Oa t - phase_annual)."""
    if eph is None:
        eph = EphemerisConstants()
    t = np.asarray(day, dtype=float) * SIDEREAL_DAY_S
    annual = np.cos(eph.omega_annual * t - coeffs.phase_annual)
    mu = coeffs.c0 + coeffs.c_annual * annual
    k = coeffs.c_daily + coeffs.c_cross * annual
    return mu, k


def daily_envelope(
    day, coeffs: ModulationCoefficients, eph: EphemerisConstants | None = None
):
    """(min, max) of the daily waveform on the given day: mu -/+ |K|."""
    mu, k = daily_mean_and_excursion(day, coeffs, eph)
    return mu - np.abs(k), mu + np.abs(k)


def daily_rms(
    day, coeffs: ModulationCoefficients, eph: EphemerisConstants | None = None
):
    """RMS over one sidereal day of mu + K cos(Os t' - phase):
    sqrt(mu^2 + K^2/2)."""
    mu, k = daily_mean_and_excursion(day, coeffs, eph)
    return np.sqrt(mu**2 + 0.5 * k**2)


@dataclass(frozen=True)
class GeometricGains:
    """Gain factors of matched daily weighting and multi-axis readout
    relative to a single-axis, uniformly weighted baseline."""

    p0: float
    mean_square_projection: float
    g_daily: float
    g_three_axis: float
    g_total: float
    n_axes: int = 3

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def geometric_gains(site: SiteGeometry, n_axes: int = 3) -> GeometricGains:
    """Gains for a zenith-type axis at the site latitude.

    p0 = sin(lat) sin(dec) is the time-averaged projection;
    <P^2> = p0^2 + (cos(lat) cos(dec))^2 / 2 its mean square over a day.
    Matched daily weighting gains sqrt(<P^2>)/|p0|, three-axis readout
    1/sqrt(<P^2>), and operating n_axes identical sensors adds the usual
    sqrt(n) resource factor.
    """
    lam = math.radians(site.latitude_deg)
    dec = math.radians(site.wind_dec_deg)
    p0 = math.sin(lam) * math.sin(dec)
    p2 = p0**2 + (math.cos(lam) * math.cos(dec)) ** 2 / 2.0
    if abs(p0) < 1e-12:
        raise GainUnboundedError(
            "time-averaged projection vanishes: matched-weighting gain unbounded"
        )
    g_daily = math.sqrt(p2) / abs(p0)
    g_three_axis = 1.0 / math.sqrt(p2)
    g_total = math.sqrt(n_axes) * g_daily * g_three_axis
    return GeometricGains(
        p0=p0,
        mean_square_projection=p2,
        g_daily=g_daily,
        g_three_axis=g_three_axis,
        g_total=g_total,
        n_axes=n_axes,
    )
