import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple, Union

import numpy as np

from .exceptions import ConfigError
from .utils import dbm_to_watts, watts_to_dbm

__all__ = (
    "AP_ORIGIN",
    "ScenarioConfig",
    "Placement",
    "LargeScale",
    "build_scenario",
    "large_scale_fading",
    "pathloss_los",
    "pathloss_nlos",
    "noise_variance",
    "noise_variance_dbm",
)

log = logging.getLogger(__name__)

AP_ORIGIN = (0.0, 0.0, 5.0)
DIRS_HEIGHT = 5.0

# Table values of the 3GPP-style large-scale models, in dB.
LOS_INTERCEPT, LOS_SLOPE = 35.6, 22.0
NLOS_INTERCEPT, NLOS_SLOPE = 32.6, 36.7
THERMAL_FLOOR_DBM = -170.0


def _check_distance(d_p) -> np.ndarray:
    d_p = np.asarray(d_p, dtype=float)
    if np.any(~(d_p > 0)):
        raise ConfigError("distance", "pathloss needs strictly positive distances")
    return d_p


def _maybe_scalar(value: np.ndarray):
    return float(value) if value.ndim == 0 else value


def pathloss_los(d_p):
    """
    Linear gain of the line-of-sight model ``35.6 + 22 log10(d)`` dB.

    Parameters
    ----------
    d_p: float or numpy.ndarray
        Link distance(s) in metres.

    Returns
    -------
    float or numpy.ndarray
        ``10 ** (-(35.6 + 22 log10(d)) / 10)``.

    Raises
    ------
    ConfigError
        A distance was zero or negative.
    """
    d_p = _check_distance(d_p)
    return _maybe_scalar(10.0 ** (-(LOS_INTERCEPT + LOS_SLOPE * np.log10(d_p)) / 10.0))


def pathloss_nlos(d_p):
    """
    Linear gain of the non-line-of-sight model ``32.6 + 36.7 log10(d)`` dB.

    See `pathloss_los` for parameters and errors.
    """
    d_p = _check_distance(d_p)
    return _maybe_scalar(10.0 ** (-(NLOS_INTERCEPT + NLOS_SLOPE * np.log10(d_p)) / 10.0))


def noise_variance_dbm(bandwidth: float) -> float:
    """
    AWGN power ``-170 + 10 log10(BW)`` in dBm.

    >>> noise_variance_dbm(1e6)
    -110.0
    """
    if not bandwidth > 0:
        raise ConfigError("bandwidth", "must be positive")
    return THERMAL_FLOOR_DBM + 10.0 * math.log10(bandwidth)


def noise_variance(bandwidth: float) -> float:
    """AWGN power in watts for the given bandwidth in Hz."""
    return float(dbm_to_watts(noise_variance_dbm(bandwidth)))


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Geometry, array sizes and power budget of one simulated deployment.

    All quantities are linear (watts, metres) except where a ``_dbm`` accessor says
    otherwise.

    Attributes
    ----------
    num_users: int
        Number of single-antenna LUs, ``K``.
    num_antennas: int
        Number of AP antennas, ``N_A``. Must be at least ``K`` for zero-forcing.
    num_elements: int
        Number of DIRS reflecting elements, ``N_D``.
    ap_dirs_distance: float
        AP–DIRS distance ``d_AD`` in metres.
    wavelength: float
        Carrier wavelength in metres.
    spacing: Optional[float]
        Antenna/element spacing. ``None`` means half a wavelength.
    bandwidth: float
        Transmission bandwidth in Hz.
    tx_power: float
        Total AP transmit power ``P0`` in watts.
    frame_ratio: int
        ``C = T_D / T_R``, the number of DT sub-slots per coherence frame.
    rician_factors: Union[float, Tuple[float, ...]]
        Linear Rician factor per AP antenna, or one value for all.
    noise_power: Optional[float]
        Noise variance in watts. ``None`` derives it from the bandwidth.
    lu_center: Tuple[float, float, float]
        Centre of the disk the LUs are dropped in.
    lu_radius: float
        Radius of that disk in metres.
    seed: int
        Base seed of every random stream derived from this configuration.
    """

    num_users: int = 12
    num_antennas: int = 16
    num_elements: int = 2048
    ap_dirs_distance: float = 2.0
    wavelength: float = 0.05
    spacing: Optional[float] = None
    bandwidth: float = 180e3
    tx_power: float = field(default_factory=lambda: 12 * float(dbm_to_watts(-2.0)))
    frame_ratio: int = 6
    rician_factors: Union[float, Tuple[float, ...]] = 10.0
    noise_power: Optional[float] = None
    lu_center: Tuple[float, float, float] = (0.0, 180.0, 0.0)
    lu_radius: float = 20.0
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self):
        """
        Check every invariant of the configuration.

        Raises
        ------
        ConfigError
            A field is out of range.
        """
        if self.num_users < 1:
            raise ConfigError("num_users", "at least one LU is required")
        if self.num_antennas < self.num_users:
            raise ConfigError("num_antennas", "must be >= num_users for zero-forcing")
        if self.num_elements < 1:
            raise ConfigError("num_elements", "at least one DIRS element is required")
        if not self.ap_dirs_distance > 0:
            raise ConfigError("ap_dirs_distance", "must be positive")
        if not self.wavelength > 0:
            raise ConfigError("wavelength", "must be positive")
        if self.spacing is not None and not self.spacing > 0:
            raise ConfigError("spacing", "must be positive")
        if not self.bandwidth > 0:
            raise ConfigError("bandwidth", "must be positive")
        if not self.tx_power > 0:
            raise ConfigError("tx_power", "must be positive")
        if self.frame_ratio < 1:
            raise ConfigError("frame_ratio", "must be >= 1")
        if self.noise_power is not None and not self.noise_power > 0:
            raise ConfigError("noise_power", "must be positive")
        if not self.lu_radius > 0:
            raise ConfigError("lu_radius", "must be positive")
        if len(self.lu_center) != 3:
            raise ConfigError("lu_center", "must be a 3-D point")
        factors = np.atleast_1d(np.asarray(self.rician_factors, dtype=float))
        if factors.size not in (1, self.num_antennas):
            raise ConfigError("rician_factors", "need one value or one per antenna")
        if np.any(factors < 0):
            raise ConfigError("rician_factors", "must be non-negative")

    @classmethod
    def with_power_per_lu(cls, power_dbm: float, **kwargs) -> "ScenarioConfig":
        """Build a configuration whose ``P0 / K`` equals ``power_dbm``."""
        users = kwargs.get("num_users", cls.num_users)
        return cls(tx_power=users * float(dbm_to_watts(power_dbm)), **kwargs)

    def replace(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)

    @property
    def element_spacing(self) -> float:
        return self.wavelength / 2.0 if self.spacing is None else self.spacing

    @property
    def noise(self) -> float:
        """Noise variance ``sigma^2`` in watts."""
        if self.noise_power is not None:
            return self.noise_power
        return noise_variance(self.bandwidth)

    @property
    def power_per_lu(self) -> float:
        return self.tx_power / self.num_users

    @property
    def power_per_lu_dbm(self) -> float:
        return float(watts_to_dbm(self.power_per_lu))

    @property
    def rician(self) -> np.ndarray:
        """The Rician factor of every AP antenna as an ``N_A`` vector."""
        factors = np.atleast_1d(np.asarray(self.rician_factors, dtype=float))
        return np.broadcast_to(factors, (self.num_antennas,)).copy()

    @property
    def dirs_origin(self) -> Tuple[float, float, float]:
        return (-self.ap_dirs_distance, 0.0, DIRS_HEIGHT)


class Placement:
    """
    Positions of every radiating point of a deployment.

    Attributes
    ----------
    ap_positions: numpy.ndarray
        ``(N_A, 3)`` antenna positions; row 0 is the AP deployment point.
    dirs_positions: numpy.ndarray
        ``(N_D, 3)`` element positions; row 0 is the DIRS deployment point.
    lu_positions: numpy.ndarray
        ``(K, 3)`` LU positions.
    wavelength: float
        Carrier wavelength used for near-field phases.
    """

    __slots__ = ("ap_positions", "dirs_positions", "lu_positions", "wavelength")

    def __init__(
        self,
        ap_positions: np.ndarray,
        dirs_positions: np.ndarray,
        lu_positions: np.ndarray,
        wavelength: float,
    ):
        self.ap_positions = np.asarray(ap_positions, dtype=float)
        self.dirs_positions = np.asarray(dirs_positions, dtype=float)
        self.lu_positions = np.asarray(lu_positions, dtype=float)
        self.wavelength = float(wavelength)

    def __repr__(self):
        return (
            f"<Placement antennas={len(self.ap_positions)} "
            f"elements={len(self.dirs_positions)} users={len(self.lu_positions)}>"
        )

    @property
    def ap_origin(self) -> np.ndarray:
        return self.ap_positions[0]

    @property
    def dirs_origin(self) -> np.ndarray:
        return self.dirs_positions[0]


class LargeScale:
    """
    Linear large-scale gains of one placement.

    Attributes
    ----------
    ap_dirs: float
        AP–DIRS gain ``L_G`` (line of sight).
    dirs_lu: numpy.ndarray
        DIRS–LU gains ``L_I`` as a ``K`` vector.
    ap_lu: numpy.ndarray
        AP–LU gains ``L_d`` as a ``K`` vector.
    """

    __slots__ = ("ap_dirs", "dirs_lu", "ap_lu")

    def __init__(self, ap_dirs: float, dirs_lu: np.ndarray, ap_lu: np.ndarray):
        self.ap_dirs = float(ap_dirs)
        self.dirs_lu = np.asarray(dirs_lu, dtype=float)
        self.ap_lu = np.asarray(ap_lu, dtype=float)

    def __repr__(self):
        return f"<LargeScale ap_dirs={self.ap_dirs!r} users={len(self.ap_lu)}>"


def _linear_array(origin, count: int, spacing: float, direction: float) -> np.ndarray:
    points = np.tile(np.asarray(origin, dtype=float), (count, 1))
    points[:, 0] += direction * spacing * np.arange(count)
    return points


def build_scenario(config: ScenarioConfig, rng: Optional[np.random.Generator] = None) -> Placement:
    """
    Lay out the AP, DIRS and LUs of a deployment.

    The AP is a uniform linear array starting at ``(0, 0, 5)`` and growing along +x;
    the DIRS is a uniform linear array starting at ``(-d_AD, 0, 5)`` and growing along
    -x. LUs are dropped uniformly over the configured disk at height 0.

    Parameters
    ----------
    config: ScenarioConfig
        The deployment to lay out.
    rng: Optional[numpy.random.Generator]
        Stream for the LU drop. Defaults to one seeded from ``config.seed``.

    Returns
    -------
    Placement
        The positions of all antennas, elements and LUs.

    Raises
    ------
    ConfigError
        The configuration is invalid (e.g. non-positive ``d_AD`` or radius).
    """
    config.validate()
    if rng is None:
        rng = np.random.default_rng(config.seed)
    spacing = config.element_spacing
    ap = _linear_array(AP_ORIGIN, config.num_antennas, spacing, +1.0)
    dirs = _linear_array(config.dirs_origin, config.num_elements, spacing, -1.0)

    radius = config.lu_radius * np.sqrt(rng.random(config.num_users))
    angle = rng.uniform(0.0, 2.0 * np.pi, config.num_users)
    center = np.asarray(config.lu_center, dtype=float)
    users = np.empty((config.num_users, 3))
    users[:, 0] = center[0] + radius * np.cos(angle)
    users[:, 1] = center[1] + radius * np.sin(angle)
    users[:, 2] = 0.0

    log.debug("placed %d LUs around %s", config.num_users, tuple(center))
    return Placement(ap, dirs, users, config.wavelength)


def large_scale_fading(placement: Placement) -> LargeScale:
    """
    Large-scale gains between the deployment points of a placement.

    The AP–DIRS link uses the line-of-sight model; both LU links use the
    non-line-of-sight model.
    """
    ap, dirs = placement.ap_origin, placement.dirs_origin
    users = placement.lu_positions
    return LargeScale(
        ap_dirs=pathloss_los(float(np.linalg.norm(ap - dirs))),
        dirs_lu=np.atleast_1d(pathloss_nlos(np.linalg.norm(users - dirs, axis=1))),
        ap_lu=np.atleast_1d(pathloss_nlos(np.linalg.norm(users - ap, axis=1))),
    )
