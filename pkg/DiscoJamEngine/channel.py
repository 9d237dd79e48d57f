import logging
from typing import Optional

import numpy as np

from .exceptions import ConfigError
from .scenario import LargeScale, Placement, ScenarioConfig
from .utils import complex_normal

__all__ = (
    "ChannelSet",
    "sample_direct_channel",
    "sample_dirs_lu_channel",
    "sample_ap_dirs_channel",
    "sample_channels",
    "los_element",
    "los_matrix",
)

log = logging.getLogger(__name__)


class ChannelSet:
    """
    One small-scale realization of every link of a deployment.

    Attributes
    ----------
    G: numpy.ndarray
        ``(N_D, N_A)`` AP–DIRS channel.
    H_I: numpy.ndarray
        ``(K, N_D)`` DIRS–LU channel; row ``k`` is ``h_{I,k}``.
    H_d: numpy.ndarray
        ``(K, N_A)`` direct AP–LU channel; row ``k`` is ``h_{d,k}``.
    large_scale: LargeScale
        The large-scale gains the realization was scaled with.
    """

    __slots__ = ("G", "H_I", "H_d", "large_scale")

    def __init__(self, G: np.ndarray, H_I: np.ndarray, H_d: np.ndarray, large_scale: LargeScale):
        self.G = G
        self.H_I = H_I
        self.H_d = H_d
        self.large_scale = large_scale

    def __repr__(self):
        users, elements = self.H_I.shape
        return f"<ChannelSet users={users} antennas={self.H_d.shape[1]} elements={elements}>"

    @property
    def num_users(self) -> int:
        return self.H_d.shape[0]

    @property
    def num_antennas(self) -> int:
        return self.H_d.shape[1]

    @property
    def num_elements(self) -> int:
        return self.G.shape[0]


def _far_field(gains: np.ndarray, columns: int, rng: np.random.Generator) -> np.ndarray:
    gains = np.asarray(gains, dtype=float)
    return np.sqrt(gains)[:, None] * complex_normal(rng, (gains.size, columns))


def sample_direct_channel(
    placement: Placement, large_scale: LargeScale, rng: np.random.Generator
) -> np.ndarray:
    """
    Draw the far-field AP–LU channel ``H_d``.

    Row ``k`` is ``sqrt(L_{d,k})`` times i.i.d. unit-variance circular Gaussians.
    """
    return _far_field(large_scale.ap_lu, len(placement.ap_positions), rng)


def sample_dirs_lu_channel(
    placement: Placement, large_scale: LargeScale, rng: np.random.Generator
) -> np.ndarray:
    """Draw the far-field DIRS–LU channel ``H_I``, scaled per LU by ``sqrt(L_{I,k})``."""
    return _far_field(large_scale.dirs_lu, len(placement.dirs_positions), rng)


def _path_difference(placement: Placement) -> np.ndarray:
    # D_n^r - D_n, with the DIRS deployment point as the phase reference.
    ap = placement.ap_positions
    to_elements = np.linalg.norm(
        placement.dirs_positions[:, None, :] - ap[None, :, :], axis=-1
    )
    to_origin = np.linalg.norm(ap - placement.dirs_origin, axis=-1)
    return to_elements - to_origin[None, :]


def los_element(
    placement: Placement, r: int, n: int, wavelength: Optional[float] = None
) -> complex:
    """
    One entry of the near-field LOS matrix, ``exp(-j 2 pi / lambda (D_n^r - D_n))``.

    Indices are zero-based: ``r = 0`` is the DIRS deployment point.

    Raises
    ------
    IndexError
        ``r`` or ``n`` does not name an element/antenna of the placement.
    """
    if not 0 <= r < len(placement.dirs_positions):
        raise IndexError(f"element index {r} out of range")
    if not 0 <= n < len(placement.ap_positions):
        raise IndexError(f"antenna index {n} out of range")
    wavelength = placement.wavelength if wavelength is None else wavelength
    antenna = placement.ap_positions[n]
    d_rn = np.linalg.norm(placement.dirs_positions[r] - antenna)
    d_n = np.linalg.norm(placement.dirs_origin - antenna)
    return complex(np.exp(-1j * 2.0 * np.pi / wavelength * (d_rn - d_n)))


def los_matrix(placement: Placement, wavelength: Optional[float] = None) -> np.ndarray:
    """The full ``(N_D, N_A)`` matrix of `los_element` values."""
    wavelength = placement.wavelength if wavelength is None else wavelength
    return np.exp(-1j * 2.0 * np.pi / wavelength * _path_difference(placement))


def sample_ap_dirs_channel(
    placement: Placement,
    large_scale: LargeScale,
    rician,
    rng: np.random.Generator,
    *,
    los: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Draw the near-field Rician AP–DIRS channel ``G``.

    Column ``n`` mixes the deterministic LOS column with weight
    ``sqrt(eps_n / (eps_n + 1))`` and an i.i.d. Rayleigh column with weight
    ``sqrt(1 / (eps_n + 1))``, all scaled by ``sqrt(L_G)``.

    Parameters
    ----------
    placement: Placement
        Geometry providing the LOS phases.
    large_scale: LargeScale
        Provides ``L_G``.
    rician: float or numpy.ndarray
        Linear Rician factor, scalar or one per antenna.
    rng: numpy.random.Generator
        Stream for the NLOS part.
    los: Optional[numpy.ndarray]
        A precomputed `los_matrix`, reused across realizations of one placement.

    Raises
    ------
    ConfigError
        A Rician factor is negative.
    """
    elements, antennas = len(placement.dirs_positions), len(placement.ap_positions)
    factors = np.broadcast_to(np.asarray(rician, dtype=float), (antennas,))
    if np.any(factors < 0):
        raise ConfigError("rician_factors", "must be non-negative")
    if los is None:
        los = los_matrix(placement)
    nlos = complex_normal(rng, (elements, antennas))
    los_weight = np.sqrt(factors / (factors + 1.0))
    nlos_weight = np.sqrt(1.0 / (factors + 1.0))
    return np.sqrt(large_scale.ap_dirs) * (los * los_weight + nlos * nlos_weight)


def sample_channels(
    config: ScenarioConfig,
    placement: Placement,
    large_scale: LargeScale,
    rng: np.random.Generator,
    *,
    los: Optional[np.ndarray] = None,
) -> ChannelSet:
    """Draw ``G``, ``H_I`` and ``H_d`` for one realization, in that order."""
    G = sample_ap_dirs_channel(placement, large_scale, config.rician, rng, los=los)
    H_I = sample_dirs_lu_channel(placement, large_scale, rng)
    H_d = sample_direct_channel(placement, large_scale, rng)
    return ChannelSet(G, H_I, H_d, large_scale)
