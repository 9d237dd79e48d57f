from typing import Sequence, Union

import numpy as np

from .exceptions import ConfigError, ShapeMismatchError
from .scenario import Placement, pathloss_nlos
from .stats import AcaStatistics
from .utils import complex_normal

__all__ = (
    "RateReport",
    "sjnr_statistical",
    "sjnr_statistical_all",
    "sjnr_realized",
    "sjnr_realized_all",
    "rate_per_lu",
    "sum_rate",
    "active_jammer_penalty",
    "ACTIVE_JAMMER_POSITION",
)

ACTIVE_JAMMER_POSITION = (-2.0, 0.0, 5.0)


def _variances(stats, users: int) -> np.ndarray:
    if stats is None:
        return np.zeros(users)
    if isinstance(stats, AcaStatistics):
        stats = stats.variances
    return np.broadcast_to(np.asarray(stats, dtype=float), (users,))


def _extra(extra, users: int) -> np.ndarray:
    return np.broadcast_to(np.asarray(0.0 if extra is None else extra, dtype=float), (users,))


def _check_operands(H: np.ndarray, W: np.ndarray):
    if H.shape != W.shape:
        raise ShapeMismatchError(H.shape, W.shape, "precoder")


def sjnr_statistical_all(
    H_rpt: np.ndarray,
    W: np.ndarray,
    stats=None,
    noise: float = 1.0,
    extra=None,
) -> np.ndarray:
    """
    Statistical SJNR of every LU.

    For LU ``k`` with column ``w_k``::

        eta_k = (|h_k^H w_k|^2 + v_k ||w_k||^2)
                / (sum_{u != k} (|h_u^H w_k|^2 + v_u ||w_k||^2) + sigma^2 + extra_k)

    Parameters
    ----------
    H_rpt: numpy.ndarray
        ``(N_A, K)`` trained channel.
    W: numpy.ndarray
        ``(N_A, K)`` precoder.
    stats: AcaStatistics, numpy.ndarray or None
        ACA variances ``v_k``; ``None`` means no jamming.
    noise: float
        ``sigma^2`` in watts.
    extra: float or numpy.ndarray, optional
        Additional interference power per LU, e.g. from an active jammer.

    Returns
    -------
    numpy.ndarray
        ``K`` vector of linear SJNRs.
    """
    H_rpt = np.asarray(H_rpt, dtype=complex)
    W = np.asarray(W, dtype=complex)
    _check_operands(H_rpt, W)
    users = H_rpt.shape[1]
    variances = _variances(stats, users)

    gains = np.abs(H_rpt.conj().T @ W) ** 2
    norms = np.sum(np.abs(W) ** 2, axis=0)
    own = np.diag(gains)
    leakage = gains.sum(axis=0) - own
    jam_own = variances * norms
    jam_other = (variances.sum() - variances) * norms
    return (own + jam_own) / (leakage + jam_other + noise + _extra(extra, users))


def sjnr_statistical(
    k: int, H_rpt: np.ndarray, W: np.ndarray, stats=None, noise: float = 1.0, extra=None
) -> float:
    """The statistical SJNR of LU ``k``; see `sjnr_statistical_all`."""
    users = np.shape(H_rpt)[1]
    if not 0 <= k < users:
        raise IndexError(f"LU index {k} out of range")
    return float(sjnr_statistical_all(H_rpt, W, stats, noise, extra)[k])


def sjnr_realized_all(
    H_dt: Union[np.ndarray, Sequence[np.ndarray]], W: np.ndarray, noise: float, extra=None
) -> np.ndarray:
    """
    SJNR of every LU measured over the realized DT sub-slot channels.

    Numerator and denominator are averaged over the sub-slots separately, so the
    result is a ratio of means.

    Parameters
    ----------
    H_dt: numpy.ndarray
        ``(C, N_A, K)`` stack (or sequence) of sub-slot channels.
    W: numpy.ndarray
        ``(N_A, K)`` precoder fixed for the whole frame.
    noise: float
        ``sigma^2`` in watts.
    extra: float or numpy.ndarray, optional
        Additional mean interference power per LU.
    """
    H_dt = np.asarray(H_dt, dtype=complex)
    if H_dt.ndim == 2:
        H_dt = H_dt[None]
    if H_dt.shape[0] < 1:
        raise ConfigError("sub_slots", "at least one DT sub-slot is required")
    W = np.asarray(W, dtype=complex)
    _check_operands(H_dt[0], W)
    users = W.shape[1]

    gains = np.abs(np.conj(np.swapaxes(H_dt, 1, 2)) @ W) ** 2
    own = np.diagonal(gains, axis1=1, axis2=2)
    leakage = gains.sum(axis=1) - own
    return own.mean(axis=0) / (leakage.mean(axis=0) + noise + _extra(extra, users))


def sjnr_realized(k: int, H_dt, W: np.ndarray, noise: float, extra=None) -> float:
    """The realized SJNR of LU ``k``; see `sjnr_realized_all`."""
    users = np.shape(W)[1]
    if not 0 <= k < users:
        raise IndexError(f"LU index {k} out of range")
    return float(sjnr_realized_all(H_dt, W, noise, extra)[k])


def _check_sjnr(sjnr) -> np.ndarray:
    sjnr = np.atleast_1d(np.asarray(sjnr, dtype=float))
    if sjnr.size == 0:
        raise ConfigError("sjnr", "at least one LU is required")
    if np.any(sjnr < 0):
        raise ConfigError("sjnr", "SJNR values must be non-negative")
    return sjnr


def sum_rate(sjnr) -> float:
    """``sum_k log2(1 + eta_k)`` in bit/s/Hz."""
    return float(np.sum(np.log2(1.0 + _check_sjnr(sjnr))))


def rate_per_lu(sjnr) -> float:
    """
    The sum rate divided by the number of LUs.

    >>> rate_per_lu([3.0, 1.0])
    1.5
    """
    sjnr = _check_sjnr(sjnr)
    return sum_rate(sjnr) / sjnr.size


class RateReport:
    """
    The rate outcome of one benchmark on one channel realization.

    Attributes
    ----------
    sjnr: numpy.ndarray
        Per-LU SJNR (linear).
    benchmark: str
        The tag of the benchmark that produced it.
    """

    __slots__ = ("sjnr", "benchmark")

    def __init__(self, sjnr, benchmark: str):
        self.sjnr = _check_sjnr(sjnr)
        self.benchmark = benchmark

    def __repr__(self):
        return f"<RateReport benchmark={self.benchmark!r} rate_per_lu={self.rate_per_lu:.4f}>"

    @property
    def sum_rate(self) -> float:
        return sum_rate(self.sjnr)

    @property
    def rate_per_lu(self) -> float:
        return rate_per_lu(self.sjnr)


def active_jammer_penalty(
    position,
    power: float,
    placement: Placement,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    Interference power an active single-antenna jammer adds at every LU.

    The jammer reaches each LU through an NLOS Rayleigh channel, so LU ``k`` sees
    ``P_J L_NLOS(d_k) |g_k|^2`` with ``g_k`` unit circular Gaussian.

    Parameters
    ----------
    position: Sequence[float]
        Jammer location in metres.
    power: float
        Jammer transmit power ``P_J`` in watts.
    placement: Placement
        Provides the LU positions.
    rng: numpy.random.Generator
        Stream for the fading draws.

    Raises
    ------
    ConfigError
        ``power`` is negative.
    """
    if power < 0:
        raise ConfigError("jammer_power", "must be non-negative")
    position = np.asarray(position, dtype=float)
    distances = np.linalg.norm(placement.lu_positions - position[None, :], axis=1)
    fading = np.abs(complex_normal(rng, distances.size)) ** 2
    return power * np.atleast_1d(pathloss_nlos(distances)) * fading
