import logging
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import linalg

from .exceptions import (
    ConfigError,
    NotPositiveDefiniteError,
    ShapeMismatchError,
    SingularChannelError,
)
from .stats import AcaStatistics

__all__ = (
    "Diagnostics",
    "PrecodingMatrix",
    "SjnrOperands",
    "zf_precoder",
    "max_generalized_eigvec",
    "sjnr_operands",
    "anti_jamming_precoder",
    "uniform_powers",
)

log = logging.getLogger(__name__)

# Relative eigenvalue gap below which the top eigenvalue counts as repeated.
DEGENERACY_TOL = 1e-9


class Diagnostics:
    """
    Numerical notes collected while building a precoder.

    Attributes
    ----------
    degenerate: List[int]
        LUs whose largest generalized eigenvalue was repeated.
    gaps: List[float]
        Relative gap between the two largest eigenvalues, one entry per solve.
    """

    __slots__ = ("degenerate", "gaps")

    def __init__(self):
        self.degenerate: List[int] = []
        self.gaps: List[float] = []

    def __repr__(self):
        return f"<Diagnostics solves={len(self.gaps)} degenerate={self.degenerate!r}>"

    def __bool__(self):
        return bool(self.degenerate)


class PrecodingMatrix:
    """
    Per-LU beamforming columns with their power budget.

    Attributes
    ----------
    W: numpy.ndarray
        ``(N_A, K)`` precoder; column ``k`` serves LU ``k``.
    powers: numpy.ndarray
        ``K`` vector of per-LU powers ``p_k``; ``||w_k|| = sqrt(p_k)``.
    eigenvalues: Optional[numpy.ndarray]
        The maximal generalized eigenvalue per LU for statistics-based precoders.
    diagnostics: Diagnostics
        Numerical notes from the construction.
    """

    __slots__ = ("W", "powers", "eigenvalues", "diagnostics")

    def __init__(
        self,
        W: np.ndarray,
        powers: np.ndarray,
        eigenvalues: Optional[np.ndarray] = None,
        diagnostics: Optional[Diagnostics] = None,
    ):
        self.W = W
        self.powers = np.asarray(powers, dtype=float)
        self.eigenvalues = eigenvalues
        self.diagnostics = diagnostics if diagnostics is not None else Diagnostics()

    def __repr__(self):
        antennas, users = self.W.shape
        return (
            f"<PrecodingMatrix antennas={antennas} users={users} "
            f"total_power={self.total_power!r}>"
        )

    def __len__(self):
        return self.W.shape[1]

    def column(self, k: int) -> np.ndarray:
        return self.W[:, k]

    @property
    def total_power(self) -> float:
        return float(np.sum(self.powers))


class SjnrOperands:
    """
    The generalized Rayleigh quotient pairs of every LU.

    Attributes
    ----------
    A: numpy.ndarray
        ``(K, N_A, N_A)`` stack of ``h_k h_k^H + v_k I``.
    B: numpy.ndarray
        ``(K, N_A, N_A)`` stack of
        ``H~_k H~_k^H + (sigma^2 / p_k + sum_{u != k} v_u) I``.
    """

    __slots__ = ("A", "B")

    def __init__(self, A: np.ndarray, B: np.ndarray):
        self.A = A
        self.B = B

    def __repr__(self):
        return f"<SjnrOperands users={self.A.shape[0]} antennas={self.A.shape[1]}>"

    def __len__(self):
        return self.A.shape[0]

    def pair(self, k: int) -> Tuple[np.ndarray, np.ndarray]:
        return self.A[k], self.B[k]


def uniform_powers(total_power: float, users: int) -> np.ndarray:
    """Split ``P0`` equally: ``p_k = P0 / K``."""
    if not total_power > 0:
        raise ConfigError("tx_power", "must be positive")
    return np.full(users, total_power / users)


def _powers(powers, users: int) -> np.ndarray:
    powers = np.broadcast_to(np.asarray(powers, dtype=float), (users,)).copy()
    if np.any(powers < 0):
        raise ConfigError("powers", "per-LU powers must be non-negative")
    return powers


def _normalize_columns(raw: np.ndarray, powers: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(raw, axis=0)
    return raw * (np.sqrt(powers) / norms)[None, :]


def zf_precoder(H_rpt: np.ndarray, powers: Union[float, np.ndarray]) -> PrecodingMatrix:
    """
    Zero-forcing precoder on the trained channel.

    The pseudo-inverse ``H (H^H H)^-1`` nulls inter-user interference on ``H_RPT``;
    each column is then rescaled to norm ``sqrt(p_k)``.

    Parameters
    ----------
    H_rpt: numpy.ndarray
        ``(N_A, K)`` channel acquired during RPT, column ``k`` is ``h_k``.
    powers: float or numpy.ndarray
        ``p_k``, one value for all LUs or one per LU.

    Returns
    -------
    PrecodingMatrix
        ``W`` with ``H_RPT^H W`` diagonal.

    Raises
    ------
    SingularChannelError
        ``H_RPT`` does not have full column rank.
    """
    H_rpt = np.asarray(H_rpt, dtype=complex)
    if H_rpt.ndim != 2:
        raise ShapeMismatchError(("N_A", "K"), H_rpt.shape, "H_RPT")
    antennas, users = H_rpt.shape
    rank = int(np.linalg.matrix_rank(H_rpt))
    if rank < users:
        log.error("cannot zero-force %d LUs with a rank-%d channel", users, rank)
        raise SingularChannelError(rank, users)
    powers = _powers(powers, users)
    gram = H_rpt.conj().T @ H_rpt
    raw = H_rpt @ linalg.inv(gram)
    return PrecodingMatrix(_normalize_columns(raw, powers), powers)


def _hermitian(M: np.ndarray) -> np.ndarray:
    return (M + M.conj().T) / 2.0


def max_generalized_eigvec(
    A: np.ndarray,
    B: np.ndarray,
    *,
    diagnostics: Optional[Diagnostics] = None,
    index: Optional[int] = None,
) -> Tuple[float, np.ndarray]:
    """
    Maximize the generalized Rayleigh quotient ``x^H A x / x^H B x``.

    ``B = L L^H`` is factored with Cholesky, the Hermitian matrix ``L^-1 A L^-H`` is
    diagonalized and its top eigenvector ``y`` is mapped back with ``v = L^-H y``.

    Parameters
    ----------
    A: numpy.ndarray
        Hermitian positive semidefinite matrix.
    B: numpy.ndarray
        Hermitian positive definite matrix of the same size.
    diagnostics: Optional[Diagnostics]
        Collector for eigenvalue gaps and degenerate maxima.
    index: Optional[int]
        LU index recorded in ``diagnostics`` when the maximum is repeated.

    Returns
    -------
    Tuple[float, numpy.ndarray]
        ``lambda_max`` and a unit-norm maximizer whose largest-magnitude component is
        real and positive.

    Raises
    ------
    ShapeMismatchError
        ``A`` and ``B`` are not square matrices of one size.
    NotPositiveDefiniteError
        ``B`` has no Cholesky factor.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeMismatchError((A.shape[0], A.shape[0]), A.shape, "A")
    if B.shape != A.shape:
        raise ShapeMismatchError(A.shape, B.shape, "B")

    try:
        L = linalg.cholesky(_hermitian(B), lower=True)
    except linalg.LinAlgError as error:
        raise NotPositiveDefiniteError("B is not positive definite") from error

    left = linalg.solve_triangular(L, _hermitian(A), lower=True)
    C = linalg.solve_triangular(L, left.conj().T, lower=True).conj().T
    values, vectors = linalg.eigh(_hermitian(C))
    lam = float(values[-1])
    v = linalg.solve_triangular(L, vectors[:, -1], lower=True, trans="C")
    v = v / np.linalg.norm(v)
    pivot = v[np.argmax(np.abs(v))]
    v = v * (np.conj(pivot) / abs(pivot))

    if values.size > 1:
        scale = max(abs(lam), np.finfo(float).tiny)
        gap = float(values[-1] - values[-2]) / scale
        if diagnostics is not None:
            diagnostics.gaps.append(gap)
        if gap <= DEGENERACY_TOL:
            log.warning("largest generalized eigenvalue %.6g is repeated", lam)
            if diagnostics is not None and index is not None:
                diagnostics.degenerate.append(index)
    return lam, v


def _variances(stats, users: int) -> np.ndarray:
    if isinstance(stats, AcaStatistics):
        stats = stats.variances
    variances = np.broadcast_to(np.asarray(stats, dtype=float), (users,)).copy()
    if np.any(variances < 0):
        raise ConfigError("variances", "ACA variances must be non-negative")
    return variances


def sjnr_operands(
    H_rpt: np.ndarray, stats, noise: float, powers: Union[float, np.ndarray]
) -> SjnrOperands:
    """
    Build the pair ``(A_k, B_k)`` whose Rayleigh quotient at ``w_k`` with
    ``||w_k||^2 = p_k`` is the statistical SJNR of LU ``k``.

    Raises
    ------
    ConfigError
        ``noise`` is not positive or a variance is negative.
    """
    if not noise > 0:
        raise ConfigError("noise_power", "must be positive")
    H_rpt = np.asarray(H_rpt, dtype=complex)
    antennas, users = H_rpt.shape
    variances = _variances(stats, users)
    powers = _powers(powers, users)
    if np.any(powers == 0):
        raise ConfigError("powers", "every LU needs a positive power")

    eye = np.eye(antennas)
    outer = np.einsum("nk,mk->knm", H_rpt, H_rpt.conj())
    total = outer.sum(axis=0)
    A = outer + variances[:, None, None] * eye
    loading = noise / powers + (variances.sum() - variances)
    B = (total[None, :, :] - outer) + loading[:, None, None] * eye
    return SjnrOperands(A, B)


def anti_jamming_precoder(
    H_rpt: np.ndarray,
    stats,
    noise: float,
    P0: float,
    K: Optional[int] = None,
    *,
    powers: Optional[np.ndarray] = None,
) -> PrecodingMatrix:
    """
    The statistics-based max-SJNR precoder.

    Column ``k`` is ``sqrt(p_k) v / ||v||`` with ``v`` the top generalized eigenvector
    of ``(A_k, B_k)``.

    Parameters
    ----------
    H_rpt: numpy.ndarray
        ``(N_A, K)`` trained channel.
    stats: AcaStatistics or numpy.ndarray
        Per-LU ACA variances ``v_k``.
    noise: float
        ``sigma^2`` in watts.
    P0: float
        Total transmit power in watts.
    K: Optional[int]
        Number of LUs; defaults to the width of ``H_rpt``.
    powers: Optional[numpy.ndarray]
        Per-LU powers; defaults to ``P0 / K`` each.

    Raises
    ------
    ShapeMismatchError
        ``K`` disagrees with ``H_rpt``.
    NotPositiveDefiniteError
        Propagated from the eigensolver.
    """
    H_rpt = np.asarray(H_rpt, dtype=complex)
    antennas, users = H_rpt.shape
    if K is not None and K != users:
        raise ShapeMismatchError((antennas, K), H_rpt.shape, "H_RPT")
    powers = uniform_powers(P0, users) if powers is None else _powers(powers, users)
    operands = sjnr_operands(H_rpt, stats, noise, powers)

    diagnostics = Diagnostics()
    W = np.empty((antennas, users), dtype=complex)
    eigenvalues = np.empty(users)
    for k in range(users):
        lam, v = max_generalized_eigvec(*operands.pair(k), diagnostics=diagnostics, index=k)
        W[:, k] = np.sqrt(powers[k]) * v
        eigenvalues[k] = lam
    return PrecodingMatrix(W, powers, eigenvalues, diagnostics)
