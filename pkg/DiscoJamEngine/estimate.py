import enum
import logging
from typing import List, Optional, Tuple

import numpy as np

from .channel import ChannelSet
from .dirs import CoherenceFrame, combined_channel
from .exceptions import ConfigError, EstimatorRangeError, ShapeMismatchError
from .precode import PrecodingMatrix, anti_jamming_precoder
from .stats import AcaStatistics

__all__ = (
    "FeedbackModel",
    "FeedbackLog",
    "feedback_power",
    "feedback_powers",
    "estimate_characteristic",
    "estimate_characteristics",
    "collect_feedback",
    "estimate_from_frame",
    "refresh_precoder",
)

log = logging.getLogger(__name__)


class FeedbackModel(enum.Enum):
    """
    What a LU reports as its received power during a DT sub-slot.

    ``TOTAL`` is ``(P0/K) ||h_DT||^2``. ``DECOMPOSED`` drops the cross term between
    the trained channel and the aging, ``(P0/K)(||h_RPT||^2 + ||h_DT - h_RPT||^2)``.
    """

    DECOMPOSED = "decomposed"
    TOTAL = "total"

    @classmethod
    def parse(cls, value) -> "FeedbackModel":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigError("feedback_model", f"unknown feedback model {value!r}") from None


def _noisy(power, noise_std: float, rng: Optional[np.random.Generator]):
    if noise_std < 0:
        raise ConfigError("noise_std", "must be non-negative")
    if noise_std == 0:
        return power
    if rng is None:
        raise ConfigError("rng", "measurement noise needs a random stream")
    return np.maximum(power + noise_std * rng.standard_normal(np.shape(power)), 0.0)


def feedback_power(
    h_dt_k: np.ndarray,
    P0: float,
    K: int,
    *,
    h_rpt_k: Optional[np.ndarray] = None,
    noise_std: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """
    The received power LU ``k`` feeds back after one DT sub-slot.

    Parameters
    ----------
    h_dt_k: numpy.ndarray
        ``N_A`` channel of the sub-slot.
    P0: float
        Total transmit power in watts.
    K: int
        Number of LUs.
    h_rpt_k: Optional[numpy.ndarray]
        The trained channel. When given, the cross term is dropped and the result is
        ``(P0/K)(||h_RPT||^2 + ||h_DT - h_RPT||^2)``.
    noise_std: float
        Standard deviation of additive measurement noise, off by default.
    rng: Optional[numpy.random.Generator]
        Stream for the measurement noise.

    Returns
    -------
    float
        A non-negative power in watts.
    """
    h_dt_k = np.asarray(h_dt_k, dtype=complex)
    if h_rpt_k is None:
        power = P0 / K * float(np.vdot(h_dt_k, h_dt_k).real)
    else:
        h_rpt_k = np.asarray(h_rpt_k, dtype=complex)
        if h_rpt_k.shape != h_dt_k.shape:
            raise ShapeMismatchError(h_dt_k.shape, h_rpt_k.shape, "trained channel")
        aging = h_dt_k - h_rpt_k
        power = P0 / K * float(np.vdot(h_rpt_k, h_rpt_k).real + np.vdot(aging, aging).real)
    return float(_noisy(power, noise_std, rng))


def feedback_powers(
    H_dt: np.ndarray,
    P0: float,
    *,
    H_rpt: Optional[np.ndarray] = None,
    noise_std: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """`feedback_power` of every LU at once; ``H_dt`` is ``(N_A, K)``."""
    H_dt = np.asarray(H_dt, dtype=complex)
    users = H_dt.shape[1]
    if H_rpt is None:
        power = P0 / users * np.sum(np.abs(H_dt) ** 2, axis=0)
    else:
        H_rpt = np.asarray(H_rpt, dtype=complex)
        if H_rpt.shape != H_dt.shape:
            raise ShapeMismatchError(H_dt.shape, H_rpt.shape, "trained channel")
        power = P0 / users * (
            np.sum(np.abs(H_rpt) ** 2, axis=0) + np.sum(np.abs(H_dt - H_rpt) ** 2, axis=0)
        )
    return _noisy(power, noise_std, rng)


class FeedbackLog:
    """
    The received powers fed back by every LU during one coherence frame.

    Attributes
    ----------
    powers: List[numpy.ndarray]
        One ``K`` vector per feedback set, in the order they arrived.
    frame_ratio: int
        ``C``, the most feedback sets a frame can carry.
    num_users: int
        ``K``.
    """

    __slots__ = ("powers", "frame_ratio", "num_users")

    def __init__(self, num_users: int, frame_ratio: int):
        if frame_ratio < 1:
            raise ConfigError("frame_ratio", "must be >= 1")
        self.powers: List[np.ndarray] = []
        self.frame_ratio = frame_ratio
        self.num_users = num_users

    def __repr__(self):
        return f"<FeedbackLog users={self.num_users} sets={len(self)}/{self.frame_ratio}>"

    def __len__(self):
        return len(self.powers)

    @property
    def count(self) -> int:
        """``m``, the number of feedback sets received so far."""
        return len(self.powers)

    def append(self, powers) -> None:
        """
        Record one feedback set.

        Raises
        ------
        ConfigError
            The frame already holds ``C`` sets or a power is negative.
        ShapeMismatchError
            ``powers`` does not have one entry per LU.
        """
        powers = np.asarray(powers, dtype=float)
        if powers.shape != (self.num_users,):
            raise ShapeMismatchError((self.num_users,), powers.shape, "feedback set")
        if np.any(powers < 0):
            raise ConfigError("feedback", "received powers must be non-negative")
        if len(self.powers) >= self.frame_ratio:
            raise ConfigError("feedback", f"a frame carries at most {self.frame_ratio} sets")
        self.powers.append(powers)

    def matrix(self, s: Optional[int] = None) -> np.ndarray:
        """The first ``s`` sets as an ``(s, K)`` array."""
        s = len(self.powers) if s is None else s
        self.check_index(s)
        return np.stack(self.powers[:s])

    def check_index(self, s: int):
        if not 1 <= s <= len(self.powers):
            raise EstimatorRangeError(s, len(self.powers))

    def running_estimates(self, H_rpt: np.ndarray, P0: float) -> np.ndarray:
        """Estimates for every ``s = 1..m`` as an ``(m, K)`` array."""
        return np.stack(
            [estimate_characteristics(self, H_rpt, P0, s) for s in range(1, len(self) + 1)]
        )

    def trace_rows(
        self, frame: int, H_rpt: np.ndarray, P0: float
    ) -> List[Tuple[int, int, int, float, float]]:
        """Rows ``(frame, s, k, p_k^s, estimate)`` for the feedback-trace CSV."""
        estimates = self.running_estimates(H_rpt, P0)
        return [
            (frame, s + 1, k, float(self.powers[s][k]), float(estimates[s, k]))
            for s in range(len(self))
            for k in range(self.num_users)
        ]


def estimate_characteristic(
    feedback: FeedbackLog,
    k: int,
    h_rpt_k: np.ndarray,
    P0: float,
    N_A: Optional[int],
    s: int,
) -> float:
    """
    The ``s``-th running estimate of ``L_G L_{I,k} N_D alpha_bar`` for LU ``k``.

    Evaluates ``|K sum_{i<=s} p_k^i - s P0 ||h_RPT,k||^2| / (P0 N_A s)``; feedback that
    only ever reports the trained channel gives 0.

    Parameters
    ----------
    feedback: FeedbackLog
        The fed-back powers of the frame.
    k: int
        LU index.
    h_rpt_k: numpy.ndarray
        The trained channel of LU ``k``.
    P0: float
        Total transmit power in watts.
    N_A: Optional[int]
        AP antenna count; defaults to ``len(h_rpt_k)``.
    s: int
        Number of feedback sets to use, ``1 <= s <= m``.

    Raises
    ------
    EstimatorRangeError
        ``s`` lies outside ``1..m``.
    """
    feedback.check_index(s)
    if not 0 <= k < feedback.num_users:
        raise IndexError(f"LU index {k} out of range")
    h_rpt_k = np.asarray(h_rpt_k, dtype=complex)
    N_A = h_rpt_k.size if N_A is None else N_A
    received = sum(float(p[k]) for p in feedback.powers[:s])
    trained = float(np.vdot(h_rpt_k, h_rpt_k).real)
    return abs(feedback.num_users * received - s * P0 * trained) / (P0 * N_A * s)


def estimate_characteristics(
    feedback: FeedbackLog, H_rpt: np.ndarray, P0: float, s: int
) -> np.ndarray:
    """`estimate_characteristic` of every LU; ``H_rpt`` is ``(N_A, K)``."""
    H_rpt = np.asarray(H_rpt, dtype=complex)
    if H_rpt.shape[1] != feedback.num_users:
        raise ShapeMismatchError((H_rpt.shape[0], feedback.num_users), H_rpt.shape, "H_RPT")
    received = feedback.matrix(s).sum(axis=0)
    trained = np.sum(np.abs(H_rpt) ** 2, axis=0)
    return np.abs(feedback.num_users * received - s * P0 * trained) / (P0 * H_rpt.shape[0] * s)


def collect_feedback(
    channels: ChannelSet,
    frame: CoherenceFrame,
    P0: float,
    *,
    model=FeedbackModel.DECOMPOSED,
    noise_std: float = 0.0,
    rng: Optional[np.random.Generator] = None,
    count: Optional[int] = None,
) -> Tuple[FeedbackLog, np.ndarray]:
    """
    Play out the feedback sets of one frame.

    Returns
    -------
    Tuple[FeedbackLog, numpy.ndarray]
        The log holding ``count`` sets (all ``C`` by default) and the trained channel
        ``H_RPT``.
    """
    model = FeedbackModel.parse(model)
    count = len(frame) if count is None else count
    if not 1 <= count <= len(frame):
        raise EstimatorRangeError(count, len(frame))
    H_rpt = combined_channel(channels, frame.rpt_state)
    feedback = FeedbackLog(channels.num_users, len(frame))
    reference = H_rpt if model is FeedbackModel.DECOMPOSED else None
    for state in frame.dt_states[:count]:
        H_dt = combined_channel(channels, state)
        feedback.append(
            feedback_powers(H_dt, P0, H_rpt=reference, noise_std=noise_std, rng=rng)
        )
    return feedback, H_rpt


def estimate_from_frame(
    channels: ChannelSet,
    frame: CoherenceFrame,
    P0: float,
    s: int,
    *,
    model=FeedbackModel.DECOMPOSED,
    noise_std: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> AcaStatistics:
    """Estimated ACA statistics after ``s`` feedback sets of ``frame``."""
    feedback, H_rpt = collect_feedback(
        channels, frame, P0, model=model, noise_std=noise_std, rng=rng, count=s
    )
    return AcaStatistics.estimated(estimate_characteristics(feedback, H_rpt, P0, s), s)


def refresh_precoder(
    estimates, H_rpt: np.ndarray, noise: float, P0: float, K: Optional[int] = None
) -> PrecodingMatrix:
    """
    Recompute the anti-jamming precoder with estimated ACA variances in place of the
    closed form.
    """
    values = estimates.variances if isinstance(estimates, AcaStatistics) else estimates
    if np.any(np.asarray(values, dtype=float) < 0):
        raise ConfigError("estimates", "must be non-negative")
    log.debug("refreshing precoder from %s", type(estimates).__name__)
    return anti_jamming_precoder(H_rpt, estimates, noise, P0, K)
