import enum
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy import stats as sps
from tqdm import tqdm

from .channel import los_matrix, sample_channels
from .dirs import DirsProfile, JammerMode, sample_frame
from .exceptions import ConfigError
from .scenario import LargeScale, ScenarioConfig, build_scenario, large_scale_fading
from .utils import Stream, ordered_sum, trial_rng

__all__ = (
    "AcaSource",
    "AcaStatistics",
    "AcaMoments",
    "NormalityResult",
    "alpha_bar_persistent",
    "alpha_bar_temporal",
    "alpha_bar",
    "mean_reflection",
    "aca_variances",
    "empirical_aca_moments",
    "normality_test",
    "variance_scaling",
    "moment_report_rows",
)

log = logging.getLogger(__name__)


class AcaSource(enum.Enum):
    """Where a set of per-LU ACA variances came from."""

    ZERO = "zero"
    CLOSED_FORM_PERSISTENT = "closed-form-persistent"
    CLOSED_FORM_TEMPORAL = "closed-form-temporal"
    ESTIMATED = "estimated"


class AcaStatistics:
    """
    Per-LU variance of the ACA channel entries.

    Attributes
    ----------
    alpha_bar: Optional[float]
        The dimensionless variance factor, ``None`` for estimated statistics.
    variances: numpy.ndarray
        ``K`` vector ``v_k = L_G L_{I,k} N_D alpha_bar`` of linear channel gains.
    source: AcaSource
        How the variances were obtained.
    feedback_count: Optional[int]
        The number of feedback sets ``s`` behind an estimate.
    """

    __slots__ = ("alpha_bar", "variances", "source", "feedback_count")

    def __init__(
        self,
        variances,
        source: AcaSource,
        *,
        alpha_bar: Optional[float] = None,
        feedback_count: Optional[int] = None,
    ):
        variances = np.atleast_1d(np.asarray(variances, dtype=float))
        if np.any(variances < 0) or not np.all(np.isfinite(variances)):
            raise ConfigError("variances", "ACA variances must be finite and non-negative")
        if alpha_bar is not None and alpha_bar < 0:
            raise ConfigError("alpha_bar", "must be non-negative")
        self.alpha_bar = alpha_bar
        self.variances = variances
        self.source = source
        self.feedback_count = feedback_count

    def __repr__(self):
        return (
            f"<AcaStatistics source={self.source.value} alpha_bar={self.alpha_bar!r} "
            f"users={self.variances.size}>"
        )

    def __len__(self):
        return self.variances.size

    @classmethod
    def zero(cls, num_users: int) -> "AcaStatistics":
        return cls(np.zeros(num_users), AcaSource.ZERO, alpha_bar=0.0)

    @classmethod
    def estimated(cls, estimates, feedback_count: int) -> "AcaStatistics":
        return cls(estimates, AcaSource.ESTIMATED, feedback_count=feedback_count)

    @property
    def label(self) -> str:
        if self.source is AcaSource.ESTIMATED:
            return f"estimated({self.feedback_count})"
        return self.source.value


def mean_reflection(profile: DirsProfile) -> complex:
    """The mean reflection coefficient ``sum_i P_i mu_i exp(j theta_i)``."""
    return complex(np.dot(np.asarray(profile.probs), profile.alphabet))


def alpha_bar_persistent(profile: DirsProfile) -> float:
    """
    The variance factor of a DIRS that randomizes in both RPT and DT.

    Evaluates the double sum over phase pairs
    ``P_i1 P_i2 (mu_i1^2 + mu_i2^2 - 2 mu_i1 mu_i2 cos(theta_i1 - theta_i2))``.

    >>> round(alpha_bar_persistent(DirsProfile.from_case("c2")), 4)
    1.6078
    """
    probs = np.asarray(profile.probs)
    gains = np.asarray(profile.gains)
    phases = np.asarray(profile.phases)
    weights = np.outer(probs, probs)
    terms = (
        gains[:, None] ** 2
        + gains[None, :] ** 2
        - 2.0 * np.outer(gains, gains) * np.cos(phases[:, None] - phases[None, :])
    )
    return float(np.sum(weights * terms))


def alpha_bar_temporal(profile: DirsProfile) -> float:
    """
    The variance factor of a DIRS that stays silent during RPT: ``sum_i P_i mu_i^2``.

    >>> alpha_bar_temporal(DirsProfile.from_case("c1"))
    0.91
    """
    return float(np.dot(np.asarray(profile.probs), np.asarray(profile.gains) ** 2))


def alpha_bar(profile: DirsProfile) -> float:
    """Dispatch on ``profile.mode``."""
    if profile.mode is JammerMode.TEMPORAL:
        return alpha_bar_temporal(profile)
    return alpha_bar_persistent(profile)


def aca_variances(
    config: ScenarioConfig, profile: DirsProfile, large_scale: LargeScale
) -> AcaStatistics:
    """
    Closed-form ACA statistics ``v_k = L_G L_{I,k} N_D alpha_bar``.

    ``N_D`` is taken from the profile, which is kept in step with the scenario by the
    harness.
    """
    value = alpha_bar(profile)
    source = (
        AcaSource.CLOSED_FORM_TEMPORAL
        if profile.mode is JammerMode.TEMPORAL
        else AcaSource.CLOSED_FORM_PERSISTENT
    )
    if profile.num_elements != config.num_elements:
        log.debug(
            "profile has %d elements, scenario %d; using the profile",
            profile.num_elements,
            config.num_elements,
        )
    variances = large_scale.ap_dirs * large_scale.dirs_lu * profile.num_elements * value
    return AcaStatistics(variances, source, alpha_bar=value)


class AcaMoments:
    """
    Empirical first and second moments of the ACA channel entries.

    Attributes
    ----------
    mean: numpy.ndarray
        ``(N_A, K)`` complex sample mean of ``H_DT - H_RPT``.
    variance: numpy.ndarray
        ``(N_A, K)`` sample variance ``E|x|^2 - |E x|^2``.
    closed_form: AcaStatistics
        The closed-form statistics of the same placement.
    samples: numpy.ndarray
        One entry of the first DT sub-slot of every trial, for normality testing.
    trials: int
        Number of frames sampled.
    pairs: int
        Number of (RPT, DT sub-slot) pairs behind ``mean`` and ``variance``.
    """

    __slots__ = ("mean", "variance", "closed_form", "samples", "trials", "pairs")

    def __init__(self, mean, variance, closed_form, samples, trials, pairs):
        self.mean = mean
        self.variance = variance
        self.closed_form = closed_form
        self.samples = samples
        self.trials = trials
        self.pairs = pairs

    def __repr__(self):
        return f"<AcaMoments trials={self.trials} pairs={self.pairs}>"

    @property
    def closed_variance(self) -> np.ndarray:
        """The closed-form variance broadcast to the ``(N_A, K)`` entry grid."""
        return np.broadcast_to(self.closed_form.variances[None, :], self.variance.shape)

    @property
    def ratio(self) -> np.ndarray:
        """Empirical over closed-form variance; ``nan`` where the closed form is zero."""
        closed = self.closed_variance
        ratio = np.full(self.variance.shape, np.nan)
        np.divide(self.variance, closed, out=ratio, where=closed > 0)
        return ratio


def _moment_chunk(config, profile, placement, large_scale, los, seed, trials, entry):
    k, n = entry
    first = np.zeros((config.num_antennas, config.num_users), dtype=complex)
    second = np.zeros((config.num_antennas, config.num_users))
    samples = np.empty(len(trials), dtype=complex)
    for i, trial in enumerate(trials):
        channels = sample_channels(
            config, placement, large_scale, trial_rng(seed, trial, Stream.CHANNEL), los=los
        )
        frame = sample_frame(profile, trial_rng(seed, trial, Stream.DIRS), config.frame_ratio)
        for slot, state in enumerate(frame.dt_states):
            delta = state.vector - frame.rpt_state.vector
            aca = ((channels.H_I * delta[None, :]) @ channels.G).conj().T
            first += aca
            second += np.abs(aca) ** 2
            if slot == 0:
                samples[i] = aca[n, k]
    return first, second, samples


def empirical_aca_moments(
    config: ScenarioConfig,
    profile: DirsProfile,
    trials: int,
    seed: Optional[int] = None,
    *,
    n_jobs: int = 1,
    chunk_size: int = 250,
    keep_entry: Tuple[int, int] = (0, 0),
    progress: bool = False,
) -> AcaMoments:
    """
    Monte-Carlo moments of ``H_ACA`` over whole coherence frames.

    One placement is dropped from ``config.seed``. Every trial then draws fresh
    channels and a fresh frame, and every (RPT, DT sub-slot) pair contributes one ACA
    sample.

    Parameters
    ----------
    config: ScenarioConfig
        The deployment; ``config.num_elements`` must match the profile.
    profile: DirsProfile
        The DIRS process and jammer mode.
    trials: int
        Number of frames to sample.
    seed: Optional[int]
        Base seed of the trial streams. Defaults to ``config.seed``.
    n_jobs: int
        joblib worker count.
    chunk_size: int
        Trials per joblib task.
    keep_entry: Tuple[int, int]
        ``(k, n)`` of the entry whose first-slot samples are returned.
    progress: bool
        Show a tqdm bar over the chunks.

    Raises
    ------
    ConfigError
        ``trials < 1``, an entry outside the grid or a profile of the wrong size.
    """
    if trials < 1:
        raise ConfigError("trials", "at least one trial is required")
    if profile.num_elements != config.num_elements:
        raise ConfigError("num_elements", "profile and scenario disagree on N_D")
    k, n = keep_entry
    if not (0 <= k < config.num_users and 0 <= n < config.num_antennas):
        raise ConfigError("keep_entry", f"({k}, {n}) is outside the channel grid")
    seed = config.seed if seed is None else seed

    placement = build_scenario(config)
    large_scale = large_scale_fading(placement)
    los = los_matrix(placement)
    chunks = [range(i, min(i + chunk_size, trials)) for i in range(0, trials, chunk_size)]
    if progress:
        chunks = tqdm(chunks, desc="ACA moments", unit="chunk")

    log.debug("sampling %d frames in %d chunks", trials, len(chunks))
    parts = Parallel(n_jobs=n_jobs)(
        delayed(_moment_chunk)(
            config, profile, placement, large_scale, los, seed, chunk, keep_entry
        )
        for chunk in chunks
    )
    pairs = trials * config.frame_ratio
    mean = ordered_sum([p[0] for p in parts]) / pairs
    second = ordered_sum([p[1] for p in parts]) / pairs
    samples = np.concatenate([p[2] for p in parts])
    variance = second - np.abs(mean) ** 2
    return AcaMoments(
        mean, variance, aca_variances(config, profile, large_scale), samples, trials, pairs
    )


class NormalityResult:
    """
    Kolmogorov–Smirnov fit of the standardized real and imaginary parts to N(0, 1).

    Attributes
    ----------
    statistic: Tuple[float, float]
        KS statistics of the real and imaginary parts.
    pvalue: Tuple[float, float]
        The matching p-values.
    """

    __slots__ = ("statistic", "pvalue")

    def __init__(self, statistic: Tuple[float, float], pvalue: Tuple[float, float]):
        self.statistic = statistic
        self.pvalue = pvalue

    def __repr__(self):
        return f"<NormalityResult statistic={self.statistic!r} pvalue={self.pvalue!r}>"

    def passed(self, level: float = 0.01) -> bool:
        return min(self.pvalue) >= level


def normality_test(samples) -> NormalityResult:
    """
    Test complex samples for circular Gaussianity component by component.

    Each component is standardized by its sample mean and standard deviation before
    being compared with the standard normal.
    """
    samples = np.asarray(samples, dtype=complex).ravel()
    if samples.size < 2:
        raise ConfigError("samples", "need at least two samples")
    results = []
    for part in (samples.real, samples.imag):
        std = part.std(ddof=1)
        if std == 0:
            raise ConfigError("samples", "component has zero spread")
        results.append(sps.kstest((part - part.mean()) / std, "norm"))
    return NormalityResult(
        (float(results[0].statistic), float(results[1].statistic)),
        (float(results[0].pvalue), float(results[1].pvalue)),
    )


def variance_scaling(
    config: ScenarioConfig,
    profile: DirsProfile,
    element_grid: Sequence[int] = (256, 512, 1024, 2048),
    trials: int = 1000,
    seed: Optional[int] = None,
    *,
    n_jobs: int = 1,
) -> Tuple[List[Tuple[int, float, float]], float]:
    """
    Empirical ACA variance across an ``N_D`` grid.

    Returns
    -------
    Tuple[List[Tuple[int, float, float]], float]
        Rows ``(N_D, mean empirical variance, mean closed-form variance)`` and the
        least-squares slope of log variance against log ``N_D``, which is 1 for a
        linear law.
    """
    rows = []
    for elements in element_grid:
        moments = empirical_aca_moments(
            config.replace(num_elements=elements),
            profile.with_elements(elements),
            trials,
            seed,
            n_jobs=n_jobs,
        )
        rows.append(
            (elements, float(moments.variance.mean()), float(moments.closed_variance.mean()))
        )
    x = np.log([r[0] for r in rows])
    y = np.log([r[1] for r in rows])
    slope = float(np.polyfit(x, y, 1)[0]) if len(rows) > 1 else float("nan")
    return rows, slope


def moment_report_rows(
    moments: AcaMoments,
) -> List[Tuple[int, int, float, float, float, float, float]]:
    """Rows ``(k, n, mean_re, mean_im, var_emp, var_closed, ratio)`` in ``(k, n)`` order."""
    closed = moments.closed_variance
    ratio = moments.ratio
    antennas, users = moments.variance.shape
    return [
        (
            k,
            n,
            float(moments.mean[n, k].real),
            float(moments.mean[n, k].imag),
            float(moments.variance[n, k]),
            float(closed[n, k]),
            float(ratio[n, k]),
        )
        for k in range(users)
        for n in range(antennas)
    ]
