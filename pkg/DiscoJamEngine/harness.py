import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from .benchmark import DEFAULT_BENCHMARKS
from .channel import ChannelSet, los_matrix, sample_channels
from .dirs import (
    CoherenceFrame,
    DirsProfile,
    JammerMode,
    combined_channel,
    dt_channels,
    sample_frame,
)
from .estimate import FeedbackModel, collect_feedback
from .exceptions import ConfigError, DiscoJamError, ExperimentError, GrammarError
from .grammar import BenchmarkTag, Sweep, parse_benchmarks, parse_sweep
from .interface import Benchmark
from .metrics import ACTIVE_JAMMER_POSITION
from .precode import uniform_powers
from .scenario import LargeScale, Placement, ScenarioConfig, build_scenario, large_scale_fading
from .stats import AcaStatistics, aca_variances
from .utils import Stream, dbm_to_watts, trial_rng

__all__ = (
    "ExperimentSpec",
    "GridPoint",
    "Trial",
    "TrialContext",
    "ResultRow",
    "ExperimentResult",
    "ExperimentRunner",
    "run_experiment",
    "sample_trial",
    "feedback_trace",
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExperimentSpec:
    """
    Everything that determines the output of an experiment.

    Attributes
    ----------
    scenario: ScenarioConfig
        The base deployment; the sweep variable overrides one of its fields.
    benchmarks: Tuple[str, ...]
        Benchmark tags, e.g. ``("nojam", "zf", "ajp", "ajp_est(1)", "aj(-4)")``.
    mode: JammerMode
        The DIRS jammer mode.
    case: str
        Name of the DIRS profile preset, or a label for ``profile``.
    profile: Optional[DirsProfile]
        A custom DIRS profile; ``None`` builds the ``case`` preset.
    sweep: Optional[str]
        ``NAME=start:stop:step`` or ``NAME=v1,v2``. ``None`` runs the scenario's own
        power per LU only.
    drops: int
        LU placements per grid point.
    realizations: int
        Channel and DIRS realizations per drop.
    seed: Optional[int]
        Base seed; ``None`` uses ``scenario.seed``.
    realized: bool
        Score rates with the realized SJNR over the DT sub-slots instead of the
        statistical SJNR.
    feedback_model: FeedbackModel
        What the LUs feed back to the estimator.
    feedback_count: Optional[int]
        Default ``s`` for estimated benchmarks; ``None`` means ``C``.
    feedback_noise: float
        Standard deviation of the feedback measurement noise in watts.
    jammer_position: Tuple[float, float, float]
        Location of the active jammer benchmark.
    """

    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    benchmarks: Tuple[str, ...] = ("nojam", "zf", "ajp")
    mode: JammerMode = JammerMode.PERSISTENT
    case: str = "c2"
    profile: Optional[DirsProfile] = None
    sweep: Optional[str] = None
    drops: int = 100
    realizations: int = 20
    seed: Optional[int] = None
    realized: bool = False
    feedback_model: FeedbackModel = FeedbackModel.DECOMPOSED
    feedback_count: Optional[int] = None
    feedback_noise: float = 0.0
    jammer_position: Tuple[float, float, float] = ACTIVE_JAMMER_POSITION

    def __post_init__(self):
        benchmarks = self.benchmarks
        if isinstance(benchmarks, str):
            benchmarks = tuple(str(t) for t in parse_benchmarks(benchmarks))
        object.__setattr__(self, "benchmarks", tuple(benchmarks))
        object.__setattr__(self, "mode", JammerMode.parse(self.mode))
        object.__setattr__(self, "feedback_model", FeedbackModel.parse(self.feedback_model))
        object.__setattr__(self, "jammer_position", tuple(self.jammer_position))
        self.validate()

    def validate(self):
        """
        Raises
        ------
        ConfigError
            A count or option is out of range.
        GrammarError
            A benchmark tag or the sweep does not parse.
        """
        if self.drops < 1:
            raise ConfigError("drops", "at least one drop is required")
        if self.realizations < 1:
            raise ConfigError("realizations", "at least one realization is required")
        if self.feedback_noise < 0:
            raise ConfigError("feedback_noise", "must be non-negative")
        if self.feedback_count is not None and not (
            1 <= self.feedback_count <= self.scenario.frame_ratio
        ):
            raise ConfigError("feedback_count", f"must lie in 1..{self.scenario.frame_ratio}")
        if len(self.jammer_position) != 3:
            raise ConfigError("jammer_position", "must be a 3-D point")
        if not self.tags:
            raise ConfigError("benchmarks", "at least one benchmark is required")
        if not len(self.grid):
            raise ConfigError("sweep", "the grid is empty")
        self.resolve_profile(self.scenario)

    def replace(self, **changes) -> "ExperimentSpec":
        return replace(self, **changes)

    @property
    def tags(self) -> List[BenchmarkTag]:
        return parse_benchmarks(",".join(self.benchmarks))

    @property
    def grid(self) -> Sweep:
        if self.sweep is None:
            return Sweep("tx_power_per_lu", [round(self.scenario.power_per_lu_dbm, 10)])
        return parse_sweep(self.sweep)

    @property
    def base_seed(self) -> int:
        return self.scenario.seed if self.seed is None else self.seed

    @property
    def trials(self) -> int:
        return self.drops * self.realizations

    def resolve_profile(self, config: ScenarioConfig) -> DirsProfile:
        """The DIRS profile for ``config``, sized to its element count."""
        if self.profile is None:
            return DirsProfile.from_case(self.case, self.mode, config.num_elements)
        return self.profile.with_mode(self.mode).with_elements(config.num_elements)


def _whole(name: str, value: float) -> int:
    if not float(value).is_integer():
        raise ConfigError(name, f"{value!r} is not a whole number")
    return int(value)


class GridPoint:
    """
    One value of the sweep variable.

    Attributes
    ----------
    index: int
        Position in the grid.
    name: str
        The sweep variable.
    value: float
        Its value at this point.
    """

    __slots__ = ("index", "name", "value")

    def __init__(self, index: int, name: str, value: float):
        self.index = index
        self.name = name
        self.value = value

    def __repr__(self):
        return f"<GridPoint {self.name}={self.value!r}>"

    def apply(self, spec: ExperimentSpec) -> Tuple[ScenarioConfig, DirsProfile, int]:
        """
        Derive the scenario, profile and feedback count of this point.

        Changing ``K`` keeps the power per LU fixed.
        """
        config = spec.scenario
        feedback_count = spec.feedback_count or config.frame_ratio
        if self.name == "tx_power_per_lu":
            config = config.replace(tx_power=config.num_users * float(dbm_to_watts(self.value)))
        elif self.name == "num_elements":
            config = config.replace(num_elements=_whole(self.name, self.value))
        elif self.name == "num_users":
            users = _whole(self.name, self.value)
            config = config.replace(num_users=users, tx_power=users * config.power_per_lu)
        elif self.name == "ap_dirs_distance":
            config = config.replace(ap_dirs_distance=float(self.value))
        elif self.name == "feedback_count":
            feedback_count = _whole(self.name, self.value)
            if not 1 <= feedback_count <= config.frame_ratio:
                raise ConfigError("feedback_count", f"must lie in 1..{config.frame_ratio}")
        else:
            raise ConfigError("sweep", f"unknown sweep variable {self.name!r}")
        return config, spec.resolve_profile(config), feedback_count


class Trial:
    """
    One drop and one channel/DIRS realization, with the derived channels cached.

    Attributes
    ----------
    config: ScenarioConfig
        The scenario of the grid point.
    profile: DirsProfile
        The DIRS profile of the grid point.
    placement: Placement
        The drop.
    large_scale: LargeScale
        Large-scale gains of the drop.
    closed_form: AcaStatistics
        Closed-form ACA statistics of the drop.
    channels: ChannelSet
        The small-scale realization.
    frame: CoherenceFrame
        The DIRS states of the frame.
    keys: Tuple[int, int, int]
        ``(seed, drop, realization)``.
    """

    __slots__ = (
        "config",
        "profile",
        "placement",
        "large_scale",
        "closed_form",
        "channels",
        "frame",
        "keys",
        "_cache",
    )

    def __init__(
        self,
        config: ScenarioConfig,
        profile: DirsProfile,
        placement: Placement,
        large_scale: LargeScale,
        closed_form: AcaStatistics,
        channels: ChannelSet,
        frame: CoherenceFrame,
        keys: Tuple[int, int, int],
    ):
        self.config = config
        self.profile = profile
        self.placement = placement
        self.large_scale = large_scale
        self.closed_form = closed_form
        self.channels = channels
        self.frame = frame
        self.keys = keys
        self._cache: Dict[str, np.ndarray] = {}

    def __repr__(self):
        seed, drop, realization = self.keys
        return f"<Trial seed={seed} drop={drop} realization={realization}>"

    def rng(self, stream: Stream) -> np.random.Generator:
        """A fresh generator for ``stream``, private to this trial."""
        seed, drop, realization = self.keys
        return trial_rng(seed, drop, realization, stream)

    @property
    def noise(self) -> float:
        return self.config.noise

    @property
    def powers(self) -> np.ndarray:
        return uniform_powers(self.config.tx_power, self.config.num_users)

    @property
    def H_rpt(self) -> np.ndarray:
        """``(N_A, K)`` channel trained during RPT."""
        if "rpt" not in self._cache:
            self._cache["rpt"] = combined_channel(self.channels, self.frame.rpt_state)
        return self._cache["rpt"]

    @property
    def H_dt(self) -> np.ndarray:
        """``(C, N_A, K)`` channels of the DT sub-slots."""
        if "dt" not in self._cache:
            self._cache["dt"] = dt_channels(self.channels, self.frame)
        return self._cache["dt"]

    @property
    def H_direct(self) -> np.ndarray:
        """``(N_A, K)`` direct channel ``H_d^H`` seen without a DIRS."""
        return self.channels.H_d.conj().T


class TrialContext:
    """
    An object containing the benchmark tag and the trial being scored.
    This class is passed to adapters and benchmarks during processing.

    Attributes
    ----------
    tag: BenchmarkTag
        The parsed benchmark reference.
    point: GridPoint
        The grid point being run.
    trial: Optional[Trial]
        The realization; ``None`` while tags are being resolved.
    spec: ExperimentSpec
        The experiment.
    feedback_count: int
        Default ``s`` for estimated benchmarks at this point.
    """

    __slots__ = ("tag", "point", "trial", "spec", "feedback_count")

    def __init__(
        self,
        tag: BenchmarkTag,
        point: GridPoint,
        trial: Optional[Trial],
        spec: ExperimentSpec,
        feedback_count: int,
    ):
        self.tag = tag
        self.point = point
        self.trial = trial
        self.spec = spec
        self.feedback_count = feedback_count

    def __repr__(self):
        return f"<TrialContext tag={self.tag!r} point={self.point!r}>"

    @property
    def realized(self) -> bool:
        return self.spec.realized


class ResultRow:
    """
    The ergodic rate of one benchmark at one grid point.

    Attributes
    ----------
    sweep: float
        Value of the sweep variable.
    benchmark: str
        Benchmark label.
    mode: str
        Jammer mode.
    case: str
        DIRS profile case.
    rate_per_lu: float
        Mean rate per LU in bit/s/Hz.
    stderr: float
        Standard error of that mean.
    trials: int
        Number of trials averaged.
    """

    __slots__ = ("sweep", "benchmark", "mode", "case", "rate_per_lu", "stderr", "trials")

    def __init__(self, sweep, benchmark, mode, case, rate_per_lu, stderr, trials):
        self.sweep = sweep
        self.benchmark = benchmark
        self.mode = mode
        self.case = case
        self.rate_per_lu = rate_per_lu
        self.stderr = stderr
        self.trials = trials

    def __repr__(self):
        return (
            f"<ResultRow sweep={self.sweep!r} benchmark={self.benchmark!r} "
            f"rate_per_lu={self.rate_per_lu!r}>"
        )

    def as_tuple(self) -> tuple:
        return (
            self.sweep,
            self.benchmark,
            self.mode,
            self.case,
            self.rate_per_lu,
            self.stderr,
            self.trials,
        )


class ExperimentResult:
    """
    The rows of a finished experiment, in grid order and then benchmark order.

    Attributes
    ----------
    spec: ExperimentSpec
        The experiment that was run.
    rows: List[ResultRow]
        One row per grid point and benchmark.
    """

    __slots__ = ("spec", "rows")

    def __init__(self, spec: ExperimentSpec, rows: List[ResultRow]):
        self.spec = spec
        self.rows = rows

    def __repr__(self):
        return f"<ExperimentResult rows={len(self.rows)}>"

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    @property
    def sweep_name(self) -> str:
        return self.spec.grid.name

    @property
    def benchmarks(self) -> List[str]:
        seen = []
        for row in self.rows:
            if row.benchmark not in seen:
                seen.append(row.benchmark)
        return seen

    def series(self, benchmark: str) -> Tuple[List[float], List[float], List[float]]:
        """Sweep values, rates and standard errors of one benchmark."""
        rows = [r for r in self.rows if r.benchmark == benchmark]
        return (
            [r.sweep for r in rows],
            [r.rate_per_lu for r in rows],
            [r.stderr for r in rows],
        )

    def rate(self, benchmark: str, sweep: Optional[float] = None) -> float:
        """
        The rate of ``benchmark`` at ``sweep`` (the first grid point by default).

        Raises
        ------
        KeyError
            No such row.
        """
        for row in self.rows:
            if row.benchmark == benchmark and (sweep is None or np.isclose(row.sweep, sweep)):
                return row.rate_per_lu
        raise KeyError((benchmark, sweep))


def sample_trial(
    config: ScenarioConfig,
    profile: DirsProfile,
    seed: int,
    drop: int,
    realization: int,
    *,
    placement: Optional[Placement] = None,
    los: Optional[np.ndarray] = None,
) -> Trial:
    """
    Draw one trial. Every draw comes from a stream keyed by
    ``(seed, drop, realization, stream)``, so the same keys give the same trial at
    every grid point that shares the geometry.
    """
    if placement is None:
        placement = build_scenario(config, trial_rng(seed, drop, 0, Stream.PLACEMENT))
    large_scale = large_scale_fading(placement)
    channels = sample_channels(
        config,
        placement,
        large_scale,
        trial_rng(seed, drop, realization, Stream.CHANNEL),
        los=los,
    )
    frame = sample_frame(
        profile, trial_rng(seed, drop, realization, Stream.DIRS), config.frame_ratio
    )
    closed_form = aca_variances(config, profile, large_scale)
    return Trial(
        config,
        profile,
        placement,
        large_scale,
        closed_form,
        channels,
        frame,
        (seed, drop, realization),
    )


def _run_drop(
    spec: ExperimentSpec,
    point: GridPoint,
    setup: Tuple[ScenarioConfig, DirsProfile, int],
    resolved: Sequence[Tuple[BenchmarkTag, Benchmark]],
    drop: int,
) -> np.ndarray:
    config, profile, feedback_count = setup
    seed = spec.base_seed
    placement = build_scenario(config, trial_rng(seed, drop, 0, Stream.PLACEMENT))
    los = los_matrix(placement)
    rates = np.empty((len(resolved), spec.realizations))
    for r in range(spec.realizations):
        trial = sample_trial(config, profile, seed, drop, r, placement=placement, los=los)
        for i, (tag, benchmark) in enumerate(resolved):
            ctx = TrialContext(tag, point, trial, spec, feedback_count)
            rates[i, r] = benchmark.process(ctx).rate_per_lu
    return rates


class ExperimentRunner:
    """
    Runs experiments: fans the drops of each grid point out to joblib workers and
    folds the per-trial rates into result rows.

    Attributes
    ----------
    benchmarks: List[Benchmark]
        The benchmarks tags are resolved against.
    n_jobs: int
        joblib worker count.
    progress: bool
        Show a tqdm bar per grid point.
    """

    __slots__ = ("benchmarks", "n_jobs", "progress")

    def __init__(
        self,
        benchmarks: Optional[Iterable[Benchmark]] = None,
        *,
        n_jobs: int = 1,
        progress: bool = False,
    ):
        if benchmarks is None:
            benchmarks = [cls() for cls in DEFAULT_BENCHMARKS]
        self.benchmarks: List[Benchmark] = list(benchmarks)
        self.n_jobs = n_jobs
        self.progress = progress

    def __repr__(self):
        return f"<{type(self).__name__} benchmarks={self.benchmarks!r} n_jobs={self.n_jobs}>"

    def _get_acceptors(self, ctx: TrialContext) -> List[Benchmark]:
        return [b for b in self.benchmarks if b.will_accept(ctx)]

    def resolve(self, ctx: TrialContext) -> Benchmark:
        """
        Raises
        ------
        GrammarError
            No benchmark accepts the tag.
        """
        acceptors = self._get_acceptors(ctx)
        if not acceptors:
            raise GrammarError(ctx.tag.text, "no benchmark accepts this tag")
        return acceptors[0]

    def run_point(self, spec: ExperimentSpec, point: GridPoint) -> List[ResultRow]:
        """Score every benchmark of ``spec`` at one grid point."""
        setup = point.apply(spec)
        feedback_count = setup[2]
        resolved = []
        labels = []
        for tag in spec.tags:
            ctx = TrialContext(tag, point, None, spec, feedback_count)
            benchmark = self.resolve(ctx)
            resolved.append((tag, benchmark))
            labels.append(benchmark.label(ctx))

        log.info("grid point %s=%g: %d drops", point.name, point.value, spec.drops)
        drops = tqdm(
            range(spec.drops),
            desc=f"{point.name}={point.value:g}",
            unit="drop",
            disable=not self.progress,
        )
        parts = Parallel(n_jobs=self.n_jobs)(
            delayed(_run_drop)(spec, point, setup, resolved, drop) for drop in drops
        )
        rates = np.concatenate(parts, axis=1)

        rows = []
        for i, label in enumerate(labels):
            values = rates[i]
            mean = math.fsum(values) / values.size
            stderr = float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
            rows.append(
                ResultRow(
                    point.value,
                    label,
                    spec.mode.value,
                    spec.case,
                    mean,
                    stderr,
                    int(values.size),
                )
            )
            log.debug("%s: %.4f bit/s/Hz", label, rows[-1].rate_per_lu)
        return rows

    def run(self, spec: ExperimentSpec) -> ExperimentResult:
        """
        Run every grid point of ``spec``.

        Raises
        ------
        DiscoJamError
            Configuration and grammar errors pass through unchanged.
        ExperimentError
            Any other exception, with the rows finished so far.
        """
        grid = spec.grid
        rows: List[ResultRow] = []
        try:
            for index, value in enumerate(grid):
                rows.extend(self.run_point(spec, GridPoint(index, grid.name, value)))
        except DiscoJamError:
            raise
        except Exception as error:
            raise ExperimentError(error, rows, self) from error
        log.info("finished %d rows", len(rows))
        return ExperimentResult(spec, rows)


def run_experiment(
    spec: ExperimentSpec, *, n_jobs: int = 1, progress: bool = False
) -> ExperimentResult:
    """Run ``spec`` with the default benchmarks."""
    return ExperimentRunner(n_jobs=n_jobs, progress=progress).run(spec)


def feedback_trace(
    spec: ExperimentSpec, frames: int = 1
) -> List[Tuple[int, int, int, float, float]]:
    """
    Feedback-trace rows ``(frame, s, k, p_k^s, estimate)`` of the first drop at the
    first grid point, one frame per realization.
    """
    grid = spec.grid
    config, profile, _ = GridPoint(0, grid.name, grid.values[0]).apply(spec)
    rows = []
    for frame in range(frames):
        trial = sample_trial(config, profile, spec.base_seed, 0, frame)
        feedback, H_rpt = collect_feedback(
            trial.channels,
            trial.frame,
            config.tx_power,
            model=spec.feedback_model,
            noise_std=spec.feedback_noise,
            rng=trial.rng(Stream.FEEDBACK),
        )
        rows.extend(feedback.trace_rows(frame, H_rpt, config.tx_power))
    return rows
