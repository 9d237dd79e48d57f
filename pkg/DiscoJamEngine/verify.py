import logging
import math
from typing import Callable, List, Optional

import numpy as np

from .dirs import DirsProfile, JammerMode
from .estimate import collect_feedback, estimate_characteristics
from .harness import ExperimentSpec, run_experiment, sample_trial
from .metrics import sjnr_statistical_all
from .precode import anti_jamming_precoder, zf_precoder
from .report import format_results
from .scenario import ScenarioConfig
from .stats import alpha_bar_persistent, alpha_bar_temporal, empirical_aca_moments, normality_test
from .utils import Stream, complex_normal, trial_rng

__all__ = (
    "CheckResult",
    "VerifySettings",
    "TABLE_VALUES",
    "check_alpha_table",
    "check_aca_moments",
    "check_optimality",
    "check_zf_contract",
    "check_power_trend",
    "check_estimator",
    "check_distance_trend",
    "check_elements_trend",
    "check_determinism",
    "CHECKS",
    "run_checks",
)

log = logging.getLogger(__name__)

# (case, mode) -> alpha_bar of the one-bit hardware.
TABLE_VALUES = {
    ("c1", JammerMode.PERSISTENT): 1.2059,
    ("c2", JammerMode.PERSISTENT): 1.6078,
    ("c1", JammerMode.TEMPORAL): 0.91,
    ("c2", JammerMode.TEMPORAL): 0.82,
}


class CheckResult:
    """
    The outcome of one acceptance check.

    Attributes
    ----------
    name: str
        Short name printed in the report.
    passed: bool
        Whether the property held.
    detail: str
        The measured numbers behind the verdict.
    """

    __slots__ = ("name", "passed", "detail")

    def __init__(self, name: str, passed: bool, detail: str):
        self.name = name
        self.passed = bool(passed)
        self.detail = detail

    def __repr__(self):
        return f"<CheckResult name={self.name!r} passed={self.passed}>"

    def __str__(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


class VerifySettings:
    """
    Trial counts and seed shared by the checks.

    Attributes
    ----------
    seed: int
        Base seed of every check.
    drops: int
        LU drops per grid point of the rate checks.
    realizations: int
        Realizations per drop of the rate checks.
    frames: int
        Monte-Carlo frames of the moment check.
    scenarios: int
        Random instances of the optimality and zero-forcing checks.
    n_jobs: int
        joblib worker count.
    """

    __slots__ = ("seed", "drops", "realizations", "frames", "scenarios", "n_jobs")

    def __init__(
        self,
        seed: int = 0,
        drops: int = 100,
        realizations: int = 20,
        frames: int = 10_000,
        scenarios: int = 100,
        n_jobs: int = 1,
    ):
        self.seed = seed
        self.drops = drops
        self.realizations = realizations
        self.frames = frames
        self.scenarios = scenarios
        self.n_jobs = n_jobs

    def __repr__(self):
        return (
            f"<VerifySettings seed={self.seed} drops={self.drops} "
            f"realizations={self.realizations} frames={self.frames}>"
        )

    def spec(self, **fields) -> ExperimentSpec:
        fields.setdefault("drops", self.drops)
        fields.setdefault("realizations", self.realizations)
        return ExperimentSpec(seed=self.seed, **fields)


def check_alpha_table(settings: VerifySettings) -> CheckResult:
    """Closed-form ``alpha_bar`` of both cases and modes within 1e-4 of the table."""
    errors = []
    for (case, mode), expected in TABLE_VALUES.items():
        profile = DirsProfile.from_case(case, mode)
        value = (
            alpha_bar_temporal(profile)
            if mode is JammerMode.TEMPORAL
            else alpha_bar_persistent(profile)
        )
        errors.append(abs(value - expected))
    worst = max(errors)
    return CheckResult("alpha_table", worst <= 1e-4, f"max error {worst:.2e}")


def check_aca_moments(settings: VerifySettings) -> CheckResult:
    """
    Empirical ACA moments for ``N_D`` in {256, 2048}: variance within 5% of the
    closed form entry by entry, means inside the 3 sigma zero band, and normal
    components at ``N_D = 2048``.
    """
    notes = []
    passed = True
    for elements in (256, 2048):
        config = ScenarioConfig(num_elements=elements, seed=settings.seed)
        profile = DirsProfile.from_case("c2", num_elements=elements)
        moments = empirical_aca_moments(
            config, profile, settings.frames, settings.seed, n_jobs=settings.n_jobs
        )
        deviation = float(np.max(np.abs(moments.ratio - 1.0)))
        sigma = np.sqrt(moments.variance / moments.trials)
        outside = float(np.mean(np.abs(moments.mean) > 3.0 * sigma))
        passed &= deviation <= 0.05 and outside <= 0.01
        notes.append(f"N_D={elements} var dev {deviation:.3f} mean outside {outside:.3f}")
        if elements == 2048:
            normal = normality_test(moments.samples)
            passed &= normal.passed(0.01)
            notes.append(f"KS p={min(normal.pvalue):.3f}")
    return CheckResult("aca_moments", passed, ", ".join(notes))


def _column_sjnr(H, columns, k, variances, noise):
    # SJNR of LU k for each row of columns used as w_k.
    gains = np.abs(columns @ H.conj()) ** 2
    norms = np.sum(np.abs(columns) ** 2, axis=1)
    own = gains[:, k] + variances[k] * norms
    others = gains.sum(axis=1) - gains[:, k] + (variances.sum() - variances[k]) * norms
    return own / (others + noise)


def check_optimality(settings: VerifySettings) -> CheckResult:
    """
    The anti-jamming column attains ``lambda_max`` and no random column of the same
    power beats it.
    """
    worst_gap = 0.0
    worst_excess = -math.inf
    candidates = 1000
    for scenario in range(settings.scenarios):
        rng = trial_rng(settings.seed, scenario, 0, Stream.CHANNEL)
        antennas = int(rng.integers(2, 9))
        users = int(rng.integers(1, antennas + 1))
        H = complex_normal(rng, (antennas, users))
        variances = rng.exponential(0.5, users)
        noise = float(rng.uniform(0.1, 2.0))
        P0 = float(rng.uniform(0.5, 5.0))
        precoder = anti_jamming_precoder(H, variances, noise, P0)
        eta = sjnr_statistical_all(H, precoder.W, variances, noise)
        worst_gap = max(
            worst_gap, float(np.max(np.abs(eta - precoder.eigenvalues) / precoder.eigenvalues))
        )
        for k in range(users):
            trials = complex_normal(rng, (candidates, antennas))
            trials *= np.sqrt(precoder.powers[k]) / np.linalg.norm(trials, axis=1)[:, None]
            rival = _column_sjnr(H, trials, k, variances, noise)
            worst_excess = max(worst_excess, float((rival.max() - eta[k]) / eta[k]))
    passed = worst_gap <= 1e-8 and worst_excess <= 1e-9
    return CheckResult(
        "optimality", passed, f"eigenvalue gap {worst_gap:.2e}, best rival {worst_excess:.2e}"
    )


def check_zf_contract(settings: VerifySettings) -> CheckResult:
    """Zero-forcing nulls leakage and meets ``||w_k|| = sqrt(P0/K)`` on 16x12 channels."""
    worst_leak = 0.0
    worst_norm = 0.0
    P0 = 12.0
    for scenario in range(settings.scenarios):
        rng = trial_rng(settings.seed, scenario, 1, Stream.CHANNEL)
        H = complex_normal(rng, (16, 12))
        precoder = zf_precoder(H, P0 / 12)
        gains = np.abs(H.conj().T @ precoder.W)
        diagonal = np.diag(gains)
        leak = (gains - np.diag(diagonal)) / diagonal[None, :]
        worst_leak = max(worst_leak, float(leak.max()))
        norms = np.linalg.norm(precoder.W, axis=0)
        worst_norm = max(worst_norm, float(np.max(np.abs(norms - math.sqrt(P0 / 12)))))
    passed = worst_leak < 1e-10 and worst_norm < 1e-10
    return CheckResult("zf_contract", passed, f"leakage {worst_leak:.1e}, norm {worst_norm:.1e}")


def check_power_trend(settings: VerifySettings) -> CheckResult:
    """
    At -14 dBm per LU the anti-jamming rate is at least 1.5x the unjammed rate; at
    -2 dBm zero-forcing loses at least 25% and the anti-jamming precoder recovers
    at least half of the loss.
    """
    spec = settings.spec(benchmarks=("nojam", "zf", "ajp"), sweep="power=-14,-2")
    result = run_experiment(spec, n_jobs=settings.n_jobs)
    nojam_low = result.rate("NoJamming_ZF", -14.0)
    ajp_low = result.rate("AJP_ClosedForm", -14.0)
    nojam = result.rate("NoJamming_ZF", -2.0)
    zf = result.rate("Jammed_ZF", -2.0)
    ajp = result.rate("AJP_ClosedForm", -2.0)
    ratio = ajp_low / nojam_low
    loss = 1.0 - zf / nojam
    recovered = (ajp - zf) / (nojam - zf) if nojam > zf else 0.0
    passed = ratio >= 1.5 and loss >= 0.25 and recovered >= 0.5
    return CheckResult(
        "power_trend",
        passed,
        f"AJP/NoJam at -14 dBm {ratio:.2f}, ZF loss {loss:.2f}, recovered {recovered:.2f}",
    )


def check_estimator(settings: VerifySettings) -> CheckResult:
    """
    One feedback set costs under 2% of rate against six, and the six-set estimate
    averaged over 100 frames lies within 10% of the closed form.
    """
    spec = settings.spec(benchmarks=("ajp_est(1)", "ajp_est(6)"))
    result = run_experiment(spec, n_jobs=settings.n_jobs)
    one, six = result.rate("AJP_Estimated(1)"), result.rate("AJP_Estimated(6)")
    gap = abs(one - six) / six

    config = spec.scenario
    profile = spec.resolve_profile(config)
    estimates = []
    closed = None
    for frame in range(100):
        trial = sample_trial(config, profile, settings.seed, 0, frame)
        closed = trial.closed_form.variances
        feedback, H_rpt = collect_feedback(
            trial.channels, trial.frame, config.tx_power, rng=trial.rng(Stream.FEEDBACK)
        )
        estimates.append(estimate_characteristics(feedback, H_rpt, config.tx_power, len(feedback)))
    error = float(np.max(np.abs(np.mean(estimates, axis=0) / closed - 1.0)))
    passed = gap < 0.02 and error <= 0.10
    return CheckResult(
        "estimator", passed, f"s=1 vs s=6 gap {gap:.4f}, estimate error {error:.3f}"
    )


def check_distance_trend(settings: VerifySettings) -> CheckResult:
    """For ``d_AD >= 3`` the anti-jamming rate stays within 5% of the unjammed rate."""
    spec = settings.spec(benchmarks=("nojam", "ajp"), sweep="d_ad=3:5:1")
    result = run_experiment(spec, n_jobs=settings.n_jobs)
    ratios = [
        result.rate("AJP_ClosedForm", d) / result.rate("NoJamming_ZF", d) for d in spec.grid
    ]
    worst = min(ratios)
    return CheckResult("distance_trend", worst >= 0.95, f"worst AJP/NoJam {worst:.3f}")


def check_elements_trend(settings: VerifySettings) -> CheckResult:
    """Jammed zero-forcing loses rate as the DIRS grows, on paired drops."""
    spec = settings.spec(benchmarks=("zf",), sweep="N_D=256,512,1024,2048")
    result = run_experiment(spec, n_jobs=settings.n_jobs)
    _, rates, _ = result.series("Jammed_ZF")
    steps = np.diff(rates)
    return CheckResult(
        "elements_trend",
        bool(np.all(steps <= 0.0)),
        ", ".join(f"{r:.3f}" for r in rates),
    )


def check_determinism(settings: VerifySettings) -> CheckResult:
    """The same seed gives byte-identical result CSVs."""
    spec = ExperimentSpec(
        seed=settings.seed,
        drops=2,
        realizations=2,
        benchmarks=("nojam", "zf", "ajp", "ajp_est(1)", "aj(-4)"),
    )
    first = format_results(run_experiment(spec, n_jobs=settings.n_jobs))
    second = format_results(run_experiment(spec, n_jobs=settings.n_jobs))
    return CheckResult("determinism", first == second, f"{len(first)} bytes")


CHECKS = (
    check_alpha_table,
    check_aca_moments,
    check_optimality,
    check_zf_contract,
    check_power_trend,
    check_estimator,
    check_distance_trend,
    check_elements_trend,
    check_determinism,
)


def run_checks(
    settings: Optional[VerifySettings] = None,
    checks: Optional[List[Callable[[VerifySettings], CheckResult]]] = None,
) -> List[CheckResult]:
    """Run the acceptance checks in order and log each verdict."""
    settings = VerifySettings() if settings is None else settings
    results = []
    for check in CHECKS if checks is None else checks:
        log.info("running %s", check.__name__)
        result = check(settings)
        log.info("%s", result)
        results.append(result)
    return results
