from ..adapter import ClosedFormAdapter, EstimatedAdapter
from ..exceptions import ConfigError
from ..estimate import refresh_precoder
from ..interface import Benchmark, parameter_required_benchmark
from ..metrics import RateReport
from ..precode import anti_jamming_precoder


class AntiJammingBenchmark(parameter_required_benchmark(False)):
    """
    The statistics-based anti-jamming precoder fed with the closed-form ACA variances
    of the jammer mode.

    **Usage:**  ``ajp``

    **Aliases:**  ``AJP_ClosedForm``

    **Parameter:**  None
    """

    ACCEPTED_NAMES = ("ajp", "ajp_closedform")
    LABEL = "AJP_ClosedForm"

    def process(self, ctx: "harness.TrialContext") -> RateReport:
        trial = ctx.trial
        stats = ClosedFormAdapter().get_value(ctx)
        precoder = anti_jamming_precoder(
            trial.H_rpt, stats, trial.noise, trial.config.tx_power, trial.config.num_users
        )
        return RateReport(self.evaluate(ctx, trial.H_rpt, precoder.W, stats), self.label(ctx))


class EstimatedAntiJammingBenchmark(Benchmark):
    """
    The anti-jamming precoder refreshed from variances estimated out of ``s`` rounds
    of received-power feedback. The rate is scored against the true statistics.

    **Usage:**  ``ajp_est([s])``

    **Aliases:**  ``AJP_Estimated``

    **Parameter:**  s, None. Without one the grid point's feedback count is used.

    **Examples:**  ::

        discojam run --config fig9.json --benchmarks "ajp_est(1),ajp_est(6)"
    """

    ACCEPTED_NAMES = ("ajp_est", "ajp_estimated")
    LABEL = "AJP_Estimated"

    def feedback_count(self, ctx: "harness.TrialContext") -> int:
        parameter = ctx.tag.parameter
        if parameter is None:
            return ctx.feedback_count
        if not float(parameter).is_integer():
            raise ConfigError("feedback_count", f"{parameter!r} is not a whole number")
        return int(parameter)

    def label(self, ctx: "harness.TrialContext") -> str:
        return f"{self.LABEL}({self.feedback_count(ctx)})"

    def process(self, ctx: "harness.TrialContext") -> RateReport:
        trial = ctx.trial
        estimates = EstimatedAdapter(self.feedback_count(ctx)).get_value(ctx)
        precoder = refresh_precoder(
            estimates, trial.H_rpt, trial.noise, trial.config.tx_power, trial.config.num_users
        )
        truth = ClosedFormAdapter().get_value(ctx)
        return RateReport(self.evaluate(ctx, trial.H_rpt, precoder.W, truth), self.label(ctx))
