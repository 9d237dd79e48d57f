from ..adapter import ClosedFormAdapter
from ..interface import parameter_required_benchmark
from ..metrics import RateReport
from ..precode import zf_precoder


class JammedZfBenchmark(parameter_required_benchmark(False)):
    """
    Zero-forcing on the channel trained during RPT while the DIRS jams. The precoder
    is blind to the aging, so the ACA leaks into every LU.

    **Usage:**  ``zf``

    **Aliases:**  ``Jammed_ZF``

    **Parameter:**  None
    """

    ACCEPTED_NAMES = ("zf", "jammed_zf")
    LABEL = "Jammed_ZF"

    def process(self, ctx: "harness.TrialContext") -> RateReport:
        trial = ctx.trial
        W = zf_precoder(trial.H_rpt, trial.powers).W
        stats = ClosedFormAdapter().get_value(ctx)
        return RateReport(self.evaluate(ctx, trial.H_rpt, W, stats), self.label(ctx))
