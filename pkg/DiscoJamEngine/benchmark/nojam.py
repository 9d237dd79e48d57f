from ..adapter import ZeroAdapter
from ..interface import parameter_required_benchmark
from ..metrics import RateReport
from ..precode import zf_precoder


class NoJammingBenchmark(parameter_required_benchmark(False)):
    """
    Zero-forcing on the direct AP–LU channel with no DIRS present. The reference
    every jammed benchmark is compared against.

    **Usage:**  ``nojam``

    **Aliases:**  ``NoJamming_ZF, wo_jamming``

    **Parameter:**  None

    **Examples:**  ::

        discojam run --config fig5.json --benchmarks nojam,zf
    """

    ACCEPTED_NAMES = ("nojam", "nojamming_zf", "wo_jamming")
    LABEL = "NoJamming_ZF"

    def process(self, ctx: "harness.TrialContext") -> RateReport:
        trial = ctx.trial
        H = trial.H_direct
        W = zf_precoder(H, trial.powers).W
        stats = ZeroAdapter().get_value(ctx)
        sjnr = self.evaluate(ctx, H, W, stats, H_dt=H[None])
        return RateReport(sjnr, self.label(ctx))
