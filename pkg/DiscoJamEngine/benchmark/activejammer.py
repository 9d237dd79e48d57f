from ..adapter import ZeroAdapter
from ..interface import parameter_required_benchmark
from ..metrics import RateReport, active_jammer_penalty
from ..precode import zf_precoder
from ..utils import Stream, dbm_to_watts


class ActiveJammerBenchmark(parameter_required_benchmark(True)):
    """
    A conventional single-antenna jammer of power ``P_J`` (dBm) instead of the DIRS.
    The AP zero-forces the direct channel and each LU suffers the jammer's NLOS
    Rayleigh interference.

    **Usage:**  ``aj(<P_J dBm>)``

    **Aliases:**  ``ActiveJammer``

    **Parameter:**  jammer power in dBm

    **Examples:**  ::

        discojam run --config fig5.json --benchmarks "nojam,aj(-4)"
    """

    ACCEPTED_NAMES = ("aj", "activejammer")
    LABEL = "ActiveJammer"

    def process(self, ctx: "harness.TrialContext") -> RateReport:
        trial = ctx.trial
        penalty = active_jammer_penalty(
            ctx.spec.jammer_position,
            float(dbm_to_watts(ctx.tag.parameter)),
            trial.placement,
            trial.rng(Stream.JAMMER),
        )
        H = trial.H_direct
        W = zf_precoder(H, trial.powers).W
        stats = ZeroAdapter().get_value(ctx)
        sjnr = self.evaluate(ctx, H, W, stats, extra=penalty, H_dt=H[None])
        return RateReport(sjnr, self.label(ctx))
