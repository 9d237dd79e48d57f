from ..interface import StatisticsAdapter
from ..stats import AcaStatistics


class ZeroAdapter(StatisticsAdapter):
    """Statistics of an unjammed link: every ``v_k`` is zero."""

    def get_value(self, ctx: "harness.TrialContext") -> AcaStatistics:
        return AcaStatistics.zero(ctx.trial.config.num_users)
