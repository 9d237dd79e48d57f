from ..interface import StatisticsAdapter
from ..stats import AcaStatistics


class ClosedFormAdapter(StatisticsAdapter):
    """
    The closed-form statistics ``L_G L_{I,k} N_D alpha_bar`` of the trial's drop, with
    ``alpha_bar`` chosen by the jammer mode.
    """

    def get_value(self, ctx: "harness.TrialContext") -> AcaStatistics:
        return ctx.trial.closed_form
