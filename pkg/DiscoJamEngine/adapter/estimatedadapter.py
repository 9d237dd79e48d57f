from typing import Optional

from ..estimate import estimate_from_frame
from ..interface import StatisticsAdapter
from ..stats import AcaStatistics
from ..utils import Stream


class EstimatedAdapter(StatisticsAdapter):
    """
    Statistics estimated from the received powers the LUs feed back during the
    trial's coherence frame.

    Attributes
    ----------
    count: Optional[int]
        Feedback sets ``s`` to use. ``None`` takes the context's feedback count.
    """

    __slots__ = ("count",)

    def __init__(self, count: Optional[int] = None):
        self.count = count

    def __repr__(self):
        return f"<{type(self).__qualname__} count={self.count!r}>"

    def get_value(self, ctx: "harness.TrialContext") -> AcaStatistics:
        trial = ctx.trial
        s = ctx.feedback_count if self.count is None else self.count
        return estimate_from_frame(
            trial.channels,
            trial.frame,
            trial.config.tx_power,
            s,
            model=ctx.spec.feedback_model,
            noise_std=ctx.spec.feedback_noise,
            rng=trial.rng(Stream.FEEDBACK),
        )
