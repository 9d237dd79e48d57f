from ..stats import AcaStatistics


class StatisticsAdapter:
    """
    The base class for sources of per-LU ACA variances.

    Implementations must subclass this to create adapters.
    """

    def __init__(self):
        pass

    def __repr__(self):
        return f"<{type(self).__qualname__} at {hex(id(self))}>"

    def get_value(self, ctx: "harness.TrialContext") -> AcaStatistics:
        """
        Produces the ACA statistics a precoder should assume for a given
        :class:`~DiscoJamEngine.harness.TrialContext`.

        Subclasses must implement this.

        Parameters
        ----------
        ctx: TrialContext
            The context object holding the trial's channels and DIRS frame.

        Returns
        -------
        AcaStatistics
            The per-LU variances.

        Raises
        ------
        NotImplementedError
            The subclass did not implement this required method.
        """
        raise NotImplementedError
