from functools import lru_cache
from typing import Optional

import numpy as np

from ..metrics import RateReport, sjnr_realized_all, sjnr_statistical_all

__all__ = ("Benchmark", "parameter_required_benchmark")


class Benchmark:
    """
    The base class for rate benchmarks.

    Implementations must subclass this to create new benchmarks.

    Attributes
    ----------
    ACCEPTED_NAMES: Tuple[str, ...]
        The lower-cased tag names this benchmark answers to. This ideally should be set
        as a class attribute.
    LABEL: str
        The name written to result rows.
    """

    ACCEPTED_NAMES = ()
    LABEL = ""

    def __init__(self):
        pass

    def __repr__(self):
        return f"<{type(self).__qualname__} at {hex(id(self))}>"

    @classmethod
    def will_accept(cls, ctx: "harness.TrialContext") -> bool:
        """
        Describes whether the benchmark handles the tag of the given
        :class:`~DiscoJamEngine.harness.TrialContext`.

        Parameters
        ----------
        ctx: TrialContext
            The context object containing the parsed
            :class:`~DiscoJamEngine.grammar.BenchmarkTag`.

        Returns
        -------
        bool
            Whether the benchmark should process this context.
        """
        return ctx.tag.name in cls.ACCEPTED_NAMES

    def label(self, ctx: "harness.TrialContext") -> str:
        if ctx.tag.parameter is None:
            return self.LABEL
        return ctx.tag.canonical.replace(ctx.tag.name, self.LABEL, 1)

    def process(self, ctx: "harness.TrialContext") -> RateReport:
        """
        Computes the benchmark's precoder and per-LU SJNR for one trial.

        Subclasses must implement this.

        Parameters
        ----------
        ctx: TrialContext
            The context object holding the trial's channels and DIRS frame.

        Returns
        -------
        RateReport
            The per-LU SJNR of the trial.

        Raises
        ------
        NotImplementedError
            The subclass did not implement this required method.
        """
        raise NotImplementedError

    @staticmethod
    def evaluate(
        ctx: "harness.TrialContext",
        H_rpt: np.ndarray,
        W: np.ndarray,
        stats=None,
        *,
        extra=None,
        H_dt: Optional[np.ndarray] = None,
    ) -> np.ndarray:
        """
        Per-LU SJNR of precoder ``W`` under the metric the experiment selected.

        The statistical metric uses ``H_rpt`` and ``stats``; the realized metric averages
        over ``H_dt``, the trial's DT sub-slot channels unless given.
        """
        trial = ctx.trial
        if ctx.realized:
            H_dt = trial.H_dt if H_dt is None else H_dt
            return sjnr_realized_all(H_dt, W, trial.noise, extra)
        return sjnr_statistical_all(H_rpt, W, stats, trial.noise, extra)


@lru_cache(maxsize=None)
def parameter_required_benchmark(required: bool = True) -> Benchmark:
    """
    Get a Benchmark subclass that only accepts tags with (or without) a parameter.

    Parameters
    ----------
    required: bool
        ``True`` accepts only tags like ``aj(-4)``; ``False`` accepts only bare tags.
    """

    class RequireMeta(type):
        def __repr__(self):
            return f"ParameterRequiredBenchmark(required={required!r})"

    class ParameterRequiredBenchmark(Benchmark, metaclass=RequireMeta):
        @classmethod
        def will_accept(cls, ctx: "harness.TrialContext") -> bool:
            if (ctx.tag.parameter is not None) != required:
                return False
            return super().will_accept(ctx)

    return ParameterRequiredBenchmark
