__all__ = (
    "DiscoJamError",
    "ConfigError",
    "ShapeMismatchError",
    "SingularChannelError",
    "NotPositiveDefiniteError",
    "EstimatorRangeError",
    "GrammarError",
    "ExperimentError",
)


class DiscoJamError(Exception):
    """Base class for all module errors."""


class ConfigError(DiscoJamError, ValueError):
    """
    Raised when a configuration record or an argument is outside its valid range.

    Attributes
    ----------
    field: str
        The name of the offending field or argument.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ShapeMismatchError(DiscoJamError, ValueError):
    """
    Raised when array operands have inconsistent dimensions.

    Attributes
    ----------
    expected: tuple
        The shape the operation required.
    actual: tuple
        The shape that was passed.
    """

    def __init__(self, expected, actual, what: str = "operand"):
        self.expected = tuple(expected)
        self.actual = tuple(actual)
        super().__init__(f"{what} has shape {self.actual}, expected {self.expected}")


class SingularChannelError(DiscoJamError):
    """
    Raised when the trained channel is rank deficient and cannot be zero-forced.

    Attributes
    ----------
    rank: int
        The numerical rank of the channel matrix.
    users: int
        The number of columns (LUs) that had to be separated.
    """

    def __init__(self, rank: int, users: int):
        self.rank = rank
        self.users = users
        super().__init__(f"channel has rank {rank} but {users} LUs must be separated")


class NotPositiveDefiniteError(DiscoJamError):
    """Raised when the right-hand matrix of a generalized eigenproblem fails Cholesky."""


class EstimatorRangeError(DiscoJamError, IndexError):
    """
    Raised when a feedback index lies outside ``1 <= s <= m``.

    Attributes
    ----------
    index: int
        The requested feedback index.
    available: int
        The number of feedback sets in the log.
    """

    def __init__(self, index: int, available: int):
        self.index = index
        self.available = available
        super().__init__(f"feedback index {index} outside 1..{available}")


class GrammarError(DiscoJamError, ValueError):
    """
    Raised when a benchmark tag or sweep expression cannot be parsed.

    Attributes
    ----------
    text: str
        The text that failed to parse.
    """

    def __init__(self, text: str, reason: str):
        self.text = text
        super().__init__(f"could not parse {text!r}: {reason}")


class ExperimentError(DiscoJamError):
    """
    Raised when an unexpected exception occurs while running an experiment.

    Attributes
    ----------
    original: Exception
        The original exception that occurred during the run.
    partial: list
        The result rows that were finished before the failure.
    runner: ExperimentRunner
        The runner that was executing the experiment.
    """

    def __init__(self, error: Exception, partial, runner):
        self.original = error
        self.partial = partial
        self.runner = runner
        super().__init__(error)
