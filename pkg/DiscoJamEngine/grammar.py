import math
from typing import List, Optional, Tuple

from pyparsing import (
    CaselessLiteral,
    Combine,
    Group,
    Literal,
    ParseException,
    StringEnd,
    Word,
    alphanums,
    alphas,
    delimitedList,
    nums,
    oneOf,
)
from pyparsing import Optional as Maybe

from .exceptions import GrammarError

__all__ = (
    "BenchmarkTag",
    "Sweep",
    "SWEEP_ALIASES",
    "SWEEP_VARIABLES",
    "parse_benchmarks",
    "parse_sweep",
    "parse_trials",
)

SWEEP_VARIABLES = (
    "tx_power_per_lu",
    "feedback_count",
    "num_elements",
    "num_users",
    "ap_dirs_distance",
)

SWEEP_ALIASES = {
    "power": "tx_power_per_lu",
    "p": "tx_power_per_lu",
    "s": "feedback_count",
    "m": "feedback_count",
    "n_d": "num_elements",
    "nd": "num_elements",
    "k": "num_users",
    "d_ad": "ap_dirs_distance",
    "dad": "ap_dirs_distance",
}


def _number():
    return Combine(
        Maybe(oneOf("+ -"))
        + Word(nums)
        + Maybe(Literal(".") + Maybe(Word(nums)))
        + Maybe(CaselessLiteral("E") + Word("+-" + nums, nums))
    ).setParseAction(lambda toks: float(toks[0]))


class BenchmarkTag:
    """
    A parsed benchmark reference such as ``ajp_est(1)`` or ``ActiveJammer(-4)``.

    Attributes
    ----------
    name: str
        The lower-cased benchmark name.
    parameter: Optional[float]
        The value in parentheses, if any.
    text: str
        The tag as written.
    """

    __slots__ = ("name", "parameter", "text")

    def __init__(self, name: str, parameter: Optional[float] = None, text: Optional[str] = None):
        self.name = name.lower()
        self.parameter = parameter
        self.text = text if text is not None else self.canonical

    def __repr__(self):
        return f"<BenchmarkTag name={self.name!r} parameter={self.parameter!r}>"

    def __str__(self):
        return self.text

    def __eq__(self, other):
        if not isinstance(other, BenchmarkTag):
            return NotImplemented
        return (self.name, self.parameter) == (other.name, other.parameter)

    def __hash__(self):
        return hash((self.name, self.parameter))

    @property
    def canonical(self) -> str:
        if self.parameter is None:
            return self.name
        value = self.parameter
        shown = str(int(value)) if float(value).is_integer() else repr(value)
        return f"{self.name}({shown})"


class Sweep:
    """
    A sweep variable and its grid.

    Attributes
    ----------
    name: str
        One of `SWEEP_VARIABLES`.
    values: Tuple[float, ...]
        The grid, in the order given.
    """

    __slots__ = ("name", "values")

    def __init__(self, name: str, values):
        self.name = name
        self.values = tuple(float(v) for v in values)
        if not self.values:
            raise GrammarError(name, "sweep grid is empty")

    def __repr__(self):
        return f"<Sweep name={self.name!r} values={self.values!r}>"

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


_ident = Word(alphas, alphanums + "_")
_lpar = Literal("(").suppress()
_rpar = Literal(")").suppress()

_tag = Group(_ident("name") + Maybe(_lpar + _number()("parameter") + _rpar))
_tag_list = delimitedList(_tag) + StringEnd()

_colon = Literal(":").suppress()
_range = (
    _number()("start") + _colon + _number()("stop") + Maybe(_colon + _number()("step"))
)
_values = Group(delimitedList(_number()))("values")
_sweep = _ident("name") + Literal("=").suppress() + (_range | _values) + StringEnd()

_trials = (
    Word(nums)("drops")
    + Maybe(CaselessLiteral("x").suppress() + Word(nums)("realizations"))
    + StringEnd()
)


def parse_benchmarks(text: str) -> List[BenchmarkTag]:
    """
    Parse a comma separated benchmark list.

    >>> [str(t) for t in parse_benchmarks("nojam, zf, ajp_est(1)")]
    ['nojam', 'zf', 'ajp_est(1)']

    Raises
    ------
    GrammarError
        The list is empty or malformed.
    """
    if not text or not text.strip():
        raise GrammarError(text or "", "no benchmarks given")
    try:
        parsed = _tag_list.parseString(text.strip())
    except ParseException as error:
        raise GrammarError(text, str(error)) from error
    tags = []
    for group in parsed:
        parameter = group.get("parameter")
        tag = BenchmarkTag(group["name"], parameter)
        tags.append(tag)
    return tags


def _expand_range(text: str, start: float, stop: float, step: float) -> List[float]:
    if step == 0:
        raise GrammarError(text, "step must be non-zero")
    span = (stop - start) / step
    if span < -1e-9:
        raise GrammarError(text, "step points away from stop")
    count = int(math.floor(span + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def parse_sweep(text: str) -> Sweep:
    """
    Parse ``NAME=start:stop[:step]`` (stop inclusive) or ``NAME=v1,v2,...``.

    ``NAME`` may be a canonical sweep variable or one of its short aliases
    (``power``, ``s``, ``N_D``, ``K``, ``d_AD``).

    >>> parse_sweep("power=-14:-2:4").values
    (-14.0, -10.0, -6.0, -2.0)

    Raises
    ------
    GrammarError
        The expression is malformed or names an unknown variable.
    """
    try:
        parsed = _sweep.parseString(text.strip())
    except ParseException as error:
        raise GrammarError(text, str(error)) from error
    raw = parsed["name"].lower()
    name = SWEEP_ALIASES.get(raw, raw)
    if name not in SWEEP_VARIABLES:
        raise GrammarError(text, f"unknown sweep variable {parsed['name']!r}")
    if "values" in parsed:
        values = list(parsed["values"])
    else:
        step = parsed.get("step", 1.0)
        values = _expand_range(text, parsed["start"], parsed["stop"], step)
    return Sweep(name, values)


def parse_trials(text: str) -> Tuple[int, Optional[int]]:
    """
    Parse a trial count: ``DROPS`` or ``DROPSxREALIZATIONS``.

    >>> parse_trials("100x20")
    (100, 20)
    """
    try:
        parsed = _trials.parseString(str(text).strip())
    except ParseException as error:
        raise GrammarError(str(text), str(error)) from error
    drops = int(parsed["drops"])
    realizations = int(parsed["realizations"]) if "realizations" in parsed else None
    if drops < 1 or (realizations is not None and realizations < 1):
        raise GrammarError(str(text), "trial counts must be positive")
    return drops, realizations
