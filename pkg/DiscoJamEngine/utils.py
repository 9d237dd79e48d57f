import enum
import math
from typing import Sequence, Union

import numpy as np

__all__ = (
    "Stream",
    "db_to_linear",
    "linear_to_db",
    "dbm_to_watts",
    "watts_to_dbm",
    "trial_rng",
    "complex_normal",
    "ordered_sum",
)

ArrayLike = Union[float, np.ndarray]


class Stream(enum.IntEnum):
    """Keys separating the random streams of one trial."""

    CHANNEL = 0
    DIRS = 1
    PLACEMENT = 2
    JAMMER = 3
    FEEDBACK = 4


def db_to_linear(value_db: ArrayLike) -> ArrayLike:
    """
    Convert a power ratio from dB to linear scale.

    >>> db_to_linear(30)
    1000.0
    """
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value: ArrayLike) -> ArrayLike:
    return 10.0 * np.log10(np.asarray(value, dtype=float))


def dbm_to_watts(value_dbm: ArrayLike) -> ArrayLike:
    """
    Convert a power from dBm to watts.

    >>> dbm_to_watts(30)
    1.0
    """
    return db_to_linear(value_dbm) / 1000.0


def watts_to_dbm(value: ArrayLike) -> ArrayLike:
    return linear_to_db(value) + 30.0


def trial_rng(seed: int, *keys: int) -> np.random.Generator:
    """
    Build the random stream owned by one Monte-Carlo trial.

    The stream is a pure function of the base seed and the trial keys, so trials can
    run in any order or process and still reproduce bit-identical draws.

    Parameters
    ----------
    seed: int
        The experiment's base seed.
    keys: int
        Trial coordinates, e.g. ``(drop, realization, stream)``.

    Returns
    -------
    numpy.random.Generator
        A generator seeded from ``SeedSequence([seed, *keys])``.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """
    Draw i.i.d. circularly-symmetric complex Gaussians with zero mean and unit variance.

    Each real component has variance 1/2.
    """
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def ordered_sum(parts: Sequence[np.ndarray]) -> np.ndarray:
    """
    Sum partial results in their given order with pairwise summation.

    Used to merge per-chunk partials so the total does not depend on how the work was
    scheduled.
    """
    if not parts:
        raise ValueError("nothing to sum")
    return np.sum(np.stack([np.asarray(p) for p in parts]), axis=0)
