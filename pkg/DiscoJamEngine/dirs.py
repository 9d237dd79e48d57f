import enum
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .channel import ChannelSet
from .exceptions import ConfigError, ShapeMismatchError

__all__ = (
    "JammerMode",
    "DirsProfile",
    "ReflectionState",
    "CoherenceFrame",
    "PROFILE_CASES",
    "sample_reflection",
    "sample_frame",
    "combined_channel",
    "aca_channel",
    "dt_channels",
)

ONE_BIT_PHASES = (math.pi / 9.0, 7.0 * math.pi / 6.0)
ONE_BIT_GAINS = (0.8, 1.0)

# Phase-shift distributions of the two studied cases.
PROFILE_CASES = {
    "c1": (0.25, 0.75),
    "c2": (0.5, 0.5),
}


class JammerMode(enum.Enum):
    """When the DIRS randomizes its reflection."""

    PERSISTENT = "persistent"
    TEMPORAL = "temporal"

    @classmethod
    def parse(cls, value) -> "JammerMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigError("mode", f"unknown jammer mode {value!r}") from None


@dataclass(frozen=True)
class DirsProfile:
    """
    The random reflection process of a disco IRS.

    Element ``r`` picks phase index ``i`` with probability ``probs[i]`` and then
    reflects with ``gains[i] * exp(j * phases[i])``; indices are i.i.d. across
    elements and across time slots.

    Attributes
    ----------
    bits: int
        Phase quantization bits ``b``; the alphabet has ``2 ** b`` entries.
    phases: Tuple[float, ...]
        The phase set in radians.
    gains: Tuple[float, ...]
        Amplitude paired with each phase, in ``(0, 1]``.
    probs: Tuple[float, ...]
        Probability of each phase.
    mode: JammerMode
        Persistent (random in RPT and DT) or temporal (silent in RPT).
    num_elements: int
        Number of reflecting elements sampled per state.
    """

    bits: int
    phases: Tuple[float, ...]
    gains: Tuple[float, ...]
    probs: Tuple[float, ...]
    mode: JammerMode = JammerMode.PERSISTENT
    num_elements: int = 2048

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))
        object.__setattr__(self, "gains", tuple(float(g) for g in self.gains))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        object.__setattr__(self, "mode", JammerMode.parse(self.mode))
        self.validate()

    def validate(self):
        """
        Raises
        ------
        ConfigError
            The alphabet sizes disagree, the probabilities are not a distribution, or
            a gain lies outside ``(0, 1]``.
        """
        if self.bits < 0:
            raise ConfigError("bits", "must be non-negative")
        size = 2 ** self.bits
        for name in ("phases", "gains", "probs"):
            if len(getattr(self, name)) != size:
                raise ConfigError(name, f"needs exactly {size} entries for b={self.bits}")
        probs = np.asarray(self.probs)
        if np.any(probs < 0) or not math.isclose(probs.sum(), 1.0, abs_tol=1e-9):
            raise ConfigError("probs", "must be non-negative and sum to 1")
        gains = np.asarray(self.gains)
        if np.any(gains <= 0) or np.any(gains > 1):
            raise ConfigError("gains", "amplitudes must lie in (0, 1]")
        if self.num_elements < 1:
            raise ConfigError("num_elements", "at least one element is required")

    @classmethod
    def one_bit(
        cls,
        probs: Sequence[float],
        *,
        ideal: bool = False,
        mode=JammerMode.PERSISTENT,
        num_elements: int = 2048,
    ) -> "DirsProfile":
        """
        The one-bit hardware with phases ``{pi/9, 7pi/6}`` and gains ``{0.8, 1}``.

        ``ideal=True`` replaces the gains with unit amplitudes.
        """
        gains = (1.0, 1.0) if ideal else ONE_BIT_GAINS
        return cls(1, ONE_BIT_PHASES, gains, tuple(probs), mode, num_elements)

    @classmethod
    def uniform(
        cls,
        bits: int,
        *,
        gains: Optional[Sequence[float]] = None,
        probs: Optional[Sequence[float]] = None,
        mode=JammerMode.PERSISTENT,
        num_elements: int = 2048,
    ) -> "DirsProfile":
        """A ``b``-bit alphabet with phases ``2 pi i / 2^b``, unit gains and uniform use."""
        size = 2**bits
        phases = tuple(2.0 * math.pi * i / size for i in range(size))
        gains = (1.0,) * size if gains is None else tuple(gains)
        probs = (1.0 / size,) * size if probs is None else tuple(probs)
        return cls(bits, phases, gains, probs, mode, num_elements)

    @classmethod
    def from_case(
        cls, case: str, mode=JammerMode.PERSISTENT, num_elements: int = 2048
    ) -> "DirsProfile":
        """
        A named preset: ``c1``, ``c2`` or their unit-gain variants ``c1-ideal``,
        ``c2-ideal``.
        """
        name = case.lower()
        ideal = name.endswith("-ideal")
        base = name[: -len("-ideal")] if ideal else name
        try:
            probs = PROFILE_CASES[base]
        except KeyError:
            raise ConfigError("case", f"unknown profile case {case!r}") from None
        return cls.one_bit(probs, ideal=ideal, mode=mode, num_elements=num_elements)

    def with_elements(self, num_elements: int) -> "DirsProfile":
        return replace(self, num_elements=num_elements)

    def with_mode(self, mode) -> "DirsProfile":
        return replace(self, mode=JammerMode.parse(mode))

    @property
    def size(self) -> int:
        return 2**self.bits

    @property
    def alphabet(self) -> np.ndarray:
        """The reflection coefficients ``gains[i] * exp(j phases[i])``."""
        return np.asarray(self.gains) * np.exp(1j * np.asarray(self.phases))


class ReflectionState:
    """
    The DIRS reflection vector ``phi(t)`` during one slot.

    Attributes
    ----------
    vector: numpy.ndarray
        ``N_D`` complex coefficients ``alpha_r exp(j phi_r)``.
    indices: numpy.ndarray
        The alphabet index drawn for each element, ``-1`` where the DIRS is silent.
    """

    __slots__ = ("vector", "indices")

    def __init__(self, vector: np.ndarray, indices: np.ndarray):
        self.vector = np.asarray(vector, dtype=complex)
        self.indices = np.asarray(indices, dtype=int)

    def __repr__(self):
        return f"<ReflectionState elements={self.vector.size} silent={self.is_silent}>"

    @classmethod
    def silent(cls, num_elements: int) -> "ReflectionState":
        """A perfectly absorbing DIRS: every coefficient is exactly zero."""
        return cls(np.zeros(num_elements, dtype=complex), np.full(num_elements, -1))

    @property
    def is_silent(self) -> bool:
        return bool(np.all(self.indices < 0))


class CoherenceFrame:
    """
    The DIRS states of one channel coherence frame.

    Attributes
    ----------
    rpt_state: ReflectionState
        State during reverse pilot transmission.
    dt_states: List[ReflectionState]
        One state per DT sub-slot of length ``T_R``; there are ``C`` of them.
    """

    __slots__ = ("rpt_state", "dt_states")

    def __init__(self, rpt_state: ReflectionState, dt_states: List[ReflectionState]):
        self.rpt_state = rpt_state
        self.dt_states = list(dt_states)

    def __repr__(self):
        silent = self.rpt_state.is_silent
        return f"<CoherenceFrame sub_slots={len(self.dt_states)} silent_rpt={silent}>"

    def __len__(self):
        return len(self.dt_states)


def sample_reflection(profile: DirsProfile, rng: np.random.Generator) -> ReflectionState:
    """
    Draw one reflection state: every element picks an alphabet index i.i.d. from
    ``profile.probs``.
    """
    indices = rng.choice(profile.size, size=profile.num_elements, p=np.asarray(profile.probs))
    return ReflectionState(profile.alphabet[indices], indices)


def sample_frame(
    profile: DirsProfile, rng: np.random.Generator, frame_ratio: int = 6
) -> CoherenceFrame:
    """
    Draw the states of a whole coherence frame.

    Persistent mode draws the RPT state and ``C`` DT states independently; temporal
    mode keeps the DIRS silent during RPT and draws only the ``C`` DT states.
    """
    if frame_ratio < 1:
        raise ConfigError("frame_ratio", "must be >= 1")
    if profile.mode is JammerMode.TEMPORAL:
        rpt = ReflectionState.silent(profile.num_elements)
    else:
        rpt = sample_reflection(profile, rng)
    return CoherenceFrame(rpt, [sample_reflection(profile, rng) for _ in range(frame_ratio)])


def combined_channel(channels: ChannelSet, state: ReflectionState) -> np.ndarray:
    """
    The overall AP–LU channel seen through one DIRS state.

    Returns
    -------
    numpy.ndarray
        ``(N_A, K)`` matrix whose column ``k`` is ``(h_{I,k} diag(phi) G + h_{d,k})^H``.

    Raises
    ------
    ShapeMismatchError
        The state does not have one coefficient per DIRS element.
    """
    phi = state.vector
    if phi.shape != (channels.num_elements,):
        raise ShapeMismatchError((channels.num_elements,), phi.shape, "reflection vector")
    if channels.H_I.shape[1] != channels.num_elements:
        raise ShapeMismatchError(
            (channels.num_users, channels.num_elements), channels.H_I.shape, "H_I"
        )
    rows = (channels.H_I * phi[None, :]) @ channels.G + channels.H_d
    return rows.conj().T


def aca_channel(h_dt: np.ndarray, h_rpt: np.ndarray) -> np.ndarray:
    """
    The active channel aging ``H_DT - H_RPT`` between a DT sub-slot and the trained
    channel.

    Raises
    ------
    ShapeMismatchError
        The two channels differ in shape.
    """
    h_dt, h_rpt = np.asarray(h_dt), np.asarray(h_rpt)
    if h_dt.shape != h_rpt.shape:
        raise ShapeMismatchError(h_rpt.shape, h_dt.shape, "DT channel")
    return h_dt - h_rpt


def dt_channels(channels: ChannelSet, frame: CoherenceFrame) -> np.ndarray:
    """Stack the combined channel of every DT sub-slot into a ``(C, N_A, K)`` array."""
    return np.stack([combined_channel(channels, state) for state in frame.dt_states])
