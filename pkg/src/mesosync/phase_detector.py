"""Clocked comparator sampling and the Alexander bang-bang phase detector.

Metastability is keyed on time-to-crossing: a sample taken within ``tw`` of
a data transition midpoint resolves either to a fair coin (stochastic mode)
or to the sampler's previous output (deterministic-hold mode, used to pin
the half-period false-lock equilibrium).
"""

from __future__ import annotations

from dataclasses import dataclass

from .link import RxWaveform
from .timebase import Rng, SimTime

STOCHASTIC = "stochastic"
HOLD = "hold"


@dataclass(frozen=True)
class MetastabilityModel:
    time_window_tw: SimTime = 10_000  # 10 ps in fs
    resolution_mode: str = STOCHASTIC

    def __post_init__(self):
        if self.time_window_tw < 0:
            raise ValueError("metastability window must be >= 0")
        if self.resolution_mode not in (STOCHASTIC, HOLD):
            raise ValueError(f"unknown resolution mode: {self.resolution_mode!r}")


class Sampler:
    """One regenerative comparator; keeps its last resolved value for HOLD."""

    __slots__ = ("model", "last", "last_was_metastable")

    def __init__(self, model: MetastabilityModel, initial: int = 0):
        self.model = model
        self.last = initial
        self.last_was_metastable = False

    def sample(self, waveform: RxWaveform, t: SimTime, rng: Rng) -> int:
        bit = sample_comparator(waveform, t, self.model, rng, self.last)
        self.last_was_metastable = (
            waveform.nearest_transition_distance(t) <= self.model.time_window_tw
        )
        self.last = bit
        return bit


def sample_comparator(
    waveform: RxWaveform,
    t_sample: SimTime,
    m: MetastabilityModel,
    rng: Rng,
    previous: int = 0,
) -> int:
    """Resolved comparator output for a sample at ``t_sample``.

    Outside the metastability window the output is the sign of the
    differential input; inside it the resolution mode decides.
    """
    if waveform.nearest_transition_distance(t_sample) <= m.time_window_tw:
        if m.resolution_mode == STOCHASTIC:
            return rng.coin()
        return previous
    v = waveform.value_at(t_sample)
    if v == 0.0:
        # Exactly on a crossing with tw = 0: still unresolved by definition.
        return rng.coin() if m.resolution_mode == STOCHASTIC else previous
    return 1 if v > 0.0 else 0


@dataclass(frozen=True)
class AlexanderState:
    """Three most recent samples in time order (a oldest) plus last outputs.

    ``a`` and ``c`` are mid-eye samples from consecutive active edges, ``b``
    the boundary sample between them.  ``primed`` counts warmup samples so
    no decision is emitted until the window is full.
    """

    a: int = 0
    b: int = 0
    c: int = 0
    up: int = 0
    dn: int = 0
    primed: int = 0


def alexander_step(
    state: AlexanderState, edge_sample: int, center_sample: int
) -> tuple[int, int, int, AlexanderState]:
    """Advance one full clock cycle.

    ``edge_sample`` is the boundary sample taken half a cycle before the
    active edge, ``center_sample`` the mid-eye sample taken on the active
    edge itself.  UP = a XOR b flags a late clock, DN = b XOR c an early
    one; a = b = c yields no action.
    """
    a = state.c
    b = edge_sample & 1
    c = center_sample & 1
    primed = min(state.primed + 1, 3)
    if primed < 3:
        new = AlexanderState(a, b, c, 0, 0, primed)
        return 0, 0, c, new
    up = a ^ b
    dn = b ^ c
    new = AlexanderState(a, b, c, up, dn, primed)
    return up, dn, c, new


# Latency of the detector's retimed outputs, in clock cycles: one cycle for
# the comparator to regenerate plus one retiming flip-flop on the same clock.
PD_PIPELINE_CYCLES = 2


def pd_output_valid_time(center_sample_time: SimTime, period: SimTime) -> SimTime:
    """Instant the decision for a given mid-eye sample is valid downstream."""
    return center_sample_time + PD_PIPELINE_CYCLES * period
