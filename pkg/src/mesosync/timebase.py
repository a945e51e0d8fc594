"""Simulation time base, reproducible randomness and jittered clock edges.

All simulation time is carried as integer femtoseconds so that event
ordering and phase arithmetic are exact.  Clock phases and jitter are
expressed in unit intervals (UI, fractions of the clock period) and only
converted to ticks at the final rounding step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# One femtosecond per tick.  SimTime values are plain ints.
SimTime = int

FS_PER_SECOND = 10**15
FS_PER_NS = 10**6
FS_PER_PS = 10**3

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def period_fs(rate_hz: float) -> SimTime:
    """Clock period in ticks for a bit/clock rate, rounded to nearest fs."""
    return round(FS_PER_SECOND / rate_hz)


def fs_to_seconds(t: SimTime) -> float:
    return t / FS_PER_SECOND


class NonMonotonicEdgeError(RuntimeError):
    """Raised when jitter pushes a generated clock edge behind its predecessor."""


def _mix64(x: int) -> int:
    z = x & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


class Rng:
    """SplitMix64 generator.

    The algorithm is fixed so that identical seeds give identical streams on
    every platform; the reference output for seed 0 is frozen in the test
    suite as the conformance vector.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix64(self._state)

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def gauss(self) -> float:
        """One standard-normal draw (Box-Muller, cosine branch only).

        The sine branch is discarded so each call consumes exactly two
        uniforms, keeping draw counts independent of call history.
        """
        u1 = ((self.next_u64() >> 11) + 1) * 2.0**-53  # (0, 1]
        u2 = (self.next_u64() >> 11) * 2.0**-53
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def coin(self) -> int:
        return self.next_u64() & 1


def derive_seed(base_seed: int, index: int) -> int:
    """Child seed for independent sub-streams (sweep points, experiments)."""
    return _mix64((base_seed ^ _mix64((index + 1) * _GOLDEN)) & _MASK64)


@dataclass(frozen=True)
class JitterSpec:
    """Phase-modulation recipe for a clock: sinusoidal and/or white gaussian.

    ``correlated`` marks the receiver spec as sharing the transmitter's
    offsets edge-for-edge instead of evaluating its own components.
    """

    sin_amp_ui: float = 0.0
    sin_freq_hz: float = 0.0
    sin_phase_rad: float = 0.0
    gauss_sigma_ui: float = 0.0
    correlated: bool = False

    def __post_init__(self):
        if self.sin_amp_ui < 0:
            raise ValueError("sinusoidal jitter amplitude must be >= 0")
        if self.gauss_sigma_ui < 0:
            raise ValueError("gaussian jitter sigma must be >= 0")

    @property
    def is_quiet(self) -> bool:
        return self.sin_amp_ui == 0.0 and self.gauss_sigma_ui == 0.0

    def worst_excursion_ui(self) -> float:
        # 4 sigma is used as the practical bound for the monotonicity contract
        return self.sin_amp_ui + 4.0 * self.gauss_sigma_ui


NO_JITTER = JitterSpec()


def jitter_offset(spec: JitterSpec, t: SimTime, rng: Rng | None = None) -> float:
    """Offset in UI at nominal instant ``t``.

    The sinusoidal part is evaluated analytically; the gaussian part is one
    i.i.d. draw per call, so callers must request edges in index order to
    keep streams reproducible.
    """
    off = 0.0
    if spec.sin_amp_ui:
        tsec = t / FS_PER_SECOND
        off += spec.sin_amp_ui * math.sin(
            2.0 * math.pi * spec.sin_freq_hz * tsec + spec.sin_phase_rad
        )
    if spec.gauss_sigma_ui:
        if rng is None:
            raise ValueError("gaussian jitter requires an Rng")
        off += spec.gauss_sigma_ui * rng.gauss()
    return off


def edge_time(
    period: SimTime,
    index: int,
    static_phase_ui: float = 0.0,
    jitter: JitterSpec = NO_JITTER,
    rng: Rng | None = None,
) -> SimTime:
    """Active-edge instant ``index*T + static_phase*T + jitter*T`` in ticks.

    Jitter is evaluated at the nominal grid instant ``index*T``.  Edges are
    strictly increasing in ``index`` whenever the total excursion per period
    stays below 0.5 UI; sequence-level checking lives in :class:`ClockGen`.
    """
    if period <= 0:
        raise ValueError("period must be positive")
    if index < 0:
        raise ValueError("index must be >= 0")
    t = index * period + round(static_phase_ui * period)
    if not jitter.is_quiet:
        t += round(jitter_offset(jitter, index * period, rng) * period)
    return t


class ClockGen:
    """Sequential edge generator for one clock with monotonicity checking.

    Owns the gaussian draw order for its jitter spec.  ``edge(k)`` must be
    called with non-decreasing k; each new index is generated exactly once
    and cached so repeated queries are stable.
    """

    def __init__(
        self,
        period: SimTime,
        static_phase_ui: float = 0.0,
        jitter: JitterSpec = NO_JITTER,
        rng: Rng | None = None,
        name: str = "clk",
    ):
        self.period = period
        self.static_phase_ui = static_phase_ui
        self.jitter = jitter
        self.rng = rng
        self.name = name
        self._edges: list[SimTime] = []

    def edge(self, index: int) -> SimTime:
        while len(self._edges) <= index:
            k = len(self._edges)
            t = edge_time(self.period, k, self.static_phase_ui, self.jitter, self.rng)
            if self._edges and t <= self._edges[-1]:
                raise NonMonotonicEdgeError(
                    f"{self.name}: edge {k} at {t} fs not after edge {k-1} "
                    f"at {self._edges[-1]} fs"
                )
            self._edges.append(t)
        return self._edges[index]

    def first_edge_at_or_after(self, t: SimTime, hint: int = 0) -> tuple[int, SimTime]:
        """(index, time) of the earliest edge with time >= t."""
        k = max(hint, 0)
        # Jump close using the nominal grid, then correct locally.
        approx = (t - round(self.static_phase_ui * self.period)) // self.period
        k = max(k, int(approx) - 2, 0)
        while self.edge(k) >= t and k > 0 and self.edge(k - 1) >= t:
            k -= 1
        while self.edge(k) < t:
            k += 1
        return k, self.edge(k)


def clamp_voltage(v: float, v_dd: float) -> float:
    """Control-voltage clamp to the supply rails."""
    if v < 0.0:
        return 0.0
    if v > v_dd:
        return v_dd
    return v
