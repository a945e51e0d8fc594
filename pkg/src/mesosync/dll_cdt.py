"""DLL phase generation, sampling-clock composition and clock-domain transfer.

The DLL is behavioral: N evenly spaced phases of the receiver reference,
optionally reproducing the reference's phase modulation through a
first-order low-pass (slow jitter tracked, fast jitter attenuated).

The transfer chain re-times the detector output at the sampling clock, then
through one intermediate-phase stage and one receiver-clock stage.  A stage
sampling inside ``t_setup`` of an input transition logs a timing violation;
a stage sampling before its input has settled silently captures the
previous value.  For a locked loop the chain delivers every bit within
three clock cycles of its mid-eye sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .fine_loop import VcdlCurve, vcdl_delay
from .timebase import ClockGen, SimTime

IDEAL = "ideal"
TRACKING = "tracking"


class DllPhases:
    """Edge times for the N DLL output phases.

    ``reference`` is the receiver clock generator.  In tracking mode the
    reference's per-edge phase offsets pass through a one-pole low-pass with
    the given loop bandwidth before the phase offsets are applied.
    """

    def __init__(
        self,
        reference: ClockGen,
        n_phases: int = 10,
        mode: str = IDEAL,
        loop_bw_hz: float = 20e6,
    ):
        if n_phases < 4:
            raise ValueError("need at least 4 DLL phases")
        if mode not in (IDEAL, TRACKING):
            raise ValueError(f"unknown DLL mode: {mode!r}")
        self.ref = reference
        self.n = n_phases
        self.mode = mode
        self.period = reference.period
        self._offsets = [round(i * self.period / n_phases) for i in range(n_phases)]
        if mode == TRACKING:
            # Discrete one-pole equivalent of a first-order loop at loop_bw_hz.
            tsec = self.period / 1e15
            self._alpha = 1.0 - math.exp(-2.0 * math.pi * loop_bw_hz * tsec)
            self._tracked: list[SimTime] = []
            self._y = 0.0

    def phase_offset(self, i: int) -> SimTime:
        if not 0 <= i < self.n:
            raise IndexError(f"phase index {i} out of range [0, {self.n})")
        return self._offsets[i]

    def _ref_edge(self, k: int) -> SimTime:
        if self.mode == IDEAL:
            return self.ref.edge(k)
        while len(self._tracked) <= k:
            j = len(self._tracked)
            x = self.ref.edge(j) - j * self.period
            self._y += self._alpha * (x - self._y)
            self._tracked.append(j * self.period + round(self._y))
        return self._tracked[k]

    def edge(self, i: int, k: int) -> SimTime:
        """k-th active edge of DLL phase i."""
        return self._ref_edge(k) + self.phase_offset(i)

    def first_edge_after(self, i: int, t: SimTime, hint: int = 0) -> SimTime:
        """Earliest edge of phase i strictly after t."""
        off = self.phase_offset(i)
        k = max(hint, int((t - off) // self.period) - 2, 0)
        while self.edge(i, k) <= t:
            k += 1
        return self.edge(i, k)


def dll_edge(i: int, k: int, phases: DllPhases) -> SimTime:
    return phases.edge(i, k)


@dataclass(frozen=True)
class PhaseSelect:
    """Selected source phase index; equals the ring counter's hot bit."""

    n: int


def sampling_clock_edge(
    k: int, sel: PhaseSelect, v_c: float, curve: VcdlCurve, phases: DllPhases
) -> SimTime:
    """k-th active edge of the sampling clock: selected phase plus VCDL."""
    return phases.edge(sel.n, k) + vcdl_delay(v_c, curve)


def intermediate_phase(n: int, n_phases: int) -> int:
    """Transfer-stage phase index for selected phase n.

    Returns ``n + 2 - N/2`` when ``n + 2 > N/2``, otherwise 0.  Defined for
    even N only; odd N is rejected rather than generalized.
    """
    if n_phases % 2 != 0:
        raise ValueError("intermediate phase rule requires an even phase count")
    if not 0 <= n < n_phases:
        raise IndexError(f"phase index {n} out of range [0, {n_phases})")
    half = n_phases // 2
    if n + 2 > half:
        return n + 2 - half
    return 0


@dataclass(frozen=True)
class CdtChain:
    """Timing model of the three-stage transfer into the receiver domain.

    The retiming stage is fed by a regenerative comparator that may need
    more than half a cycle, so its output is modeled as settling a full
    ``T/2 - t_setup`` after its clock edge (the worst case the half-cycle
    staging argument allows).  The transfer flip-flops see settled inputs
    and get an ordinary small clock-to-output delay instead; modeling them
    at the worst case too would double-count the pessimism and break the
    three-cycle delivery bound at phase-wrap selections.
    """

    period: SimTime
    t_setup: SimTime
    t_hold: SimTime = 0

    @property
    def resolve_retime(self) -> SimTime:
        """Settling delay of the comparator retiming stage: T/2 - t_setup."""
        return self.period // 2 - self.t_setup

    @property
    def resolve_stage(self) -> SimTime:
        """Clock-to-output delay of a transfer flip-flop."""
        return self.t_setup


@dataclass(frozen=True)
class Delivery:
    bit_id: int
    value: int
    t_center: SimTime       # mid-eye sample instant of this bit
    t_retime: SimTime       # sampling-clock retiming edge
    t_stage_i: SimTime      # intermediate-phase capture edge
    t_deliver: SimTime      # receiver-clock capture edge
    latency: SimTime        # t_deliver - t_center
    violations: tuple[str, ...] = ()


def _capture(
    edge_after,
    transition: SimTime,
    next_transition: SimTime | None,
    chain: CdtChain,
) -> tuple[SimTime | None, list[str]]:
    """First safe capture edge after ``transition``; None if overwritten."""
    u = edge_after(transition)
    viol = []
    if next_transition is not None and u > next_transition:
        return None, [f"missed capture window ending {next_transition}"]
    for tr in (transition, next_transition):
        if tr is None:
            continue
        if u - chain.t_setup < tr < u:
            viol.append(f"setup violation: edge {u} vs transition {tr}")
        elif chain.t_hold > 0 and u <= tr < u + chain.t_hold:
            viol.append(f"hold violation: edge {u} vs transition {tr}")
    return u, viol


def cdt_transfer(
    events: list[tuple[int, int, SimTime, int]],
    retime_edges: list[SimTime],
    phases: DllPhases,
    rx_clock: ClockGen,
    chain: CdtChain,
) -> list[Delivery]:
    """Run retimed detector outputs through the transfer chain.

    ``events`` holds (bit_id, value, t_center, selected_phase) per detector
    evaluation in time order; ``retime_edges[j]`` is the sampling-clock edge
    that re-times event j (the following active edge).  Returns one
    :class:`Delivery` per event that reaches the receiver domain.
    """
    out: list[Delivery] = []
    n_ev = len(events)
    # Data transitions at the retiming stage output.
    taus = [r + chain.resolve_retime for r in retime_edges]
    sigmas: list[SimTime | None] = [None] * n_ev

    u1s: list[SimTime | None] = [None] * n_ev
    viol1s: list[list[str]] = [[] for _ in range(n_ev)]
    for j in range(n_ev):
        bit_id, value, t_center, n_sel = events[j]
        m = intermediate_phase(n_sel, phases.n)
        nxt = taus[j + 1] if j + 1 < n_ev else None
        u1, viol1 = _capture(
            lambda t, m=m: phases.first_edge_after(m, t), taus[j], nxt, chain
        )
        u1s[j] = u1
        viol1s[j] = viol1
        if u1 is not None:
            sigmas[j] = u1 + chain.resolve_stage
        else:
            out.append(
                Delivery(bit_id, value, t_center, retime_edges[j], -1, -1, -1,
                         tuple(viol1))
            )

    def rx_after(t: SimTime) -> SimTime:
        _, e = rx_clock.first_edge_at_or_after(t + 1)
        return e

    for j in range(n_ev):
        if sigmas[j] is None:
            continue
        bit_id, value, t_center, n_sel = events[j]
        nxt = sigmas[j + 1] if j + 1 < n_ev else None
        u2, viol2 = _capture(rx_after, sigmas[j], nxt, chain)
        viols = tuple(viol1s[j] + viol2)
        if u2 is None:
            out.append(
                Delivery(bit_id, value, t_center, retime_edges[j], u1s[j], -1, -1,
                         viols)
            )
            continue
        out.append(
            Delivery(
                bit_id,
                value,
                t_center,
                retime_edges[j],
                u1s[j],
                u2,
                u2 - t_center,
                viols,
            )
        )
    out.sort(key=lambda d: (d.t_center, d.bit_id))
    return out
