"""Deterministic event-driven simulation of the full synchronizer loop.

One simulation owns a single scheduler; simultaneous events are ordered by
a fixed per-module priority, then by insertion sequence, so repeated runs
of the same scenario produce byte-identical traces.

Loop wiring (see fine_loop for the sign conventions): the detector's UP
output flags a late sampling clock and therefore drives the pump's
discharge input, while DN (early) drives the charge input.  The control
voltage rises when more delay is needed; leaving the comparator window
upward selects the next-later DLL phase with a strong discharge pulse.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field, replace

from . import oracle as _oracle
from .coarse_loop import (
    ABOVE,
    BELOW,
    WITHIN,
    CoarseFsm,
    RingCounter,
    WindowComparator,
    fsm_step,
    ring_step,
    window_classify,
)
from .dll_cdt import CdtChain, DllPhases, cdt_transfer
from .fine_loop import (
    FineLoopState,
    PumpConfig,
    VcdlCurve,
    pump_integrate,
    vcdl_delay,
)
from .link import BitSource, ChannelConfig, RxWaveform
from .phase_detector import (
    HOLD,
    PD_PIPELINE_CYCLES,
    STOCHASTIC,
    AlexanderState,
    MetastabilityModel,
    Sampler,
    alexander_step,
)
from .scenario import Scenario
from .timebase import (
    FS_PER_NS,
    FS_PER_PS,
    ClockGen,
    JitterSpec,
    Rng,
    SimTime,
    derive_seed,
)

# Fixed tiebreak order for simultaneous events (low value runs first).
PRIO_CROSSING = 0
PRIO_PUBLISH = 1
PRIO_STRONG_END = 2
PRIO_DIVIDED = 3
PRIO_PUMP = 4
PRIO_OPP = 5
PRIO_CYCLE = 6

_PHASE_HISTORY = 64  # cycles averaged for the final sampling-phase estimate


@dataclass
class RunMetrics:
    """Everything a run reports; traces are strictly time-ordered."""

    scenario: Scenario
    locked: bool = False
    lock_time_fs: int | None = None
    sampling_phase_ui: float | None = None
    oracle_center_ui: float | None = None
    phase_error_ui: float | None = None
    ber_errors: int = 0
    ber_bits: int = 0
    latency_max_t: float | None = None
    latency_mean_t: float | None = None
    latency_hist: list = field(default_factory=list)  # (bin_t, count), 0.1T bins
    post_lock_violations: int = 0
    total_violations: int = 0
    missed_deliveries_post_lock: int = 0
    excursion_max_divided: float | None = None
    one_hot_violations: int = 0
    vc_bound_violations: int = 0
    counter_monotone: bool = True
    final_hot: int = 0
    vc_final: float = 0.0
    vc_peak_to_peak_post_lock: float | None = None
    pd_event_count: int = 0
    duration_fs: int = 0
    vc_trace: list = field(default_factory=list)
    counter_trace: list = field(default_factory=list)
    counter_path: list = field(default_factory=list)
    excursions: list = field(default_factory=list)
    deliveries: list = field(default_factory=list)
    eye_hist: list | None = None
    first_clean_sample_fs: int | None = None
    error: str | None = None

    @property
    def exit_code(self) -> int:
        if self.error is not None:
            return 2
        if not self.locked:
            return 2
        if self.post_lock_violations or self.missed_deliveries_post_lock:
            return 3
        return 0


class Simulation:
    """Single closed-loop run of a scenario."""

    def __init__(
        self,
        scn: Scenario,
        *,
        hold_until_fs: SimTime | None = None,
        stop_after_lock_fs: SimTime | None = None,
        measure_from_fs: SimTime | None = None,
        collect_eye: bool = False,
    ):
        scn.validate()
        self.scn = scn
        self.T = scn.period
        self.N = scn.n_phases
        self.K = scn.k_divide
        self.hold_until_fs = hold_until_fs
        self.stop_after_lock_fs = stop_after_lock_fs
        self.measure_from_fs = measure_from_fs
        self.collect_eye = collect_eye

        self.rng_meta = Rng(derive_seed(scn.seed, 0))
        rng_tx = Rng(derive_seed(scn.seed, 1))
        rng_rx = Rng(derive_seed(scn.seed, 2))
        self.bits = BitSource(scn.pattern, derive_seed(scn.seed, 3))

        tx_jit = JitterSpec(
            scn.tx_sin_amp_ui,
            scn.tx_sin_freq_hz,
            scn.tx_sin_phase_rad,
            scn.tx_gauss_sigma_ui,
        )
        self.tx_clock = ClockGen(self.T, 0.0, tx_jit, rng_tx, name="tx")
        if scn.correlated:
            # Receiver reference shares the transmitter's edge offsets.
            self.rx_clock = self.tx_clock
        else:
            rx_jit = JitterSpec(
                scn.rx_sin_amp_ui,
                scn.rx_sin_freq_hz,
                scn.rx_sin_phase_rad,
                scn.rx_gauss_sigma_ui,
            )
            self.rx_clock = ClockGen(self.T, 0.0, rx_jit, rng_rx, name="rx")

        chan = ChannelConfig(
            n=scn.n,
            alpha=scn.alpha,
            bit_period=self.T,
            transition_time=round(scn.transition_time_ui * self.T),
            swing=scn.swing_v,
        )
        self.waveform = RxWaveform(self.bits, chan, tx_clock=self.tx_clock)

        v_low, v_high = scn.window()
        self.window = WindowComparator(
            v_low, v_high, round(scn.trip_delay_ns * FS_PER_NS)
        )
        self.pump = PumpConfig(
            i_weak=scn.i_weak_uA * 1e-6,
            strong_ratio=scn.strong_ratio,
            c_filter=scn.c_filter_fF * 1e-15,
            v_dd=scn.v_dd,
        )
        self.curve = VcdlCurve(
            d_min=round(scn.d_min_ui * self.T),
            phase_step=round(self.T / self.N),
            v_low=v_low,
            v_high=v_high,
            corner=scn.corner,
            shape=scn.vcdl_shape,
            corner_mult={
                "FF": scn.mult_ff,
                "TT": scn.mult_tt,
                "SS": scn.mult_ss,
                "FNSP": scn.mult_fnsp,
                "SNFP": scn.mult_snfp,
            },
        )
        self.dll = DllPhases(self.rx_clock, self.N, scn.dll_mode, scn.loop_bw_hz)

        preset = scn.snapshot_hot if scn.snapshot_hot >= 0 else 0
        self.ring = RingCounter(self.N, 1 << preset)
        self.fsm = CoarseFsm(k_divide=self.K)
        self.vc = scn.vc_start()
        self.t_vc: SimTime = 0
        self.w_up = self.w_dn = 0
        self.s_up = self.s_dn = 0
        self.gen = 0
        self.strong_gen = 0

        meta = MetastabilityModel(
            time_window_tw=round(scn.tw_ps * FS_PER_PS),
            resolution_mode=HOLD if (
                scn.resolution == "hold" or hold_until_fs is not None
            ) else STOCHASTIC,
        )
        self.center_sampler = Sampler(meta)
        self.edge_sampler = Sampler(meta)
        self.alex = AlexanderState()

        self.heap: list = []
        self.seq = 0
        self.now: SimTime = 0

        # Traces and bookkeeping.
        self.vc_trace: list[tuple[SimTime, float]] = [(0, self.vc)]
        self.counter_trace: list = []
        self.counter_path: list[int] = [self.ring.hot_index]
        self.pd_events: list[tuple[int, int, SimTime, int]] = []
        self.excursions: list[tuple[SimTime, SimTime | None]] = []
        self.one_hot_violations = 0
        self.vc_bound_violations = 0
        self.lock_time: SimTime | None = None
        self.last_ring_change: SimTime = 0
        self.last_nonwithin: SimTime = 0
        self.first_clean_sample: SimTime | None = None
        self._edge_sample: int | None = None
        self._vc_hist: deque = deque()
        self._act_hist: deque = deque()
        self._meta_hist: deque = deque()
        self._phase_hist: deque = deque(maxlen=_PHASE_HISTORY)

        self.actual_region = window_classify(self.vc, self.window)
        self.published = self.actual_region
        if self.actual_region != WITHIN:
            self.excursions.append((0, None))

    # -- scheduling ------------------------------------------------------

    def _push(self, t: SimTime, prio: int, payload: tuple):
        heapq.heappush(self.heap, (t, prio, self.seq, payload))
        self.seq += 1

    # -- control voltage segments ----------------------------------------

    def _slope_per_fs(self) -> float:
        i = 0.0
        strong = self.s_up or self.s_dn
        if not strong:
            i = self.pump.i_weak * (self.w_up - self.w_dn)
        i += self.pump.strong_ratio * self.pump.i_weak * (self.s_up - self.s_dn)
        return i / self.pump.c_filter / 1e15

    def _vc_at(self, t: SimTime) -> float:
        v = self.vc + self._slope_per_fs() * (t - self.t_vc)
        if v < 0.0:
            return 0.0
        if v > self.pump.v_dd:
            return self.pump.v_dd
        return v

    def _advance_vc(self, t: SimTime):
        state = pump_integrate(
            FineLoopState(self.vc),
            self.w_up,
            self.w_dn,
            self.s_up,
            self.s_dn,
            t - self.t_vc,
            self.pump,
        )
        self.vc = state.v_c
        if not 0.0 <= self.vc <= self.pump.v_dd:
            self.vc_bound_violations += 1
        self.t_vc = t

    def _set_levels(self, *, weak=None, strong=None):
        self._advance_vc(self.now)
        if weak is not None:
            self.w_up, self.w_dn = weak
        if strong is not None:
            self.s_up, self.s_dn = strong
        self.gen += 1
        self.vc_trace.append((self.now, self.vc))
        self._predict_crossing()

    def _predict_crossing(self):
        slope = self._slope_per_fs()
        if slope == 0.0:
            return
        v = self.vc
        w = self.window
        if slope > 0.0:
            targets = [th for th in (w.v_low, w.v_high) if th >= v]
            target = min(targets) if targets else None
            after = WITHIN if target == w.v_low else ABOVE
        else:
            targets = [th for th in (w.v_low, w.v_high) if th <= v]
            target = max(targets) if targets else None
            after = WITHIN if target == w.v_high else BELOW
        if target is None:
            return
        dt = (target - v) / slope
        t_cross = self.t_vc + max(1, math.ceil(dt))
        self._push(t_cross, PRIO_CROSSING, ("cross", self.gen, after))

    # -- event handlers ---------------------------------------------------

    def _on_crossing(self, gen: int, after: str):
        if gen != self.gen:
            return  # segment changed since this prediction
        # Move the segment origin to the crossing so the next prediction
        # starts from the threshold (exact: the segment is linear).
        self._advance_vc(self.now)
        prev = self.actual_region
        self.actual_region = after
        if prev == WITHIN and after != WITHIN:
            self.excursions.append((self.now, None))
        elif prev != WITHIN and after == WITHIN:
            if self.excursions and self.excursions[-1][1] is None:
                self.excursions[-1] = (self.excursions[-1][0], self.now)
            self.last_nonwithin = self.now
        self._push(self.now + self.window.trip_delay, PRIO_PUBLISH, ("pub", after))
        self._predict_crossing()

    def _on_publish(self, region: str):
        self.published = region
        fsm, _, _, s_up, s_dn = fsm_step(self.fsm, region, False)
        changed = fsm != self.fsm
        self.fsm = fsm
        if region == WITHIN and (self.s_up or self.s_dn):
            # Asynchronous reset truncates the strong pulse at window entry.
            self.strong_gen += 1
            self._set_levels(strong=(0, 0))
            changed = True
        if changed:
            self._trace_counter()

    def _on_strong_end(self, gen: int):
        if gen != self.strong_gen:
            return
        if self.s_up or self.s_dn:
            self._set_levels(strong=(0, 0))
            self._trace_counter()

    def _on_divided(self, m: int):
        fsm, stepped, direction, s_up, s_dn = fsm_step(self.fsm, self.published, True)
        self.fsm = fsm
        if stepped and direction is not None:
            try:
                self.ring = ring_step(self.ring, direction)
            except ValueError:
                self.one_hot_violations += 1
            self.last_ring_change = self.now
            self.counter_path.append(self.ring.hot_index)
        if (s_up, s_dn) != (self.s_up, self.s_dn):
            self.strong_gen += 1
            self._set_levels(strong=(s_up, s_dn))
            if s_up or s_dn:
                self._push(
                    self.now + self.K * self.T,
                    PRIO_STRONG_END,
                    ("strong_end", self.strong_gen),
                )
        self._trace_counter()
        nxt = self.rx_clock.edge((m + 1) * self.K)
        self._push(nxt, PRIO_DIVIDED, ("div", m + 1))

    def _trace_counter(self):
        self.counter_trace.append(
            (
                self.now,
                self.ring.hot_index,
                self.fsm.enable,
                self.fsm.up_dn,
                self.s_up,
                self.s_dn,
            )
        )

    def _on_opp(self, k: int, n_used: int):
        d = vcdl_delay(self._vc_at(self.now), self.curve)
        t_sample = self.now + d
        self._edge_sample = self.edge_sampler.sample(
            self.waveform, t_sample, self.rng_meta
        )

    def _on_cycle(self, k: int, n_used: int):
        if self.hold_until_fs is not None and self.now >= self.hold_until_fs:
            if self.center_sampler.model.resolution_mode == HOLD:
                stoch = MetastabilityModel(
                    self.center_sampler.model.time_window_tw, STOCHASTIC
                )
                self.center_sampler.model = stoch
                self.edge_sampler.model = stoch
        d = vcdl_delay(self._vc_at(self.now), self.curve)
        t_center = self.now + d
        center_val = self.center_sampler.sample(self.waveform, t_center, self.rng_meta)
        if self.first_clean_sample is None and not self.center_sampler.last_was_metastable:
            if self.hold_until_fs is None or self.now >= self.hold_until_fs:
                self.first_clean_sample = t_center
        edge_val = self._edge_sample if self._edge_sample is not None else center_val
        self._edge_sample = None
        up, dn, retimed, self.alex = alexander_step(self.alex, edge_val, center_val)

        bit_id = self.waveform.bit_at(t_center)
        self.pd_events.append((bit_id, retimed, t_center, n_used))

        # Late clock (UP) discharges, early clock (DN) charges: more control
        # voltage means more delay.  Applied one bit period per evaluation,
        # two cycles after the mid-eye sample.
        self._push(
            t_center + PD_PIPELINE_CYCLES * self.T, PRIO_PUMP, ("pump", dn, up)
        )

        self._update_lock(t_center, up, dn)

        n_next = self.ring.hot_index
        es = self.dll.edge(n_next, k + 1)
        self._push(es - self.T // 2, PRIO_OPP, ("opp", k + 1, n_next))
        self._push(es, PRIO_CYCLE, ("cycle", k + 1, n_next))

    def _on_pump(self, drive_up: int, drive_dn: int):
        self._set_levels(weak=(drive_up, drive_dn))

    # -- lock detection ----------------------------------------------------

    def _update_lock(self, t_center: SimTime, up: int, dn: int):
        self._phase_hist.append((t_center % self.T) / self.T)
        win = self.scn.lock_window_divided * self.K * self.T
        self._vc_hist.append((self.now, self._vc_at(self.now)))
        self._act_hist.append((self.now, 1 if (up ^ dn) else 0))
        self._meta_hist.append(
            (self.now, 1 if self.center_sampler.last_was_metastable else 0)
        )
        horizon = self.now - win
        while len(self._vc_hist) > 2 and self._vc_hist[1][0] <= horizon:
            self._vc_hist.popleft()
        while self._act_hist and self._act_hist[0][0] < horizon:
            self._act_hist.popleft()
        while self._meta_hist and self._meta_hist[0][0] < horizon:
            self._meta_hist.popleft()
        if self.lock_time is not None:
            return
        if self.published != WITHIN or self.actual_region != WITHIN:
            return
        if self.now - self.last_ring_change < win:
            return
        if self.now - self.last_nonwithin < win and self.last_nonwithin > 0:
            return
        if self._vc_hist[0][0] > horizon + self.T:
            return  # not enough history yet
        activity = sum(a for _, a in self._act_hist)
        if activity < max(1, len(self._act_hist) // 4):
            return
        # A one-directional acquisition creep moves Vc by one pump step per
        # active decision, whatever the data transition density; the locked
        # limit cycle stays well under that.  Bounding the window excursion
        # by a fraction of the activity-driven maximum separates the two.
        vs = [v for _, v in self._vc_hist]
        step_v = self.pump.weak_slope_v_per_fs * self.T
        drift_bound = self.scn.lock_drift_frac * activity * step_v
        if max(vs) - min(vs) > drift_bound:
            return
        # Equilibria hugging a comparator threshold are one dither step from
        # a coarse hop: only an interior control voltage counts as locked.
        margin = self.scn.lock_vc_margin_frac * (self.window.v_high - self.window.v_low)
        if min(vs) < self.window.v_low + margin or max(vs) > self.window.v_high - margin:
            return
        # Mid-eye samples landing in the metastability window mean the loop
        # is parked on a data edge, not in the eye.
        if any(f for _, f in self._meta_hist):
            return
        self.lock_time = self.now

    # -- main loop ---------------------------------------------------------

    def run(self) -> RunMetrics:
        scn = self.scn
        end = scn.duration_fs
        if end <= 0:
            return RunMetrics(scenario=scn, duration_fs=0, vc_trace=[],
                              counter_trace=[], counter_path=[],
                              final_hot=self.ring.hot_index, vc_final=self.vc)

        start_cycle = 2
        n0 = self.ring.hot_index
        es = self.dll.edge(n0, start_cycle)
        self._push(es - self.T // 2, PRIO_OPP, ("opp", start_cycle, n0))
        self._push(es, PRIO_CYCLE, ("cycle", start_cycle, n0))
        self._push(self.rx_clock.edge(self.K), PRIO_DIVIDED, ("div", 1))
        self._predict_crossing()

        while self.heap:
            t, prio, _, payload = self.heap[0]
            if t > end:
                break
            heapq.heappop(self.heap)
            self.now = t
            kind = payload[0]
            if kind == "cycle":
                self._on_cycle(payload[1], payload[2])
                if (
                    self.lock_time is not None
                    and self.stop_after_lock_fs is not None
                ):
                    end = min(end, self.lock_time + self.stop_after_lock_fs)
            elif kind == "opp":
                self._on_opp(payload[1], payload[2])
            elif kind == "pump":
                self._on_pump(payload[1], payload[2])
            elif kind == "cross":
                self._on_crossing(payload[1], payload[2])
            elif kind == "pub":
                self._on_publish(payload[1])
            elif kind == "div":
                self._on_divided(payload[1])
            elif kind == "strong_end":
                self._on_strong_end(payload[1])

        self.now = end
        self._advance_vc(end)
        self.vc_trace.append((end, self.vc))
        return self._finalize(end)

    # -- metrics -----------------------------------------------------------

    def _finalize(self, end: SimTime) -> RunMetrics:
        scn = self.scn
        m = RunMetrics(scenario=scn, duration_fs=end)
        m.locked = self.lock_time is not None
        m.lock_time_fs = self.lock_time
        m.vc_trace = self.vc_trace
        m.counter_trace = self.counter_trace
        m.counter_path = self.counter_path
        m.final_hot = self.ring.hot_index
        m.vc_final = self.vc
        m.one_hot_violations = self.one_hot_violations
        m.vc_bound_violations = self.vc_bound_violations
        m.pd_event_count = len(self.pd_events)
        m.first_clean_sample_fs = self.first_clean_sample
        m.excursions = [e for e in self.excursions if e[1] is not None]
        if m.excursions:
            div = self.K * self.T
            m.excursion_max_divided = max((b - a) / div for a, b in m.excursions)
        m.counter_monotone = _is_monotone(self.counter_path, self.N)

        # Sampling phase and oracle comparison (clean clocks only).
        if len(self._phase_hist) >= 8:
            m.sampling_phase_ui = _circular_mean(list(self._phase_hist))
        quiet = (
            scn.tx_sin_amp_ui == 0
            and scn.tx_gauss_sigma_ui == 0
            and (scn.correlated or (scn.rx_sin_amp_ui == 0 and scn.rx_gauss_sigma_ui == 0))
        )
        if quiet and m.sampling_phase_ui is not None and scn.pattern == "prbs15":
            center = _oracle.eye_center_phase(
                BitSource(scn.pattern, derive_seed(scn.seed, 3)),
                scn.n,
                scn.alpha,
                scn.transition_time_ui,
            )
            if not math.isnan(center):
                m.oracle_center_ui = center
                m.phase_error_ui = _oracle.wrap_ui(m.sampling_phase_ui - center)

        # Transfer chain, BER and latency over the delivered stream.
        if len(self.pd_events) >= 2:
            chain = CdtChain(
                period=self.T,
                t_setup=round(scn.t_setup_ui * self.T),
                t_hold=round(scn.t_hold_ui * self.T),
            )
            retime = [ev[2] for ev in self.pd_events[1:]]
            deliveries = cdt_transfer(
                self.pd_events[:-1], retime, self.dll, self.rx_clock, chain
            )
            m.deliveries = deliveries
            m.total_violations = sum(len(d.violations) for d in deliveries)
            if self.lock_time is not None:
                start = self.lock_time
                if self.measure_from_fs is not None:
                    start = max(start, self.measure_from_fs)
                post = [d for d in deliveries if d.t_center >= start]
                good = [d for d in post if d.t_deliver > 0]
                m.ber_bits = len(post)
                m.ber_errors = sum(
                    1 for d in good if d.value != self.bits.bit(d.bit_id)
                ) + sum(1 for d in post if d.t_deliver <= 0)
                m.missed_deliveries_post_lock = sum(
                    1 for d in post if d.t_deliver <= 0
                )
                m.post_lock_violations = sum(len(d.violations) for d in post)
                if good:
                    lats = [d.latency / self.T for d in good]
                    m.latency_max_t = max(lats)
                    m.latency_mean_t = sum(lats) / len(lats)
                    hist: dict[float, int] = {}
                    for x in lats:
                        b = round(int(x * 10) / 10, 1)
                        hist[b] = hist.get(b, 0) + 1
                    m.latency_hist = sorted(hist.items())
                vs = [v for t, v in self.vc_trace if t >= start]
                if vs:
                    m.vc_peak_to_peak_post_lock = max(vs) - min(vs)

        if self.collect_eye and self.lock_time is not None:
            m.eye_hist = self._eye_histogram()
        return m

    def _eye_histogram(self, n_bits: int = 512) -> list:
        bins = self.scn.eye_bins
        counts: dict[tuple[float, float], int] = {}
        start_bit = self.waveform.bit_at(self.lock_time or 0) + 1
        for j in range(start_bit, start_bit + n_bits):
            base = self.waveform.boundary(j)
            for b in range(bins):
                t = base + round((b + 0.5) * self.T / bins)
                v = round(self.waveform.value_at(t), 3)
                key = (round((b + 0.5) / bins, 4), v)
                counts[key] = counts.get(key, 0) + 1
        return sorted((p, v, c) for (p, v), c in counts.items())


def _wrap_half(x: float) -> float:
    w = x % 1.0
    return w - 1.0 if w > 0.5 else w


def _is_monotone(path: list[int], n: int) -> bool:
    if len(path) < 2:
        return True
    steps = {(b - a) % n for a, b in zip(path, path[1:])}
    return steps <= {1} or steps <= {n - 1}


def _circular_mean(phases: list[float]) -> float:
    s = sum(math.sin(2 * math.pi * p) for p in phases)
    c = sum(math.cos(2 * math.pi * p) for p in phases)
    return (math.atan2(s, c) / (2 * math.pi)) % 1.0


def run(
    scn: Scenario,
    *,
    collect_eye: bool = False,
    stop_after_lock_us: float | None = None,
    hold_until_us: float | None = None,
    measure_from_us: float | None = None,
) -> RunMetrics:
    """Execute one scenario to completion and collect metrics.

    ``measure_from_us`` pushes the start of the post-lock measurement window
    later than the detector's lock instant (useful when jitter makes the
    lock instant itself fuzzy but the steady state is what matters).
    """
    sim = Simulation(
        scn,
        hold_until_fs=None if hold_until_us is None else round(hold_until_us * 1e9),
        stop_after_lock_fs=(
            None if stop_after_lock_us is None else round(stop_after_lock_us * 1e9)
        ),
        measure_from_fs=(
            None if measure_from_us is None else round(measure_from_us * 1e9)
        ),
        collect_eye=collect_eye,
    )
    return sim.run()


def sweep(
    base: Scenario,
    param: str,
    grid: list,
    *,
    stop_after_lock_us: float | None = None,
) -> list[RunMetrics]:
    """Independent runs over a parameter grid with derived per-point seeds.

    Failures are recorded on the result rather than aborting the sweep.
    """
    from .scenario import apply_settings

    results = []
    for i, value in enumerate(grid):
        try:
            scn = apply_settings(base, {param: str(value)})
            scn = replace(scn, seed=derive_seed(base.seed, i))
            results.append(run(scn, stop_after_lock_us=stop_after_lock_us))
        except Exception as e:  # record per-point failures, keep sweeping
            m = RunMetrics(scenario=base, error=f"{type(e).__name__}: {e}")
            results.append(m)
    return results


@dataclass
class FalseLockReport:
    alpha_used: float
    hold_dvc_max: float
    hold_locked: bool
    stochastic_runs: list  # (seed, escaped, escape_after_switch_us, lock_us)
    restored_runs: list    # (seed, dwell_us, lock_us)

    @property
    def all_stochastic_escaped_and_locked(self) -> bool:
        return all(e and (l is not None) for _, e, _, l in self.stochastic_runs)

    @property
    def restored_never_false_locked(self) -> bool:
        return all(
            (dw is not None and dw < 0.05 and l is not None)
            for _, dw, l in self.restored_runs
        )


def false_lock_alpha(scn: Scenario) -> float:
    """Channel alpha that parks the cold-start sampling edge on transitions."""
    v_low, v_high = scn.window()
    curve = VcdlCurve(
        d_min=round(scn.d_min_ui * scn.period),
        phase_step=round(scn.period / scn.n_phases),
        v_low=v_low,
        v_high=v_high,
        corner=scn.corner,
        shape=scn.vcdl_shape,
        corner_mult={
            "FF": scn.mult_ff,
            "TT": scn.mult_tt,
            "SS": scn.mult_ss,
            "FNSP": scn.mult_fnsp,
            "SNFP": scn.mult_snfp,
        },
    )
    d = vcdl_delay(scn.vc_start(), curve)
    return (d % scn.period) / scn.period


def false_lock_experiment(
    scn: Scenario,
    *,
    phase1_us: float = 2.0,
    n_seeds: int = 20,
    run_us: float = 8.0,
) -> FalseLockReport:
    """Three-legged study of the half-period unstable equilibrium.

    Leg 1 holds every metastable sample at its previous value, pinning the
    loop at the wrong edge: the control voltage must stay put and no lock
    may be declared.  Leg 2 repeats the hold phase, then switches the
    comparators to random resolution: every seed must escape the
    equilibrium and lock.  Leg 3 restores a snapshot near the correct
    lock: the loop must never dwell at the false equilibrium.
    """
    alpha = false_lock_alpha(scn)
    base = replace(
        scn,
        alpha=alpha,
        pattern="alternating",
        duration_us=max(phase1_us, scn.duration_us),
    )

    hold_scn = replace(base, resolution="hold", duration_us=phase1_us)
    hold_m = run(hold_scn)
    v0 = hold_scn.vc_start()
    dvc = max((abs(v - v0) for _, v in hold_m.vc_trace), default=0.0)

    stoch_runs = []
    for i in range(n_seeds):
        s = replace(
            base,
            duration_us=phase1_us + run_us,
            seed=derive_seed(scn.seed, 100 + i),
        )
        mm = run(s, hold_until_us=phase1_us, stop_after_lock_us=0.5)
        escaped = mm.first_clean_sample_fs is not None
        stoch_runs.append(
            (
                s.seed,
                escaped,
                None if not escaped
                else mm.first_clean_sample_fs / 1e9 - phase1_us,
                None if mm.lock_time_fs is None else mm.lock_time_fs / 1e9,
            )
        )

    # Reference lock for the snapshot leg: same channel, random resolution.
    ref = run(
        replace(base, resolution="stochastic", duration_us=run_us,
                seed=derive_seed(scn.seed, 99)),
        stop_after_lock_us=0.5,
    )
    restored_runs = []
    if ref.locked:
        for i in range(n_seeds):
            s = replace(
                base,
                resolution="stochastic",
                duration_us=run_us,
                seed=derive_seed(scn.seed, 200 + i),
                snapshot_hot=ref.final_hot,
            )
            mm = run(s, stop_after_lock_us=0.5)
            dwell = (
                None
                if mm.first_clean_sample_fs is None
                else mm.first_clean_sample_fs / 1e9
            )
            restored_runs.append(
                (
                    s.seed,
                    dwell,
                    None if mm.lock_time_fs is None else mm.lock_time_fs / 1e9,
                )
            )

    return FalseLockReport(
        alpha_used=alpha,
        hold_dvc_max=dvc,
        hold_locked=hold_m.locked,
        stochastic_runs=stoch_runs,
        restored_runs=restored_runs,
    )
