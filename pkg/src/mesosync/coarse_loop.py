"""Window comparator, coarse control FSM, one-hot ring counter, snapshots.

Direction convention: the ring's ``up`` direction advances the hot index by
one, which selects the next-later DLL phase.  A control voltage above the
window therefore commands an up count paired with a strong discharge
(``dn_strong``); below the window, a down count paired with ``up_strong``.
The paired strong pulse lasts one divided cycle unless the comparator
reports re-entry first (asynchronous reset path).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .timebase import FS_PER_NS, SimTime

ABOVE = "above"
WITHIN = "within"
BELOW = "below"

UP = "up"
DOWN = "down"


@dataclass(frozen=True)
class WindowComparator:
    v_low: float
    v_high: float
    trip_delay: SimTime = 6 * FS_PER_NS

    def __post_init__(self):
        if self.v_low >= self.v_high:
            raise ValueError("window thresholds out of order")
        if self.trip_delay < 0:
            raise ValueError("trip delay must be >= 0")


def window_classify(v_c: float, w: WindowComparator) -> str:
    """Instantaneous region of ``v_c``; thresholds themselves count as within.

    The comparator output becomes visible ``trip_delay`` after the crossing
    instant; the event scheduling for that lag lives in the harness.
    """
    if v_c > w.v_high:
        return ABOVE
    if v_c < w.v_low:
        return BELOW
    return WITHIN


@dataclass(frozen=True)
class RingCounter:
    """N-bit one-hot word; preset state is Q0."""

    n: int = 10
    q: int = 1  # one-hot word, bit i set <=> Q_i

    def __post_init__(self):
        _check_one_hot(self.q, self.n)

    @property
    def hot_index(self) -> int:
        return self.q.bit_length() - 1


def _check_one_hot(q: int, n: int) -> None:
    if n <= 0:
        raise ValueError("ring width must be positive")
    if q <= 0 or q >= (1 << n) or (q & (q - 1)) != 0:
        raise ValueError(f"ring word {q:#x} is not one-hot in {n} bits")


def ring_step(r: RingCounter, direction: str) -> RingCounter:
    """Cyclic shift of the hot bit: up -> index+1 mod N, down -> index-1."""
    _check_one_hot(r.q, r.n)
    if direction == UP:
        idx = (r.hot_index + 1) % r.n
    elif direction == DOWN:
        idx = (r.hot_index - 1) % r.n
    else:
        raise ValueError(f"unknown ring direction: {direction!r}")
    return RingCounter(r.n, 1 << idx)


@dataclass(frozen=True)
class Snapshot:
    q: int
    n: int
    v_c: float | None = None

    def __post_init__(self):
        _check_one_hot(self.q, self.n)


def snapshot_save(r: RingCounter, v_c: float | None = None) -> Snapshot:
    return Snapshot(q=r.q, n=r.n, v_c=v_c)


def snapshot_restore(s: Snapshot) -> RingCounter:
    """Preset the counter from a saved lock state (rejects non-one-hot)."""
    return RingCounter(s.n, s.q)


@dataclass(frozen=True)
class CoarseFsm:
    """State of the divided-clock control logic.

    ``enable`` mirrors the comparator being out of window (after its trip
    delay); ``up_dn`` is the direction flag, asserted for the above-window
    case.  At most one strong signal is ever asserted.
    """

    k_divide: int = 16
    enable: int = 0
    up_dn: int = 0
    up_strong: int = 0
    dn_strong: int = 0


def fsm_step(
    f: CoarseFsm, classification: str, divided_clock_edge: bool
) -> tuple[CoarseFsm, bool, str | None, int, int]:
    """Advance the control logic.

    Call on every divided-clock active edge (``divided_clock_edge=True``)
    and on comparator transitions (False) for the asynchronous reset path.
    Returns (state', ring_enable, ring_dir, up_strong, dn_strong); the ring
    steps only on divided edges while out of window.
    """
    if classification == WITHIN:
        new = replace(f, enable=0, up_dn=0, up_strong=0, dn_strong=0)
        return new, False, None, 0, 0
    above = classification == ABOVE
    if not divided_clock_edge:
        # Comparator asserted between edges: arm the FSM only.
        new = replace(f, enable=1, up_dn=1 if above else 0)
        return new, False, None, f.up_strong, f.dn_strong
    if above:
        new = replace(f, enable=1, up_dn=1, up_strong=0, dn_strong=1)
        return new, True, UP, 0, 1
    new = replace(f, enable=1, up_dn=0, up_strong=1, dn_strong=0)
    return new, True, DOWN, 1, 0
