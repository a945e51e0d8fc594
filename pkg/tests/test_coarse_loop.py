import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mesosync.coarse_loop import (
    ABOVE,
    BELOW,
    DOWN,
    UP,
    WITHIN,
    CoarseFsm,
    RingCounter,
    Snapshot,
    WindowComparator,
    fsm_step,
    ring_step,
    snapshot_restore,
    snapshot_save,
    window_classify,
)

W = WindowComparator(v_low=0.3, v_high=0.9)


def test_classify_within():
    assert window_classify(0.6, W) == WITHIN


def test_classify_below():
    assert window_classify(0.29, W) == BELOW


def test_classify_above_and_threshold_equality():
    assert window_classify(0.91, W) == ABOVE
    # Sitting exactly on a threshold still counts as inside.
    assert window_classify(0.9, W) == WITHIN
    assert window_classify(0.3, W) == WITHIN


def test_comparator_validation():
    with pytest.raises(ValueError):
        WindowComparator(v_low=0.9, v_high=0.3)


def test_ring_step_basic():
    r = RingCounter(10, 1 << 0)
    assert ring_step(r, UP).hot_index == 1
    assert ring_step(RingCounter(10, 1 << 9), UP).hot_index == 0
    assert ring_step(r, DOWN).hot_index == 9


def test_ring_full_cycle_both_directions():
    # Brute-force: N up-steps and N down-steps each return to the start.
    r = RingCounter(10, 1 << 4)
    s = r
    seen = []
    for _ in range(10):
        s = ring_step(s, UP)
        seen.append(s.hot_index)
    assert s == r
    assert sorted(seen) == list(range(10))
    s = r
    for _ in range(10):
        s = ring_step(s, DOWN)
    assert s == r


def test_ring_rejects_non_one_hot():
    with pytest.raises(ValueError):
        RingCounter(10, 0)
    with pytest.raises(ValueError):
        RingCounter(10, 0b11)
    with pytest.raises(ValueError):
        RingCounter(10, 1 << 10)
    with pytest.raises(ValueError):
        ring_step(RingCounter(10, 1), "sideways")


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=16),
    start=st.integers(min_value=0),
    steps=st.lists(st.sampled_from([UP, DOWN]), max_size=60),
)
def test_ring_one_hot_invariant(n, start, steps):
    r = RingCounter(n, 1 << (start % n))
    idx = start % n
    for d in steps:
        r = ring_step(r, d)
        idx = (idx + (1 if d == UP else -1)) % n
        assert r.q == 1 << idx
        assert bin(r.q).count("1") == 1


def test_fsm_within_holds_state():
    f = CoarseFsm(enable=1, up_dn=1, dn_strong=1)
    f2, stepped, direction, su, sd = fsm_step(f, WITHIN, True)
    assert not stepped and direction is None
    assert (f2.enable, f2.up_dn, su, sd) == (0, 0, 0, 0)


def test_fsm_above_steps_to_next_later_phase_with_strong_down():
    # Control voltage over the top of the window: the fine delay is
    # exhausted long, so the coarse loop advances to the next-later phase
    # while the strong pump discharges for one divided cycle.
    f = CoarseFsm()
    f2, stepped, direction, su, sd = fsm_step(f, ABOVE, True)
    assert stepped and direction == UP
    assert (su, sd) == (0, 1)
    assert (f2.enable, f2.up_dn) == (1, 1)
    r = ring_step(RingCounter(10, 1 << 3), direction)
    assert r.hot_index == 4


def test_fsm_below_steps_to_next_earlier_phase_with_strong_up():
    f = CoarseFsm()
    f2, stepped, direction, su, sd = fsm_step(f, BELOW, True)
    assert stepped and direction == DOWN
    assert (su, sd) == (1, 0)
    assert (f2.enable, f2.up_dn) == (1, 0)


def test_fsm_async_path_arms_without_stepping():
    f = CoarseFsm()
    f2, stepped, direction, su, sd = fsm_step(f, ABOVE, False)
    assert not stepped and direction is None
    assert f2.enable == 1 and f2.up_dn == 1
    assert (su, sd) == (0, 0)


def test_snapshot_round_trip():
    r = RingCounter(10, 1 << 7)
    s = snapshot_save(r, v_c=0.6)
    assert snapshot_restore(s) == r
    assert s.v_c == 0.6


def test_snapshot_rejects_bad_word():
    with pytest.raises(ValueError):
        Snapshot(q=0b101, n=10)


def test_restore_window_center():
    # Restoring with the voltage option presets Vc to the window midpoint.
    lo, hi = 0.3, 0.9
    assert (lo + hi) / 2 == pytest.approx(0.6)
