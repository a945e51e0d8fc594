"""Charge-pump integration onto the loop filter and the VCDL transfer curve.

Sign conventions used throughout the simulator (fixed here, in one place):

* the pump's ``up`` input sources current, so asserting it raises Vc;
* the VCDL delay is monotonically increasing in Vc;
* consequently the loop charges Vc when the sampling clock is early
  (needs more delay) and discharges when late, and a Vc excursion above
  the window selects the next-later DLL phase together with a strong
  discharge pulse (the mirror case below the window).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .timebase import FS_PER_SECOND, SimTime, clamp_voltage


@dataclass(frozen=True)
class PumpConfig:
    i_weak: float = 1e-6        # amperes
    strong_ratio: float = 16.0
    c_filter: float = 200e-15   # farads
    v_dd: float = 1.2

    def __post_init__(self):
        if min(self.i_weak, self.strong_ratio, self.c_filter, self.v_dd) <= 0:
            raise ValueError("pump parameters must be positive")
        if self.strong_ratio < 1:
            raise ValueError("strong_ratio must be >= 1")

    @property
    def weak_slope_v_per_fs(self) -> float:
        return self.i_weak / self.c_filter / FS_PER_SECOND

    def window(self) -> tuple[float, float]:
        """Window comparator thresholds (v_dd/4, 3*v_dd/4)."""
        return self.v_dd / 4.0, 3.0 * self.v_dd / 4.0


@dataclass
class FineLoopState:
    v_c: float
    weak_gated_off: bool = False


def pump_integrate(
    state: FineLoopState,
    up: int,
    dn: int,
    up_strong: int,
    dn_strong: int,
    dt: SimTime,
    cfg: PumpConfig,
) -> FineLoopState:
    """Advance Vc over ``dt`` ticks of constant pump drive, then clamp.

    The weak pump is gated off whenever either strong signal is asserted.
    Exact over any segmentation of the interval: integrating dt1 then dt2
    equals integrating dt1+dt2 while Vc stays off the rails.
    """
    if dt < 0:
        raise ValueError("dt must be >= 0")
    if up_strong and dn_strong:
        raise ValueError("up_strong and dn_strong may not be asserted together")
    strong_on = bool(up_strong or dn_strong)
    i = 0.0
    if not strong_on:
        i += cfg.i_weak * ((1 if up else 0) - (1 if dn else 0))
    i += cfg.strong_ratio * cfg.i_weak * (
        (1 if up_strong else 0) - (1 if dn_strong else 0)
    )
    v = state.v_c + i * dt / FS_PER_SECOND / cfg.c_filter
    return FineLoopState(clamp_voltage(v, cfg.v_dd), strong_on)


CORNERS = ("SS", "TT", "FF", "FNSP", "SNFP")

# Range multipliers in DLL phase steps: designed so the fastest corner spans
# exactly one step, typical spans two, slow corners up to 2.6.
DEFAULT_CORNER_MULT = {"FF": 1.0, "TT": 2.0, "SS": 2.6, "FNSP": 2.3, "SNFP": 2.3}

LINEAR = "linear"
SATURATING = "saturating"

_TANH1 = math.tanh(1.0)


def _shape(kind: str, x: float) -> float:
    if kind == LINEAR:
        return x
    if kind == SATURATING:
        # Smooth monotone S-curve through (0,0) and (1,1).
        return (math.tanh(2.0 * (x - 0.5)) + _TANH1) / (2.0 * _TANH1)
    raise ValueError(f"unknown VCDL shape: {kind!r}")


@dataclass(frozen=True)
class VcdlCurve:
    """Monotone Vc-to-delay map over the comparator window [v_low, v_high]."""

    d_min: SimTime
    phase_step: SimTime           # one DLL step, T/N
    v_low: float
    v_high: float
    corner: str = "TT"
    shape: str = LINEAR
    corner_mult: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_CORNER_MULT)
    )

    def __post_init__(self):
        if self.corner not in self.corner_mult:
            raise ValueError(f"unknown corner: {self.corner!r}")
        if self.v_low >= self.v_high:
            raise ValueError("v_low must be below v_high")

    @property
    def range_fs(self) -> SimTime:
        return round(self.corner_mult[self.corner] * self.phase_step)


def vcdl_delay(v_c: float, curve: VcdlCurve) -> SimTime:
    """Delay through the line at control voltage ``v_c`` (input clamped)."""
    v = min(max(v_c, curve.v_low), curve.v_high)
    x = (v - curve.v_low) / (curve.v_high - curve.v_low)
    return curve.d_min + round(curve.range_fs * _shape(curve.shape, x))
