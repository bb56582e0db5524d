"""Physical model of the worn tool edge, the movable holder, and the contact
transducer.

Units are fixed across the whole simulator: lengths in micrometers, time in
seconds, voltages in volts.  The tool edge recedes (wear_depth grows), the
holder advances radially to chase it (holder_pos grows), and the gap between
them is what the contact transducer senses:

    gap = max(0, wear_depth - holder_pos)

The transducer emits v_contact at zero gap and loses `sensitivity` volts per
micrometer of gap, clamped to [v_floor, 5.0].  The law is linear so it is
invertible on its active range; detection thresholds in volts convert
directly to gap thresholds in micrometers (gap_at_voltage).

Wear itself follows either a constant rate or a piecewise-constant rate
schedule (breakpoints).  Both are exactly integrable, which gives the
closed-loop tests analytic oracles.  The rate is sampled at the start of
each integration step, so schedules whose breakpoints sit on tick
boundaries integrate exactly.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, replace

WEAR_CONSTANT = "constant"
WEAR_PIECEWISE = "piecewise"

V_MAX = 5.0


@dataclass(frozen=True)
class WearModel:
    """Wear law for the tool edge plus transducer measurement noise.

    noise_amplitude is the half-width of uniform additive noise on the gap
    *reading* (the true gap is untouched); zero keeps every trace exact.
    """

    mode: str = WEAR_CONSTANT
    rate: float = 0.0
    breakpoints: tuple[tuple[float, float], ...] = ()
    noise_amplitude: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.mode not in (WEAR_CONSTANT, WEAR_PIECEWISE):
            raise ValueError(f"unknown wear mode: {self.mode!r}")
        if self.noise_amplitude < 0.0:
            raise ValueError("noise_amplitude must be >= 0")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must fit in 64 unsigned bits")
        if self.mode == WEAR_CONSTANT:
            if self.rate < 0.0:
                raise ValueError("wear rate must be >= 0")
        else:
            if not self.breakpoints:
                raise ValueError("piecewise mode needs at least one breakpoint")
            if self.breakpoints[0][0] != 0.0:
                raise ValueError("first breakpoint must sit at t = 0")
            last_t = None
            for t, r in self.breakpoints:
                if last_t is not None and t <= last_t:
                    raise ValueError("breakpoint times must be strictly increasing")
                if r < 0.0:
                    raise ValueError("wear rate must be >= 0 at every breakpoint")
                last_t = t

    def rate_at(self, t: float) -> float:
        """Wear speed in effect at time t (last breakpoint with time <= t)."""
        if self.mode == WEAR_CONSTANT:
            return self.rate
        idx = bisect_right([bp[0] for bp in self.breakpoints], t) - 1
        return self.breakpoints[idx][1]


@dataclass(frozen=True)
class TransducerModel:
    """Linear-with-clamp transfer law of the contact transducer."""

    v_contact: float = 4.0
    sensitivity: float = 1.0
    v_floor: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.v_contact <= V_MAX:
            raise ValueError("v_contact must lie in (0, 5] V")
        if self.sensitivity <= 0.0:
            raise ValueError("sensitivity must be > 0")
        if self.v_floor < 0.0 or self.v_floor >= self.v_contact:
            raise ValueError("v_floor must satisfy 0 <= v_floor < v_contact")


@dataclass(frozen=True)
class PlantState:
    """Snapshot of the physical world at one instant."""

    t: float = 0.0
    wear_depth: float = 0.0
    holder_pos: float = 0.0
    gap: float = 0.0
    transducer_v: float = 0.0

    @classmethod
    def initial(cls, transducer: TransducerModel) -> "PlantState":
        return cls(0.0, 0.0, 0.0, 0.0, transducer_voltage(0.0, transducer))


def transducer_voltage(gap: float, model: TransducerModel) -> float:
    """Voltage emitted at a given (non-negative) gap reading."""
    if gap < 0.0:
        raise ValueError("gap must be >= 0")
    v = model.v_contact - model.sensitivity * gap
    if v < model.v_floor:
        v = model.v_floor
    elif v > V_MAX:
        v = V_MAX
    return v


def gap_at_voltage(v: float, model: TransducerModel) -> float:
    """Inverse transfer on the active range: the gap that produces voltage v."""
    if not model.v_floor <= v <= model.v_contact:
        raise ValueError("voltage outside the transducer's active range")
    return (model.v_contact - v) / model.sensitivity


def _recompute(state: PlantState, transducer: TransducerModel) -> PlantState:
    gap = state.wear_depth - state.holder_pos
    if gap <= 0.0:
        gap = 0.0
    return replace(state, gap=gap, transducer_v=transducer_voltage(gap, transducer))


def advance_wear(
    state: PlantState, model: WearModel, dt: float, transducer: TransducerModel
) -> PlantState:
    """Integrate wear over one step of dt seconds (rate sampled at step start)."""
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    wear = state.wear_depth + model.rate_at(state.t) * dt
    return _recompute(replace(state, t=state.t + dt, wear_depth=wear), transducer)


def set_holder_pos(
    state: PlantState, pos: float, transducer: TransducerModel
) -> PlantState:
    """Place the holder at an absolute position; it never retracts."""
    if pos < state.holder_pos:
        raise ValueError("holder never retracts")
    return _recompute(replace(state, holder_pos=pos), transducer)


def apply_holder_motion(
    state: PlantState, delta: float, transducer: TransducerModel
) -> PlantState:
    """Advance the holder radially by delta micrometers (delta >= 0)."""
    if delta < 0.0:
        raise ValueError("holder motion must be >= 0")
    return set_holder_pos(state, state.holder_pos + delta, transducer)
