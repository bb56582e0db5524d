"""Wear-compensation control chain: threshold detector, pulse generator,
electromagnet/ratchet/worm/screw kinematics, and the pneumatic brake
interlock.

Mechanics.  One electromagnet stroke advances the ratchet arm by
teeth_per_pulse teeth on a wheel of wheel_teeth teeth; worm_ratio wheel
turns make one turn of the lead screw, which advances the holder by
screw_pitch micrometers per revolution.  The holder displacement per pulse
is therefore

    delta = screw_pitch * teeth_per_pulse / (wheel_teeth * worm_ratio)

Detection.  The transducer voltage (amplified by `gain`) drops as the gap
opens; compensation starts when it falls to v_on and stops when it rises
back to v_off.  The two thresholds form a hysteresis band that prevents
pulse chattering around the contact point.

Sequencing.  The holder rides on rolling guides and must be clamped by the
pneumatic brake whenever it is not being moved, so the controller cycles
LOCKED_IDLE -> RELEASING -> COMPENSATING -> ENGAGING -> LOCKED_IDLE.
Pulses fire only in COMPENSATING.  A brake order placed at tick x completes
at tick x + max(1, delay): even a zero-delay engage lands one tick after the
order, which guarantees the brake can never re-clamp on the same tick a
previously commanded holder motion is still being applied (motion commanded
at tick k lands at tick k+1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum


@dataclass(frozen=True)
class DetectorConfig:
    """Amplifier gain and the two thresholds on the amplified signal."""

    gain: float = 1.0
    v_on: float = 3.8
    v_off: float = 3.95

    def __post_init__(self):
        if self.gain <= 0.0:
            raise ValueError("gain must be > 0")
        if not self.v_on < self.v_off:
            raise ValueError("need v_on < v_off (non-empty hysteresis band)")


@dataclass(frozen=True)
class ActuatorChain:
    """Ratchet arm -> gang wheel -> worm -> lead screw reduction."""

    teeth_per_pulse: int = 1
    wheel_teeth: int = 60
    worm_ratio: int = 40
    screw_pitch: float = 1000.0  # um per screw revolution

    def __post_init__(self):
        if self.teeth_per_pulse < 1:
            raise ValueError("teeth_per_pulse must be >= 1")
        if self.wheel_teeth < 2:
            raise ValueError("wheel_teeth must be >= 2")
        if self.worm_ratio < 1:
            raise ValueError("worm_ratio must be >= 1")
        if self.screw_pitch <= 0.0:
            raise ValueError("screw_pitch must be > 0")


def displacement_per_pulse(chain: ActuatorChain) -> float:
    """Holder advance per electromagnet stroke, in micrometers."""
    return chain.screw_pitch * chain.teeth_per_pulse / (
        chain.wheel_teeth * chain.worm_ratio
    )


def required_frequency(wear_rate: float, chain: ActuatorChain) -> float:
    """Pulse rate at which mean compensation speed equals the wear speed."""
    if wear_rate <= 0.0:
        raise ValueError("wear_rate must be > 0")
    return wear_rate / displacement_per_pulse(chain)


def detector_step(transducer_v: float, cfg: DetectorConfig, prev_active: bool) -> bool:
    """Hysteretic on/off decision on the amplified transducer signal."""
    amplified = cfg.gain * transducer_v
    if amplified <= cfg.v_on:
        return True
    if amplified >= cfg.v_off:
        return False
    return prev_active


@dataclass
class PulseGenerator:
    """Adjustable-frequency generator; fires at most one pulse per tick.

    interval_ticks is the whole-tick realization of the frequency (the tick
    rate must exceed it; validated at scenario load).  phase_ticks counts
    down to the next pulse and is reset to zero whenever compensation
    starts, so the first pulse of a dwell fires immediately.
    """

    frequency: float
    interval_ticks: int
    phase_ticks: int = 0

    def __post_init__(self):
        if self.frequency <= 0.0:
            raise ValueError("frequency must be > 0")
        if self.interval_ticks < 1:
            raise ValueError("interval_ticks must be >= 1 (tick rate too low)")


_RELEASE, _ENGAGE = 0, 1


@dataclass
class BrakeState:
    """Pneumatic brake with actuation lag, driven by engage/release orders."""

    engaged: bool = True
    engage_delay_ticks: int = 0
    release_delay_ticks: int = 0
    pending: int | None = None
    due_tick: int = 0

    def __post_init__(self):
        if self.engage_delay_ticks < 0 or self.release_delay_ticks < 0:
            raise ValueError("brake delays must be >= 0")

    def order(self, engage: bool, tick: int):
        delay = self.engage_delay_ticks if engage else self.release_delay_ticks
        self.pending = _ENGAGE if engage else _RELEASE
        if delay < 1:
            delay = 1
        self.due_tick = tick + delay

    def settle(self, tick: int):
        if self.pending is not None and tick >= self.due_tick:
            self.engaged = self.pending == _ENGAGE
            self.pending = None


class Mode(IntEnum):
    LOCKED_IDLE = 0
    RELEASING = 1
    COMPENSATING = 2
    ENGAGING = 3


@dataclass
class CompensatorFsm:
    """Mode sequencer wrapping the generator and the brake."""

    generator: PulseGenerator
    brake: BrakeState = field(default_factory=BrakeState)
    mode: Mode = Mode.LOCKED_IDLE
    pulses_emitted: int = 0


def compensator_step(
    fsm: CompensatorFsm, detector_active: bool, tick: int
) -> tuple[CompensatorFsm, bool]:
    """Advance the controller one tick; returns (fsm, pulse fired this tick).

    At most one mode transition per tick.  An engage order placed while the
    detector re-activates still completes; the controller then runs a fresh
    release cycle from LOCKED_IDLE.
    """
    brake = fsm.brake
    brake.settle(tick)

    if fsm.mode == Mode.LOCKED_IDLE:
        if detector_active:
            fsm.mode = Mode.RELEASING
            brake.order(engage=False, tick=tick)
    elif fsm.mode == Mode.RELEASING:
        if not brake.engaged:
            fsm.mode = Mode.COMPENSATING
            fsm.generator.phase_ticks = 0
    elif fsm.mode == Mode.COMPENSATING:
        if not detector_active:
            fsm.mode = Mode.ENGAGING
            brake.order(engage=True, tick=tick)
    elif fsm.mode == Mode.ENGAGING:
        if brake.engaged:
            fsm.mode = Mode.LOCKED_IDLE

    pulse = False
    if fsm.mode == Mode.COMPENSATING:
        if fsm.generator.phase_ticks <= 0:
            pulse = True
            fsm.pulses_emitted += 1
            fsm.generator.phase_ticks = fsm.generator.interval_ticks
        fsm.generator.phase_ticks -= 1
    return fsm, pulse
