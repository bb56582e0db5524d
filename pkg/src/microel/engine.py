"""Pure-Python tick loop: the reference engine.

This module defines the normative per-tick ordering; the compiled kernel in
``_kernel.pyx`` is a line-for-line transliteration of it and must produce
bit-identical traces (enforced by the parity tests).

Per-tick order, row k = 0 .. duration_ticks-1 (row 0 is the initial state):

1. plant     - apply the holder motion commanded at tick k-1, then integrate
               wear over one dt.  The holder position is maintained as
               pulse_count * delta so pulse accounting stays exact.
2. measure   - noisy gap reading -> transducer voltage; pick the converter
               input (transducer or the synthetic sine source).
3. link      - host FSM steps first (it sees the device outputs of tick
               k-1), then the device FSM (it sees the SEL just driven).
4. display   - LED register takes the code the tick its conversion
               completes.
5. compensator - detector hysteresis on the chosen signal path, then the
               mode sequencer; a pulse fired here moves the holder at k+1.
6. record    - write row k.

Holding to this order breaks the algebraic loop between sensing and motion:
everything the controller sees at tick k predates its own action at tick k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import compensator as comp
from . import display, link, plant
from .adc import reconstruct
from .scenario import DETECT_ADC, SOURCE_SINE, Scenario
from .trace import Trace


@dataclass(frozen=True)
class EngineResult:
    delivered_samples: int
    dropped_samples: int
    violations: int
    pulses_emitted: int
    acquisition_error_sum: float


def run_trace(sc: Scenario, trace: Trace, noise: np.ndarray) -> EngineResult:
    """Fill `trace` for the whole scenario and return the run counters."""
    n = sc.duration_ticks
    dt = sc.tick_seconds
    delta = sc.delta_per_pulse

    state = plant.PlantState.initial(sc.transducer)
    dev = link.DeviceFsm(adc=sc.adc, timeout_ticks=sc.timeout_ticks)
    host = link.HostFsm(request_period_ticks=sc.adc.sample_period_ticks)
    lines = link.LineStates()
    leds = display.DisplayState()
    have_code = False
    fsm = comp.CompensatorFsm(
        generator=comp.PulseGenerator(
            frequency=sc.pulse_frequency, interval_ticks=sc.pulse_interval_ticks
        ),
        brake=comp.BrakeState(
            engaged=True,
            engage_delay_ticks=sc.engage_delay_ticks,
            release_delay_ticks=sc.release_delay_ticks,
        ),
    )
    detector_active = False

    sine = sc.source_kind == SOURCE_SINE
    if sine:
        omega = 2.0 * math.pi * sc.sine_frequency
        sine_offset = sc.sine_offset
        sine_amplitude = sc.sine_amplitude
    adc_detect = sc.detector_source == DETECT_ADC

    applied_pulses = 0
    pending_pulse = False
    err_sum = 0.0

    c = trace.columns
    col_tick = c["tick"]
    col_t = c["t"]
    col_wear = c["wear_depth"]
    col_holder = c["holder_pos"]
    col_gap = c["gap"]
    col_v = c["transducer_v"]
    col_held = c["held_v"]
    col_code = c["adc_code"]
    col_sat = c["saturation"]
    col_sel = c["sel"]
    col_busy = c["busy"]
    col_ack = c["ack"]
    col_pend = c["p_end"]
    col_data = c["data"]
    col_leds = c["leds"]
    col_mode = c["mode"]
    col_pulse = c["pulse"]
    col_brake = c["brake_engaged"]
    col_pulses = c["pulses_emitted"]
    col_dropped = c["dropped_samples"]
    col_viol = c["violations"]

    for k in range(n):
        # 1. plant
        if k > 0:
            if pending_pulse:
                applied_pulses += 1
                state = plant.set_holder_pos(state, applied_pulses * delta, sc.transducer)
                pending_pulse = False
            state = plant.advance_wear(state, sc.wear, dt, sc.transducer)

        # 2. measurement + converter input
        gap_meas = state.gap + noise[k]
        if gap_meas <= 0.0:
            gap_meas = 0.0
        v_meas = plant.transducer_voltage(gap_meas, sc.transducer)
        if sine:
            v_in = sine_offset + sine_amplitude * math.sin(omega * state.t)
        else:
            v_in = v_meas

        # 3. link (host first: it reacts to last tick's device outputs)
        delivered_before = len(host.received)
        host, lines = link.host_step(host, lines, k)
        dev, lines = link.device_step(dev, lines, k, input_v=v_in)
        if len(host.received) > delivered_before:
            err_sum += abs(reconstruct(dev.pending_code, sc.adc) - dev.held_v)

        # 4. display
        if dev.completed is not None:
            leds = display.update_display(dev.completed, k)
            have_code = True

        # 5. compensator
        if adc_detect:
            if have_code:
                detector_active = comp.detector_step(
                    reconstruct(display.leds_as_int(leds), sc.adc),
                    sc.detector,
                    detector_active,
                )
        else:
            detector_active = comp.detector_step(v_meas, sc.detector, detector_active)
        fsm, pulse = comp.compensator_step(fsm, detector_active, k)
        if pulse:
            pending_pulse = True

        # 6. record
        col_tick[k] = k
        col_t[k] = state.t
        col_wear[k] = state.wear_depth
        col_holder[k] = state.holder_pos
        col_gap[k] = state.gap
        col_v[k] = v_meas
        col_held[k] = math.nan if dev.held_v is None else dev.held_v
        if dev.completed is not None:
            col_code[k] = dev.completed.code
            col_sat[k] = dev.pending_saturated
        else:
            col_code[k] = -1
            col_sat[k] = 0
        col_sel[k] = lines.sel
        col_busy[k] = lines.busy
        col_ack[k] = lines.ack
        col_pend[k] = lines.p_end
        col_data[k] = lines.data
        col_leds[k] = display.leds_as_int(leds)
        col_mode[k] = fsm.mode
        col_pulse[k] = pulse
        col_brake[k] = fsm.brake.engaged
        col_pulses[k] = fsm.pulses_emitted
        col_dropped[k] = dev.dropped_samples
        col_viol[k] = host.violations

    return EngineResult(
        delivered_samples=len(host.received),
        dropped_samples=dev.dropped_samples,
        violations=host.violations,
        pulses_emitted=fsm.pulses_emitted,
        acquisition_error_sum=err_sum,
    )
