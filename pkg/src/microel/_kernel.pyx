# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled tick loop.

Line-for-line transliteration of engine.run_trace(); see that module's
docstring for the normative per-tick ordering.  Every floating-point
expression keeps the exact operand order of the pure-Python engine and the
extension is built with -ffp-contract=off, so traces are bit-identical
between the two engines (the parity tests enforce this).
"""

from libc.math cimport M_PI, NAN, fabs, floor, sin


# device handshake states
cdef enum:
    D_IDLE = 0
    D_CONVERTING = 1
    D_LOW_READY = 2
    D_LOW_WAIT = 3
    D_HIGH_READY = 4
    D_HIGH_WAIT = 5

# host states
cdef enum:
    H_REQUEST = 0
    H_AWAIT_LOW = 1
    H_AWAIT_HIGH = 2
    H_DONE = 3

# compensator modes
cdef enum:
    M_LOCKED_IDLE = 0
    M_RELEASING = 1
    M_COMPENSATING = 2
    M_ENGAGING = 3


def run_trace(sc, columns, double[::1] noise, double[::1] bp_t, double[::1] bp_r):
    """Fill the trace columns for the whole scenario.

    Returns (delivered, dropped, violations, pulses_emitted, err_sum).
    bp_t/bp_r are the wear-rate schedule (a single row for constant mode).
    """
    cdef Py_ssize_t n = sc.duration_ticks
    cdef double dt = sc.tick_seconds
    cdef double delta = sc.delta_per_pulse

    cdef double v_contact = sc.transducer.v_contact
    cdef double sensitivity = sc.transducer.sensitivity
    cdef double v_floor = sc.transducer.v_floor

    cdef long period = sc.adc.sample_period_ticks
    cdef long conversion_ticks = sc.adc.conversion_ticks
    cdef long timeout = sc.timeout_ticks

    cdef bint sine = sc.source_kind == "sine"
    cdef double omega = 0.0, sine_offset = 0.0, sine_amplitude = 0.0
    if sine:
        omega = 2.0 * M_PI * sc.sine_frequency
        sine_offset = sc.sine_offset
        sine_amplitude = sc.sine_amplitude

    cdef bint adc_detect = sc.detector_source == "adc"
    cdef double gain = sc.detector.gain
    cdef double v_on = sc.detector.v_on
    cdef double v_off = sc.detector.v_off

    cdef long interval = sc.pulse_interval_ticks
    cdef long engage_delay = sc.engage_delay_ticks
    cdef long release_delay = sc.release_delay_ticks

    cdef long long[::1] col_tick = columns["tick"]
    cdef double[::1] col_t = columns["t"]
    cdef double[::1] col_wear = columns["wear_depth"]
    cdef double[::1] col_holder = columns["holder_pos"]
    cdef double[::1] col_gap = columns["gap"]
    cdef double[::1] col_v = columns["transducer_v"]
    cdef double[::1] col_held = columns["held_v"]
    cdef short[::1] col_code = columns["adc_code"]
    cdef signed char[::1] col_sat = columns["saturation"]
    cdef signed char[::1] col_sel = columns["sel"]
    cdef signed char[::1] col_busy = columns["busy"]
    cdef signed char[::1] col_ack = columns["ack"]
    cdef signed char[::1] col_pend = columns["p_end"]
    cdef signed char[::1] col_data = columns["data"]
    cdef unsigned char[::1] col_leds = columns["leds"]
    cdef signed char[::1] col_mode = columns["mode"]
    cdef signed char[::1] col_pulse = columns["pulse"]
    cdef signed char[::1] col_brake = columns["brake_engaged"]
    cdef long long[::1] col_pulses = columns["pulses_emitted"]
    cdef long long[::1] col_dropped = columns["dropped_samples"]
    cdef long long[::1] col_viol = columns["violations"]

    # plant
    cdef double t = 0.0, wd = 0.0, hp = 0.0, g = 0.0
    cdef double gm, v_meas, v_in, cl, a, dv
    cdef Py_ssize_t nbp = bp_t.shape[0]
    cdef Py_ssize_t bp_idx = 0

    # link
    cdef int dstate = D_IDLE, hstate = H_REQUEST
    cdef bint line_sel = 0, line_busy = 0, line_ack = 0, line_pend = 0
    cdef int line_data = 0
    cdef bint prev_sel = 0, new_sel, delivered_event
    cdef int pcode = -1, psat = 0, low_nib = -1, completed_code
    cdef long busy_left = 0, wait_ticks = 0
    cdef double held = NAN
    cdef long long delivered = 0, dropped = 0, violations = 0

    # display
    cdef int leds_reg = 0
    cdef bint have_code = 0

    # compensator
    cdef int mode = M_LOCKED_IDLE
    cdef bint det = 0, brake_engaged = 1, pulse, pending_pulse = 0
    cdef int brake_pending = -1
    cdef long long brake_due = 0, applied_pulses = 0, pulses = 0
    cdef long phase = 0, d
    cdef double err_sum = 0.0

    cdef Py_ssize_t k
    for k in range(n):
        # 1. plant
        if k > 0:
            if pending_pulse:
                applied_pulses += 1
                hp = applied_pulses * delta
                pending_pulse = 0
            while bp_idx + 1 < nbp and t >= bp_t[bp_idx + 1]:
                bp_idx += 1
            wd = wd + bp_r[bp_idx] * dt
            t = t + dt
            g = wd - hp
            if g <= 0.0:
                g = 0.0

        # 2. measurement + converter input
        gm = g + noise[k]
        if gm <= 0.0:
            gm = 0.0
        v_meas = v_contact - sensitivity * gm
        if v_meas < v_floor:
            v_meas = v_floor
        elif v_meas > 5.0:
            v_meas = 5.0
        if sine:
            v_in = sine_offset + sine_amplitude * sin(omega * t)
        else:
            v_in = v_meas

        # 3a. host
        delivered_event = 0
        if hstate == H_REQUEST:
            if line_ack and not line_sel:
                violations += 1
            new_sel = 0
            if k % period == 0:
                new_sel = 1
                hstate = H_AWAIT_LOW
        elif hstate == H_AWAIT_LOW:
            new_sel = line_sel
            if line_ack:
                if line_pend:
                    violations += 1
                    hstate = H_REQUEST
                else:
                    low_nib = line_data
                    hstate = H_AWAIT_HIGH
                new_sel = 0
        elif hstate == H_AWAIT_HIGH:
            new_sel = line_sel
            if line_ack and line_sel:
                if line_pend:
                    delivered += 1
                    delivered_event = 1
                    hstate = H_DONE
                else:
                    violations += 1
                    hstate = H_REQUEST
                low_nib = -1
                new_sel = 0
            elif (not line_ack) and (not line_sel):
                new_sel = 1
        else:  # H_DONE
            new_sel = 0
            hstate = H_REQUEST
        line_sel = new_sel

        # 3b. device
        completed_code = -1
        if dstate == D_IDLE:
            if line_sel and not prev_sel:
                held = v_in
                cl = v_in
                if cl < 0.0:
                    cl = 0.0
                elif cl > 5.0:
                    cl = 5.0
                pcode = <int>floor(cl * 256.0 / 5.0)
                if pcode > 255:
                    pcode = 255
                psat = 1 if (v_in < 0.0 or v_in > 5.0) else 0
                dstate = D_CONVERTING
                busy_left = conversion_ticks
        elif dstate == D_CONVERTING:
            busy_left -= 1
            if busy_left == 0:
                dstate = D_LOW_READY
                wait_ticks = 0
                completed_code = pcode
        elif dstate == D_LOW_READY:
            if not line_sel:
                dstate = D_LOW_WAIT
                wait_ticks = 0
            else:
                wait_ticks += 1
                if wait_ticks >= timeout:
                    dropped += 1
                    dstate = D_IDLE
                    pcode = -1
                    psat = 0
                    wait_ticks = 0
        elif dstate == D_LOW_WAIT:
            if line_sel:
                dstate = D_HIGH_READY
                wait_ticks = 0
            else:
                wait_ticks += 1
                if wait_ticks >= timeout:
                    dropped += 1
                    dstate = D_IDLE
                    pcode = -1
                    psat = 0
                    wait_ticks = 0
        elif dstate == D_HIGH_READY:
            if not line_sel:
                dstate = D_HIGH_WAIT
            else:
                wait_ticks += 1
                if wait_ticks >= timeout:
                    dropped += 1
                    dstate = D_IDLE
                    pcode = -1
                    psat = 0
                    wait_ticks = 0
        else:  # D_HIGH_WAIT
            dstate = D_IDLE
            pcode = -1
            psat = 0
        prev_sel = line_sel

        if dstate == D_CONVERTING:
            line_busy = 1; line_ack = 0; line_pend = 0; line_data = 0
        elif dstate == D_LOW_READY:
            line_busy = 0; line_ack = 1; line_pend = 0; line_data = pcode & 0xF
        elif dstate == D_LOW_WAIT:
            line_busy = 0; line_ack = 0; line_pend = 0; line_data = pcode & 0xF
        elif dstate == D_HIGH_READY:
            line_busy = 0; line_ack = 1; line_pend = 1; line_data = pcode >> 4
        else:  # IDLE, HIGH_WAIT
            line_busy = 0; line_ack = 0; line_pend = 0; line_data = 0

        if delivered_event:
            err_sum += fabs(((pcode + 0.5) * 5.0) / 256.0 - held)

        # 4. display
        if completed_code >= 0:
            leds_reg = completed_code
            have_code = 1

        # 5. compensator
        if adc_detect:
            if have_code:
                dv = ((leds_reg + 0.5) * 5.0) / 256.0
                a = gain * dv
                if a <= v_on:
                    det = 1
                elif a >= v_off:
                    det = 0
        else:
            a = gain * v_meas
            if a <= v_on:
                det = 1
            elif a >= v_off:
                det = 0

        if brake_pending >= 0 and k >= brake_due:
            brake_engaged = brake_pending == 1
            brake_pending = -1
        if mode == M_LOCKED_IDLE:
            if det:
                mode = M_RELEASING
                brake_pending = 0
                d = release_delay
                if d < 1:
                    d = 1
                brake_due = k + d
        elif mode == M_RELEASING:
            if not brake_engaged:
                mode = M_COMPENSATING
                phase = 0
        elif mode == M_COMPENSATING:
            if not det:
                mode = M_ENGAGING
                brake_pending = 1
                d = engage_delay
                if d < 1:
                    d = 1
                brake_due = k + d
        else:  # M_ENGAGING
            if brake_engaged:
                mode = M_LOCKED_IDLE

        pulse = 0
        if mode == M_COMPENSATING:
            if phase <= 0:
                pulse = 1
                pulses += 1
                phase = interval
            phase -= 1
        if pulse:
            pending_pulse = 1

        # 6. record
        col_tick[k] = k
        col_t[k] = t
        col_wear[k] = wd
        col_holder[k] = hp
        col_gap[k] = g
        col_v[k] = v_meas
        col_held[k] = held
        col_code[k] = completed_code
        col_sat[k] = psat if completed_code >= 0 else 0
        col_sel[k] = line_sel
        col_busy[k] = line_busy
        col_ack[k] = line_ack
        col_pend[k] = line_pend
        col_data[k] = line_data
        col_leds[k] = leds_reg
        col_mode[k] = mode
        col_pulse[k] = pulse
        col_brake[k] = brake_engaged
        col_pulses[k] = pulses
        col_dropped[k] = dropped
        col_viol[k] = violations

    return int(delivered), int(dropped), int(violations), int(pulses), err_sum
