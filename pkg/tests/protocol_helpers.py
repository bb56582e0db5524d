"""Scripted hosts for driving the device FSM into corner cases.

The stalling host plays the nominal SEL script up to a chosen handshake
phase and then freezes, which is how the timeout/drop behavior is
exercised.  Stall phases, by the last SEL edge the host still performs:

* "hold_request"  - raises SEL, never lowers it (device waits in LOW_READY)
* "after_low"     - lowers SEL after the first ACK, never re-raises
                    (device waits in LOW_WAIT)
* "hold_high"     - re-raises SEL for the high half, never lowers it
                    (device waits in HIGH_READY)
* "drop_mid_conv" - drops SEL one tick after requesting, then freezes
                    (device falls through LOW_READY into LOW_WAIT and
                    waits there)
"""

from microel.adc import AdcConfig
from microel.link import DeviceFsm, DeviceState, LineStates, device_step

STALL_PHASES = ("hold_request", "after_low", "hold_high", "drop_mid_conv")


class StallingHost:
    """Replays the nominal handshake until `phase`, then freezes SEL."""

    def __init__(self, phase):
        assert phase in STALL_PHASES
        self.phase = phase
        self.stage = "request"
        self.sel = False
        self.started_tick = None

    def step(self, tick, lines):
        if self.stage == "request":
            self.sel = True
            self.started_tick = tick
            self.stage = "frozen" if self.phase == "hold_request" else "await_low"
        elif self.stage == "await_low":
            if self.phase == "drop_mid_conv" and tick == self.started_tick + 1:
                self.sel = False
                self.stage = "frozen"
            elif lines.ack:
                self.sel = False
                self.stage = "frozen" if self.phase == "after_low" else "await_gap"
        elif self.stage == "await_gap":
            if not lines.ack:
                self.sel = True
                self.stage = "frozen"  # only hold_high reaches here
        return self.sel


def run_stall(phase, conversion_ticks=2, timeout_ticks=16, extra_ticks=80):
    """Drive one stalled transfer to the timeout; returns the device FSM."""
    cfg = AdcConfig(sample_period_ticks=8, conversion_ticks=conversion_ticks)
    dev = DeviceFsm(adc=cfg, timeout_ticks=timeout_ticks)
    host = StallingHost(phase)
    lines = LineStates()
    waited_in = set()
    for tick in range(timeout_ticks + conversion_ticks + extra_ticks):
        sel = host.step(tick, lines)
        lines = LineStates(
            sel=sel, busy=lines.busy, ack=lines.ack, p_end=lines.p_end, data=lines.data
        )
        dev, lines = device_step(dev, lines, tick, input_v=2.0)
        waited_in.add(dev.state)
        if dev.dropped_samples:
            break
    return dev, waited_in


def run_clean_transfer(dev, start_tick, code_v=2.0):
    """One nominal transfer against an existing device; returns ticks used."""
    from microel.link import HostFsm, host_step

    host = HostFsm(request_period_ticks=8)
    lines = LineStates()
    tick = start_tick - start_tick % 8 + 8  # next request instant
    for _ in range(64):
        host, lines = host_step(host, lines, tick)
        dev, lines = device_step(dev, lines, tick, input_v=code_v)
        if host.received:
            return host, dev
        tick += 1
    raise AssertionError("transfer never completed")
