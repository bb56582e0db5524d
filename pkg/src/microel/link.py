"""Parallel-port read-out: 8-bit codes carried as two 4-bit halves over the
multiplexed data lines, governed by the SEL / BUSY / ACK / P.END handshake.

Line ownership
--------------
The host drives SEL (its request strobe); the device drives BUSY (conversion
in progress), ACK (data lines valid), P.END (this is the second half of the
sample) and the four data lines.

Normative handshake (one transfer)
----------------------------------
=========  =======================  ======================================
device     waits for                action on that event
=========  =======================  ======================================
IDLE       rising edge of SEL       latch input, quantize, raise BUSY
CONVERTING (internal countdown)     after conversion_ticks rows: drop BUSY,
                                    drive the low nibble, raise ACK
LOW_READY  SEL low                  drop ACK
LOW_WAIT   SEL high                 drive the high nibble, raise ACK+P.END
HIGH_READY SEL low                  drop ACK and P.END
HIGH_WAIT  (one row)                return to IDLE
=========  =======================  ======================================

The two sides advance lock-step once per simulator tick, host first: the
host reacts to the device outputs of the previous tick, the device sees the
SEL the host just produced.  Data lines never change while ACK is high.

If the host stops responding, the device waits timeout_ticks rows in any of
the three host-facing states, then deasserts everything, counts the sample
as dropped, and returns to IDLE.  A new transfer then needs a fresh rising
edge of SEL.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

from .adc import AdcCode, AdcConfig, quantize, saturates


def split_code(code: int) -> tuple[int, int]:
    """Split an 8-bit code into (low, high) nibbles; the low half travels first."""
    if not 0 <= code <= 0xFF:
        raise ValueError(f"code out of range: {code}")
    return code & 0xF, code >> 4


def join_halves(low: int, high: int) -> int:
    """Reassemble a code from its nibbles."""
    if not 0 <= low <= 0xF:
        raise ValueError(f"low nibble out of range: {low}")
    if not 0 <= high <= 0xF:
        raise ValueError(f"high nibble out of range: {high}")
    return high * 16 + low


@dataclass(frozen=True)
class LineStates:
    """Instantaneous logic levels on the port."""

    sel: bool = False
    busy: bool = False
    ack: bool = False
    p_end: bool = False
    data: int = 0

    def __post_init__(self):
        if not 0 <= self.data <= 0xF:
            raise ValueError(f"data lines carry a nibble, got {self.data}")
        if self.p_end and not self.ack:
            raise ValueError("P.END is only meaningful while ACK is asserted")


class DeviceState(IntEnum):
    IDLE = 0
    CONVERTING = 1
    LOW_READY = 2
    LOW_WAIT = 3
    HIGH_READY = 4
    HIGH_WAIT = 5


class HostState(IntEnum):
    REQUEST = 0
    AWAIT_LOW = 1
    AWAIT_HIGH = 2
    DONE = 3


@dataclass
class DeviceFsm:
    """Converter-side protocol engine (MUX block plus conversion timing)."""

    adc: AdcConfig
    timeout_ticks: int = 1000
    state: DeviceState = DeviceState.IDLE
    pending_code: AdcCode | None = None
    pending_saturated: bool = False
    held_v: float | None = None
    busy_left: int = 0
    wait_ticks: int = 0
    prev_sel: bool = False
    dropped_samples: int = 0
    # set for exactly one tick when a conversion completes (display hook)
    completed: AdcCode | None = None

    def __post_init__(self):
        if self.timeout_ticks < 1:
            raise ValueError("timeout_ticks must be >= 1")


@dataclass
class HostFsm:
    """Computer-side protocol engine (LPT driver)."""

    request_period_ticks: int
    state: HostState = HostState.REQUEST
    low_nibble: int | None = None
    received: list[tuple[int, int]] = field(default_factory=list)
    violations: int = 0

    def __post_init__(self):
        if self.request_period_ticks < 1:
            raise ValueError("request_period_ticks must be >= 1")


def _device_outputs(fsm: DeviceFsm, sel: bool) -> LineStates:
    s = fsm.state
    if s == DeviceState.CONVERTING:
        return LineStates(sel=sel, busy=True)
    if s == DeviceState.LOW_READY:
        return LineStates(sel=sel, ack=True, data=split_code(fsm.pending_code.code)[0])
    if s == DeviceState.LOW_WAIT:
        return LineStates(sel=sel, data=split_code(fsm.pending_code.code)[0])
    if s == DeviceState.HIGH_READY:
        return LineStates(
            sel=sel, ack=True, p_end=True, data=split_code(fsm.pending_code.code)[1]
        )
    return LineStates(sel=sel)  # IDLE, HIGH_WAIT


def _device_drop(fsm: DeviceFsm):
    fsm.dropped_samples += 1
    fsm.state = DeviceState.IDLE
    fsm.pending_code = None
    fsm.pending_saturated = False
    fsm.wait_ticks = 0


def _device_wait(fsm: DeviceFsm):
    fsm.wait_ticks += 1
    if fsm.wait_ticks >= fsm.timeout_ticks:
        _device_drop(fsm)


def device_step(
    fsm: DeviceFsm, lines: LineStates, tick: int, input_v: float = 0.0
) -> tuple[DeviceFsm, LineStates]:
    """Advance the device one tick against the host's current SEL level.

    input_v is the converter input voltage this tick; it is latched only when
    a new request is accepted.  Returns the fsm (mutated in place) and the
    line levels the device drives for this tick.
    """
    sel = lines.sel
    fsm.completed = None
    s = fsm.state

    if s == DeviceState.IDLE:
        if sel and not fsm.prev_sel:
            fsm.held_v = input_v
            fsm.pending_code = quantize(input_v, fsm.adc, sample_tick=tick)
            fsm.pending_saturated = saturates(input_v, fsm.adc)
            fsm.state = DeviceState.CONVERTING
            fsm.busy_left = fsm.adc.conversion_ticks
    elif s == DeviceState.CONVERTING:
        fsm.busy_left -= 1
        if fsm.busy_left == 0:
            fsm.state = DeviceState.LOW_READY
            fsm.wait_ticks = 0
            fsm.completed = fsm.pending_code
    elif s == DeviceState.LOW_READY:
        if not sel:
            fsm.state = DeviceState.LOW_WAIT
            fsm.wait_ticks = 0
        else:
            _device_wait(fsm)
    elif s == DeviceState.LOW_WAIT:
        if sel:
            fsm.state = DeviceState.HIGH_READY
            fsm.wait_ticks = 0
        else:
            _device_wait(fsm)
    elif s == DeviceState.HIGH_READY:
        if not sel:
            fsm.state = DeviceState.HIGH_WAIT
        else:
            _device_wait(fsm)
    elif s == DeviceState.HIGH_WAIT:
        fsm.state = DeviceState.IDLE
        fsm.pending_code = None
        fsm.pending_saturated = False

    fsm.prev_sel = sel
    return fsm, _device_outputs(fsm, sel)


def host_step(fsm: HostFsm, lines: LineStates, tick: int) -> tuple[HostFsm, LineStates]:
    """Advance the host one tick against the device outputs of the last tick.

    Issues SEL requests on its sample cadence (ticks that are multiples of
    request_period_ticks), captures the two nibbles, and appends (tick, code)
    to `received` when the second ACK arrives with P.END high.  Protocol
    breaches (ACK with no outstanding SEL, P.END on the first half, a second
    half without P.END) are counted in `violations` and abort the transfer.
    """
    sel = lines.sel
    s = fsm.state

    if s == HostState.REQUEST:
        if lines.ack and not sel:
            fsm.violations += 1
        sel = False
        if tick % fsm.request_period_ticks == 0:
            sel = True
            fsm.state = HostState.AWAIT_LOW
    elif s == HostState.AWAIT_LOW:
        if lines.ack:
            if lines.p_end:
                fsm.violations += 1
                fsm.state = HostState.REQUEST
            else:
                fsm.low_nibble = lines.data
                fsm.state = HostState.AWAIT_HIGH
            sel = False
    elif s == HostState.AWAIT_HIGH:
        if lines.ack and sel:
            if lines.p_end:
                fsm.received.append((tick, join_halves(fsm.low_nibble, lines.data)))
                fsm.state = HostState.DONE
            else:
                fsm.violations += 1
                fsm.state = HostState.REQUEST
            fsm.low_nibble = None
            sel = False
        elif not lines.ack and not sel:
            sel = True  # re-request: fetch the high half
    elif s == HostState.DONE:
        sel = False
        fsm.state = HostState.REQUEST

    return fsm, LineStates(
        sel=sel, busy=lines.busy, ack=lines.ack, p_end=lines.p_end, data=lines.data
    )


@dataclass
class ConformanceReport:
    """Tallies from a scripted transfer run, for protocol conformance checks."""

    sent: list[int]
    received: list[tuple[int, int]]
    dropped: int
    violations: int
    ack_pulses: int
    p_end_pulses: int
    busy_ticks: int
    conversion_ticks: int
    data_stable_under_ack: bool
    trace: list[LineStates]

    @property
    def received_codes(self) -> list[int]:
        return [code for _, code in self.received]

    def ok(self) -> bool:
        n = len(self.sent)
        return (
            self.received_codes == self.sent
            and self.dropped == 0
            and self.violations == 0
            and self.ack_pulses == 2 * n
            and self.p_end_pulses == n
            and self.busy_ticks == n * self.conversion_ticks
            and self.data_stable_under_ack
        )


def run_conformance(
    codes: list[int],
    conversion_ticks: int = 1,
    request_period: int = 8,
    timeout_ticks: int = 64,
) -> ConformanceReport:
    """Push a list of codes through a nominal device/host pair, lock-step.

    The device input voltage for each transfer is the mid-rise reconstruction
    of the wanted code, which quantizes back to exactly that code, so the
    full converter path is exercised rather than bypassed.
    """
    from .adc import reconstruct

    cfg = AdcConfig(sample_period_ticks=request_period, conversion_ticks=conversion_ticks)
    dev = DeviceFsm(adc=cfg, timeout_ticks=timeout_ticks)
    host = HostFsm(request_period_ticks=request_period)
    lines = LineStates()

    n_ticks = (len(codes) + 2) * request_period
    trace: list[LineStates] = []
    next_code = 0
    ack_pulses = 0
    p_end_pulses = 0
    busy_ticks = 0
    stable = True
    prev = LineStates()

    for tick in range(n_ticks):
        if next_code < len(codes):
            v = reconstruct(codes[next_code], cfg)
        else:
            v = 0.0
        was_idle = dev.state == DeviceState.IDLE
        host, lines = host_step(host, lines, tick)
        dev, lines = device_step(dev, lines, tick, input_v=v)
        if was_idle and dev.state == DeviceState.CONVERTING:
            next_code += 1
        if lines.ack and not prev.ack:
            ack_pulses += 1
        if lines.p_end and not prev.p_end:
            p_end_pulses += 1
        if lines.busy:
            busy_ticks += 1
        if lines.ack and prev.ack and lines.data != prev.data:
            stable = False
        trace.append(lines)
        prev = lines
        if next_code >= len(codes) and dev.state == DeviceState.IDLE and len(
            host.received
        ) + dev.dropped_samples >= len(codes):
            break

    return ConformanceReport(
        sent=list(codes),
        received=list(host.received),
        dropped=dev.dropped_samples,
        violations=host.violations,
        ack_pulses=ack_pulses,
        p_end_pulses=p_end_pulses,
        busy_ticks=busy_ticks,
        conversion_ticks=conversion_ticks,
        data_stable_under_ack=stable,
        trace=trace,
    )
