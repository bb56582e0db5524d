"""8-bit analog-numeric converter: sample-and-hold plus binary encoding.

The converter quantizes a 0-5 V input onto 256 codes.  The code mapping is
floor-based with the top code clamped, so exactly 5.0 V lands on code 255
and the coverage of [0, v_ref] is gap-free and monotone.  Reconstruction is
mid-rise (+0.5 LSB), which makes the round-trip error symmetric and bounded
by LSB/2 = v_ref/512.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

V_REF = 5.0
BITS = 8
LEVELS = 1 << BITS
LSB = V_REF / LEVELS


@dataclass(frozen=True)
class AdcConfig:
    """Converter timing and range.

    sample_period_ticks is the pattern step: the hold latches only on ticks
    that are multiples of it.  conversion_ticks is the latency between the
    latch and the code becoming available (the BUSY window).
    """

    sample_period_ticks: int
    conversion_ticks: int
    v_ref: float = V_REF
    bits: int = BITS

    def __post_init__(self):
        if self.v_ref != V_REF:
            raise ValueError(f"v_ref is fixed at {V_REF} V, got {self.v_ref}")
        if self.bits != BITS:
            raise ValueError(f"resolution is fixed at {BITS} bits, got {self.bits}")
        if self.conversion_ticks < 1:
            raise ValueError("conversion_ticks must be >= 1")
        if self.sample_period_ticks < self.conversion_ticks:
            raise ValueError("sample_period_ticks must be >= conversion_ticks")


@dataclass(frozen=True)
class AdcCode:
    """One converted sample: the 8-bit code and the tick its hold latched."""

    code: int
    sample_tick: int

    def __post_init__(self):
        if not 0 <= self.code <= LEVELS - 1:
            raise ValueError(f"code out of range: {self.code}")


class SampleHold:
    """The pattern stage: latches the input at sample instants, holds it between."""

    def __init__(self, cfg: AdcConfig):
        self.cfg = cfg
        self.value: float | None = None
        self.latched_tick: int | None = None

    def latch(self, v: float, tick: int) -> float:
        if tick % self.cfg.sample_period_ticks != 0:
            raise ValueError(
                f"tick {tick} is not a sample instant "
                f"(period {self.cfg.sample_period_ticks})"
            )
        self.value = v
        self.latched_tick = tick
        return v


def quantize(v: float, cfg: AdcConfig, sample_tick: int = 0) -> AdcCode:
    """Encode a voltage as an 8-bit code; out-of-range inputs clamp."""
    clamped = v
    if clamped < 0.0:
        clamped = 0.0
    elif clamped > cfg.v_ref:
        clamped = cfg.v_ref
    code = int(math.floor(clamped * 256.0 / cfg.v_ref))
    if code > 255:
        code = 255
    return AdcCode(code, sample_tick)


def saturates(v: float, cfg: AdcConfig) -> bool:
    """True when quantize() had to clamp the input to the conversion range."""
    return v < 0.0 or v > cfg.v_ref


def reconstruct(code: AdcCode | int, cfg: AdcConfig) -> float:
    """Mid-rise voltage estimate of a code (code center, +0.5 LSB)."""
    c = code.code if isinstance(code, AdcCode) else code
    if not 0 <= c <= 255:
        raise ValueError(f"code out of range: {c}")
    return (c + 0.5) * cfg.v_ref / 256.0
