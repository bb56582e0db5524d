"""Binary display: eight LEDs mirroring the most recent converted code.

The LEDs are wired to the converter, not to the host link, so the pattern
updates the tick a conversion completes (end of BUSY), regardless of whether
the host has read the sample yet.
"""

from __future__ import annotations

from dataclasses import dataclass

from .adc import AdcCode


@dataclass(frozen=True)
class DisplayState:
    leds: tuple[bool, ...] = (False,) * 8  # index 0 = least significant bit
    last_update_tick: int = -1

    def __post_init__(self):
        if len(self.leds) != 8:
            raise ValueError("exactly 8 LEDs")


def update_display(code: AdcCode | int, tick: int = 0) -> DisplayState:
    """LED pattern for a freshly completed code."""
    c = code.code if isinstance(code, AdcCode) else code
    if not 0 <= c <= 0xFF:
        raise ValueError(f"code out of range: {c}")
    return DisplayState(tuple(bool(c >> i & 1) for i in range(8)), tick)


def leds_as_int(state: DisplayState) -> int:
    return sum(1 << i for i, lit in enumerate(state.leds) if lit)


def leds_as_bits(state: DisplayState) -> str:
    """8-character 0/1 rendering, bit 7 first (as written into traces)."""
    return format(leds_as_int(state), "08b")
