"""Per-tick trace storage and its CSV on-disk form.

One record per tick, 21 columns, kept as preallocated numpy arrays so both
engines write the same memory layout.  The CSV form is the external
contract: header exactly in declared order, LF line endings, floats printed
with 9 significant digits, blank cells for "no value yet" (held voltage
before the first latch, the code column outside completion ticks).

Column semantics worth calling out:

* ``adc_code`` / ``saturation`` are event columns: filled only on the tick a
  conversion completes (end of BUSY).
* ``held_v``, ``leds`` and ``mode`` carry their latest value forward.
* ``pulses_emitted`` / ``dropped_samples`` / ``violations`` are cumulative
  counters as of the end of the tick.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .compensator import Mode

FLOAT_FMT = ".9g"

# (name, numpy dtype) in declared column order
COLUMNS: tuple[tuple[str, str], ...] = (
    ("tick", "i8"),
    ("t", "f8"),
    ("wear_depth", "f8"),
    ("holder_pos", "f8"),
    ("gap", "f8"),
    ("transducer_v", "f8"),
    ("held_v", "f8"),
    ("adc_code", "i2"),
    ("saturation", "i1"),
    ("sel", "i1"),
    ("busy", "i1"),
    ("ack", "i1"),
    ("p_end", "i1"),
    ("data", "i1"),
    ("leds", "u1"),
    ("mode", "i1"),
    ("pulse", "i1"),
    ("brake_engaged", "i1"),
    ("pulses_emitted", "i8"),
    ("dropped_samples", "i8"),
    ("violations", "i8"),
)

HEADER = ",".join(name for name, _ in COLUMNS)

_MODE_NAMES = {m.value: m.name for m in Mode}
_MODE_VALUES = {m.name: m.value for m in Mode}


@dataclass(frozen=True)
class TraceRecord:
    """One tick's observables, with blanks decoded to None."""

    tick: int
    t: float
    wear_depth: float
    holder_pos: float
    gap: float
    transducer_v: float
    held_v: float | None
    adc_code: int | None
    saturation: bool
    sel: bool
    busy: bool
    ack: bool
    p_end: bool
    data: int
    leds: int
    mode: Mode
    pulse: bool
    brake_engaged: bool
    pulses_emitted: int
    dropped_samples: int
    violations: int


class TraceInvariantError(AssertionError):
    """A structural invariant failed on a finished trace."""


class Trace:
    """Columnar store of TraceRecords; engines fill it in place."""

    def __init__(self, n: int, columns: dict[str, np.ndarray] | None = None):
        self.n = n
        if columns is None:
            columns = {name: np.zeros(n, dtype=dt) for name, dt in COLUMNS}
        self.columns = columns

    def __len__(self) -> int:
        return self.n

    def col(self, name: str) -> np.ndarray:
        return self.columns[name]

    def record(self, i: int) -> TraceRecord:
        c = self.columns
        held = float(c["held_v"][i])
        code = int(c["adc_code"][i])
        return TraceRecord(
            tick=int(c["tick"][i]),
            t=float(c["t"][i]),
            wear_depth=float(c["wear_depth"][i]),
            holder_pos=float(c["holder_pos"][i]),
            gap=float(c["gap"][i]),
            transducer_v=float(c["transducer_v"][i]),
            held_v=None if math.isnan(held) else held,
            adc_code=None if code < 0 else code,
            saturation=bool(c["saturation"][i]),
            sel=bool(c["sel"][i]),
            busy=bool(c["busy"][i]),
            ack=bool(c["ack"][i]),
            p_end=bool(c["p_end"][i]),
            data=int(c["data"][i]),
            leds=int(c["leds"][i]),
            mode=Mode(int(c["mode"][i])),
            pulse=bool(c["pulse"][i]),
            brake_engaged=bool(c["brake_engaged"][i]),
            pulses_emitted=int(c["pulses_emitted"][i]),
            dropped_samples=int(c["dropped_samples"][i]),
            violations=int(c["violations"][i]),
        )

    def __iter__(self) -> Iterator[TraceRecord]:
        return (self.record(i) for i in range(self.n))

    def to_csv_text(self) -> str:
        c = self.columns
        out = [HEADER]
        for i in range(self.n):
            held = c["held_v"][i]
            code = c["adc_code"][i]
            out.append(
                f"{c['tick'][i]},"
                f"{c['t'][i]:{FLOAT_FMT}},"
                f"{c['wear_depth'][i]:{FLOAT_FMT}},"
                f"{c['holder_pos'][i]:{FLOAT_FMT}},"
                f"{c['gap'][i]:{FLOAT_FMT}},"
                f"{c['transducer_v'][i]:{FLOAT_FMT}},"
                f"{'' if np.isnan(held) else format(held, FLOAT_FMT)},"
                f"{'' if code < 0 else code},"
                f"{c['saturation'][i]},"
                f"{c['sel'][i]},"
                f"{c['busy'][i]},"
                f"{c['ack'][i]},"
                f"{c['p_end'][i]},"
                f"{c['data'][i]},"
                f"{format(c['leds'][i], '08b')},"
                f"{_MODE_NAMES[int(c['mode'][i])]},"
                f"{c['pulse'][i]},"
                f"{c['brake_engaged'][i]},"
                f"{c['pulses_emitted'][i]},"
                f"{c['dropped_samples'][i]},"
                f"{c['violations'][i]}"
            )
        return "\n".join(out) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv_text())


def read_csv(path) -> Trace:
    """Load a trace CSV back into column arrays (blanks become NaN / -1)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != HEADER:
            raise ValueError("unrecognized trace header")
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    n = len(rows)
    trace = Trace(n)
    names = [name for name, _ in COLUMNS]
    for i, cells in enumerate(rows):
        if len(cells) != len(names):
            raise ValueError(f"row {i} has {len(cells)} cells")
        for name, cell in zip(names, cells):
            if name == "held_v":
                trace.columns[name][i] = math.nan if cell == "" else float(cell)
            elif name == "adc_code":
                trace.columns[name][i] = -1 if cell == "" else int(cell)
            elif name == "leds":
                trace.columns[name][i] = int(cell, 2)
            elif name == "mode":
                trace.columns[name][i] = _MODE_VALUES[cell]
            elif name in ("t", "wear_depth", "holder_pos", "gap", "transducer_v"):
                trace.columns[name][i] = float(cell)
            else:
                trace.columns[name][i] = int(cell)
    return trace


def _fail(message: str):
    raise TraceInvariantError(message)


def validate_trace(trace: Trace) -> None:
    """Structural self-checks every finished run must satisfy.

    Covers the cross-column identities (gap law, LED mirror, counters,
    brake/motion interlock, line-level protocol facts).  Raises
    TraceInvariantError on the first failure.
    """
    c = trace.columns
    n = trace.n
    if n == 0:
        return

    gap_expect = np.maximum(0.0, c["wear_depth"] - c["holder_pos"])
    if not np.array_equal(c["gap"], gap_expect):
        _fail("gap != max(0, wear_depth - holder_pos)")
    if np.any(np.diff(c["wear_depth"]) < 0) or np.any(np.diff(c["holder_pos"]) < 0):
        _fail("wear_depth/holder_pos must be monotone non-decreasing")
    v = c["transducer_v"]
    if np.any(v < 0.0) or np.any(v > 5.0):
        _fail("transducer_v outside [0, 5] V")
    if np.any((c["data"] < 0) | (c["data"] > 15)):
        _fail("data lines outside [0, 15]")
    if np.any(c["p_end"].astype(bool) & ~c["ack"].astype(bool)):
        _fail("P.END asserted without ACK")
    for counter in ("pulses_emitted", "dropped_samples", "violations"):
        if np.any(np.diff(c[counter]) < 0):
            _fail(f"{counter} not monotone")
    if np.any(np.diff(c["pulses_emitted"]) > 1):
        _fail("more than one pulse in a tick")

    moved = np.flatnonzero(c["holder_pos"][1:] != c["holder_pos"][:-1]) + 1
    if np.any(c["brake_engaged"][moved]) or np.any(c["brake_engaged"][moved - 1]):
        _fail("holder moved while the brake was engaged")

    locked = c["mode"] == Mode.LOCKED_IDLE
    if np.any(locked & (c["brake_engaged"] == 0)):
        _fail("LOCKED_IDLE with brake released")
    compensating = c["mode"] == Mode.COMPENSATING
    if np.any(compensating & (c["brake_engaged"] == 1)):
        _fail("COMPENSATING with brake engaged")
    if np.any(c["pulse"].astype(bool) & ~compensating):
        _fail("pulse outside COMPENSATING")

    # LEDs mirror the latest completed code
    codes = c["adc_code"]
    done = codes >= 0
    if np.any(done):
        idx = np.maximum.accumulate(np.where(done, np.arange(n), -1))
        seen = idx >= 0
        mirrored = codes[np.maximum(idx, 0)]
        if not np.array_equal(c["leds"][seen], mirrored[seen]):
            _fail("LED register does not mirror the latest completed code")
