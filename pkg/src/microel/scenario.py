"""Scenario files: flat `key = value` lines, `#` comments, keys namespaced
per subsystem.

The format is deliberately flat so that a scenario round-trips byte-exactly
(`print-config`) and every load error can name the offending key and line.
Numbers are rendered with repr(), which float() parses back to the same
value.

Example::

    # equal-rate compensation demo
    tick_seconds = 0.05
    duration_ticks = 12000
    wear.mode = constant
    wear.rate = 0.05
    ...

Units follow the rest of the simulator: micrometers, seconds, volts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .adc import AdcConfig
from .compensator import (
    ActuatorChain,
    DetectorConfig,
    displacement_per_pulse,
)
from .plant import TransducerModel, WearModel

SOURCE_TRANSDUCER = "transducer"
SOURCE_SINE = "sine"
DETECT_ANALOG = "analog"
DETECT_ADC = "adc"


class ScenarioError(ValueError):
    """Raised on any scenario parse or validation failure."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if key is not None:
            prefix += f"{key}: "
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Scenario:
    """Fully validated run configuration for the tick loop."""

    tick_seconds: float
    duration_ticks: int
    source_kind: str
    sine_offset: float | None
    sine_amplitude: float | None
    sine_frequency: float | None
    wear: WearModel
    transducer: TransducerModel
    adc: AdcConfig
    timeout_ticks: int
    detector: DetectorConfig
    detector_source: str
    chain: ActuatorChain
    pulse_frequency: float
    engage_delay_ticks: int
    release_delay_ticks: int

    @property
    def delta_per_pulse(self) -> float:
        return displacement_per_pulse(self.chain)

    @property
    def pulse_interval_ticks(self) -> int:
        return round(1.0 / (self.pulse_frequency * self.tick_seconds))


_INT, _FLOAT, _ENUM, _BREAKPOINTS = "int", "float", "enum", "breakpoints"

# key -> (type, choices) in canonical emission order
_KEYS: dict[str, tuple[str, tuple[str, ...] | None]] = {
    "tick_seconds": (_FLOAT, None),
    "duration_ticks": (_INT, None),
    "source.kind": (_ENUM, (SOURCE_TRANSDUCER, SOURCE_SINE)),
    "source.offset": (_FLOAT, None),
    "source.amplitude": (_FLOAT, None),
    "source.frequency": (_FLOAT, None),
    "wear.mode": (_ENUM, ("constant", "piecewise")),
    "wear.rate": (_FLOAT, None),
    "wear.breakpoints": (_BREAKPOINTS, None),
    "wear.noise_amplitude": (_FLOAT, None),
    "wear.rng_seed": (_INT, None),
    "transducer.v_contact": (_FLOAT, None),
    "transducer.sensitivity": (_FLOAT, None),
    "transducer.v_floor": (_FLOAT, None),
    "adc.sample_period_ticks": (_INT, None),
    "adc.conversion_ticks": (_INT, None),
    "link.timeout_ticks": (_INT, None),
    "detector.source": (_ENUM, (DETECT_ANALOG, DETECT_ADC)),
    "detector.gain": (_FLOAT, None),
    "detector.v_on": (_FLOAT, None),
    "detector.v_off": (_FLOAT, None),
    "chain.teeth_per_pulse": (_INT, None),
    "chain.wheel_teeth": (_INT, None),
    "chain.worm_ratio": (_INT, None),
    "chain.screw_pitch": (_FLOAT, None),
    "pulse.frequency": (_FLOAT, None),
    "brake.engage_delay_ticks": (_INT, None),
    "brake.release_delay_ticks": (_INT, None),
}

_ALWAYS_REQUIRED = (
    "tick_seconds",
    "duration_ticks",
    "wear.mode",
    "transducer.v_contact",
    "transducer.sensitivity",
    "adc.sample_period_ticks",
    "adc.conversion_ticks",
    "detector.gain",
    "detector.v_on",
    "detector.v_off",
    "chain.teeth_per_pulse",
    "chain.wheel_teeth",
    "chain.worm_ratio",
    "chain.screw_pitch",
    "pulse.frequency",
)

_DEFAULTS = {
    "source.kind": SOURCE_TRANSDUCER,
    "wear.noise_amplitude": "0.0",
    "wear.rng_seed": "0",
    "transducer.v_floor": "0.0",
    "link.timeout_ticks": "1000",
    "detector.source": DETECT_ANALOG,
    "brake.engage_delay_ticks": "0",
    "brake.release_delay_ticks": "0",
}


def parse_entries(text: str) -> dict[str, tuple[str, int | None]]:
    """First pass: raw `key -> (value, line)` with syntax checks only."""
    entries: dict[str, tuple[str, int | None]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError("expected `key = value`", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ScenarioError("unknown key", key=key, line=lineno)
        if key in entries:
            raise ScenarioError("duplicate key", key=key, line=lineno)
        if not value:
            raise ScenarioError("empty value", key=key, line=lineno)
        entries[key] = (value, lineno)
    return entries


class _Reader:
    """Typed access to parsed entries, with defaults and error attribution."""

    def __init__(self, entries: dict[str, tuple[str, int | None]]):
        self.entries = entries

    def line(self, key: str) -> int | None:
        return self.entries[key][1] if key in self.entries else None

    def has(self, key: str) -> bool:
        return key in self.entries

    def _raw(self, key: str) -> tuple[str, int | None]:
        if key in self.entries:
            return self.entries[key]
        if key in _DEFAULTS:
            return _DEFAULTS[key], None
        raise ScenarioError("missing required key", key=key)

    def get_int(self, key: str) -> int:
        raw, line = self._raw(key)
        try:
            return int(raw)
        except ValueError:
            raise ScenarioError(f"not an integer: {raw!r}", key=key, line=line) from None

    def get_float(self, key: str) -> float:
        raw, line = self._raw(key)
        try:
            return float(raw)
        except ValueError:
            raise ScenarioError(f"not a number: {raw!r}", key=key, line=line) from None

    def get_enum(self, key: str) -> str:
        raw, line = self._raw(key)
        choices = _KEYS[key][1]
        if raw not in choices:
            raise ScenarioError(
                f"must be one of {', '.join(choices)}; got {raw!r}", key=key, line=line
            )
        return raw

    def get_breakpoints(self, key: str) -> tuple[tuple[float, float], ...]:
        raw, line = self._raw(key)
        points = []
        for item in raw.split(","):
            item = item.strip()
            if ":" not in item:
                raise ScenarioError(
                    f"breakpoints are `time:rate` pairs; got {item!r}", key=key, line=line
                )
            t_text, r_text = item.split(":", 1)
            try:
                points.append((float(t_text), float(r_text)))
            except ValueError:
                raise ScenarioError(
                    f"not a number in breakpoint {item!r}", key=key, line=line
                ) from None
        return tuple(points)

    def check(self, condition: bool, key: str, message: str):
        if not condition:
            raise ScenarioError(message, key=key, line=self.line(key))

    def forbid(self, key: str, message: str):
        if key in self.entries:
            raise ScenarioError(message, key=key, line=self.line(key))


def build_scenario(entries: dict[str, tuple[str, int | None]]) -> Scenario:
    """Second pass: type, validate, and assemble every subsystem config."""
    r = _Reader(entries)
    for key in _ALWAYS_REQUIRED:
        if not r.has(key):
            raise ScenarioError("missing required key", key=key)

    tick_seconds = r.get_float("tick_seconds")
    r.check(tick_seconds > 0.0, "tick_seconds", "must be > 0")
    duration_ticks = r.get_int("duration_ticks")
    r.check(duration_ticks >= 1, "duration_ticks", "must be >= 1")

    source_kind = r.get_enum("source.kind")
    sine_offset = sine_amplitude = sine_frequency = None
    if source_kind == SOURCE_SINE:
        sine_offset = r.get_float("source.offset")
        sine_amplitude = r.get_float("source.amplitude")
        sine_frequency = r.get_float("source.frequency")
        r.check(sine_frequency > 0.0, "source.frequency", "must be > 0")
    else:
        for key in ("source.offset", "source.amplitude", "source.frequency"):
            r.forbid(key, "only valid when source.kind = sine")

    wear_mode = r.get_enum("wear.mode")
    noise_amplitude = r.get_float("wear.noise_amplitude")
    r.check(noise_amplitude >= 0.0, "wear.noise_amplitude", "must be >= 0")
    rng_seed = r.get_int("wear.rng_seed")
    r.check(0 <= rng_seed < 2**64, "wear.rng_seed", "must fit in 64 unsigned bits")
    if wear_mode == "constant":
        r.forbid("wear.breakpoints", "only valid when wear.mode = piecewise")
        rate = r.get_float("wear.rate")
        r.check(rate >= 0.0, "wear.rate", "must be >= 0")
        wear = WearModel(
            mode="constant",
            rate=rate,
            noise_amplitude=noise_amplitude,
            rng_seed=rng_seed,
        )
    else:
        r.forbid("wear.rate", "only valid when wear.mode = constant")
        breakpoints = r.get_breakpoints("wear.breakpoints")
        try:
            wear = WearModel(
                mode="piecewise",
                breakpoints=breakpoints,
                noise_amplitude=noise_amplitude,
                rng_seed=rng_seed,
            )
        except ValueError as exc:
            raise ScenarioError(
                str(exc), key="wear.breakpoints", line=r.line("wear.breakpoints")
            ) from None

    v_contact = r.get_float("transducer.v_contact")
    r.check(0.0 < v_contact <= 5.0, "transducer.v_contact", "must lie in (0, 5] V")
    sensitivity = r.get_float("transducer.sensitivity")
    r.check(sensitivity > 0.0, "transducer.sensitivity", "must be > 0")
    v_floor = r.get_float("transducer.v_floor")
    r.check(
        0.0 <= v_floor < v_contact,
        "transducer.v_floor",
        "must satisfy 0 <= v_floor < v_contact",
    )
    transducer = TransducerModel(v_contact, sensitivity, v_floor)

    conversion_ticks = r.get_int("adc.conversion_ticks")
    r.check(conversion_ticks >= 1, "adc.conversion_ticks", "must be >= 1")
    sample_period = r.get_int("adc.sample_period_ticks")
    r.check(
        sample_period >= conversion_ticks,
        "adc.sample_period_ticks",
        "must be >= adc.conversion_ticks",
    )
    adc = AdcConfig(sample_period_ticks=sample_period, conversion_ticks=conversion_ticks)

    timeout_ticks = r.get_int("link.timeout_ticks")
    r.check(timeout_ticks >= 1, "link.timeout_ticks", "must be >= 1")

    gain = r.get_float("detector.gain")
    r.check(gain > 0.0, "detector.gain", "must be > 0")
    v_on = r.get_float("detector.v_on")
    v_off = r.get_float("detector.v_off")
    r.check(v_on < v_off, "detector.v_on", "must be < detector.v_off")
    detector = DetectorConfig(gain, v_on, v_off)
    detector_source = r.get_enum("detector.source")

    teeth = r.get_int("chain.teeth_per_pulse")
    r.check(teeth >= 1, "chain.teeth_per_pulse", "must be >= 1")
    wheel = r.get_int("chain.wheel_teeth")
    r.check(wheel >= 2, "chain.wheel_teeth", "must be >= 2")
    worm = r.get_int("chain.worm_ratio")
    r.check(worm >= 1, "chain.worm_ratio", "must be >= 1")
    pitch = r.get_float("chain.screw_pitch")
    r.check(pitch > 0.0, "chain.screw_pitch", "must be > 0")
    chain = ActuatorChain(teeth, wheel, worm, pitch)

    pulse_frequency = r.get_float("pulse.frequency")
    r.check(pulse_frequency > 0.0, "pulse.frequency", "must be > 0")
    r.check(
        1.0 / tick_seconds > pulse_frequency,
        "pulse.frequency",
        f"tick rate {1.0 / tick_seconds:g} Hz must exceed the pulse frequency",
    )

    engage_delay = r.get_int("brake.engage_delay_ticks")
    r.check(engage_delay >= 0, "brake.engage_delay_ticks", "must be >= 0")
    release_delay = r.get_int("brake.release_delay_ticks")
    r.check(release_delay >= 0, "brake.release_delay_ticks", "must be >= 0")

    return Scenario(
        tick_seconds=tick_seconds,
        duration_ticks=duration_ticks,
        source_kind=source_kind,
        sine_offset=sine_offset,
        sine_amplitude=sine_amplitude,
        sine_frequency=sine_frequency,
        wear=wear,
        transducer=transducer,
        adc=adc,
        timeout_ticks=timeout_ticks,
        detector=detector,
        detector_source=detector_source,
        chain=chain,
        pulse_frequency=pulse_frequency,
        engage_delay_ticks=engage_delay,
        release_delay_ticks=release_delay,
    )


def load_scenario(text: str) -> Scenario:
    return build_scenario(parse_entries(text))


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def canonical_text(sc: Scenario) -> str:
    """Serialize in canonical key order; load_scenario() round-trips exactly."""
    out: dict[str, str] = {
        "tick_seconds": _fmt(sc.tick_seconds),
        "duration_ticks": _fmt(sc.duration_ticks),
        "source.kind": sc.source_kind,
        "wear.mode": sc.wear.mode,
        "wear.noise_amplitude": _fmt(sc.wear.noise_amplitude),
        "wear.rng_seed": _fmt(sc.wear.rng_seed),
        "transducer.v_contact": _fmt(sc.transducer.v_contact),
        "transducer.sensitivity": _fmt(sc.transducer.sensitivity),
        "transducer.v_floor": _fmt(sc.transducer.v_floor),
        "adc.sample_period_ticks": _fmt(sc.adc.sample_period_ticks),
        "adc.conversion_ticks": _fmt(sc.adc.conversion_ticks),
        "link.timeout_ticks": _fmt(sc.timeout_ticks),
        "detector.source": sc.detector_source,
        "detector.gain": _fmt(sc.detector.gain),
        "detector.v_on": _fmt(sc.detector.v_on),
        "detector.v_off": _fmt(sc.detector.v_off),
        "chain.teeth_per_pulse": _fmt(sc.chain.teeth_per_pulse),
        "chain.wheel_teeth": _fmt(sc.chain.wheel_teeth),
        "chain.worm_ratio": _fmt(sc.chain.worm_ratio),
        "chain.screw_pitch": _fmt(sc.chain.screw_pitch),
        "pulse.frequency": _fmt(sc.pulse_frequency),
        "brake.engage_delay_ticks": _fmt(sc.engage_delay_ticks),
        "brake.release_delay_ticks": _fmt(sc.release_delay_ticks),
    }
    if sc.source_kind == SOURCE_SINE:
        out["source.offset"] = _fmt(sc.sine_offset)
        out["source.amplitude"] = _fmt(sc.sine_amplitude)
        out["source.frequency"] = _fmt(sc.sine_frequency)
    if sc.wear.mode == "constant":
        out["wear.rate"] = _fmt(sc.wear.rate)
    else:
        out["wear.breakpoints"] = ",".join(
            f"{_fmt(t)}:{_fmt(rate)}" for t, rate in sc.wear.breakpoints
        )
    lines = [f"{key} = {out[key]}" for key in _KEYS if key in out]
    return "\n".join(lines) + "\n"
