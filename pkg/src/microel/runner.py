"""Run dispatch: picks the compiled kernel when the extension built,
falls back to the pure-Python engine otherwise.

Both engines fill the same column arrays and are bit-identical; the choice
only affects speed.  Select explicitly with run(..., engine=...) or the
MICROEL_ENGINE environment variable ("compiled" / "python").
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import engine as _pure
from .engine import EngineResult
from .scenario import Scenario
from .trace import Trace

try:
    from . import _kernel
except ImportError:  # extension not built; pure Python still works
    _kernel = None

ENGINE_PYTHON = "python"
ENGINE_COMPILED = "compiled"


def compiled_available() -> bool:
    return _kernel is not None


def default_engine() -> str:
    return ENGINE_COMPILED if compiled_available() else ENGINE_PYTHON


def resolve_engine(name: str | None) -> str:
    if name is None or name == "auto":
        name = os.environ.get("MICROEL_ENGINE", "auto")
        if name == "auto":
            name = default_engine()
    if name == ENGINE_COMPILED and not compiled_available():
        raise RuntimeError("compiled kernel not available (extension not built)")
    if name not in (ENGINE_PYTHON, ENGINE_COMPILED):
        raise ValueError(f"unknown engine: {name!r}")
    return name


@dataclass(frozen=True)
class RunSummary:
    delivered_samples: int
    dropped_samples: int
    violations: int
    max_gap: float
    final_gap: float
    mean_abs_acquisition_error: float
    pulses_emitted: int


@dataclass(frozen=True)
class RunResult:
    scenario: Scenario
    engine: str
    trace: Trace
    summary: RunSummary


def _noise(sc: Scenario) -> np.ndarray:
    if sc.wear.noise_amplitude > 0.0:
        rng = np.random.Generator(np.random.PCG64(sc.wear.rng_seed))
        return rng.uniform(
            -sc.wear.noise_amplitude, sc.wear.noise_amplitude, sc.duration_ticks
        )
    return np.zeros(sc.duration_ticks)


def _rate_schedule(sc: Scenario) -> tuple[np.ndarray, np.ndarray]:
    if sc.wear.mode == "constant":
        return np.array([0.0]), np.array([sc.wear.rate])
    bp = np.array(sc.wear.breakpoints, dtype=np.float64)
    return np.ascontiguousarray(bp[:, 0]), np.ascontiguousarray(bp[:, 1])


def run(sc: Scenario, engine: str | None = None) -> RunResult:
    """Simulate a scenario end to end; deterministic for a given scenario."""
    chosen = resolve_engine(engine)
    trace = Trace(sc.duration_ticks)
    noise = _noise(sc)
    if chosen == ENGINE_COMPILED:
        bp_t, bp_r = _rate_schedule(sc)
        delivered, dropped, violations, pulses, err_sum = _kernel.run_trace(
            sc, trace.columns, noise, bp_t, bp_r
        )
        result = EngineResult(delivered, dropped, violations, pulses, err_sum)
    else:
        result = _pure.run_trace(sc, trace, noise)

    gap = trace.col("gap")
    summary = RunSummary(
        delivered_samples=result.delivered_samples,
        dropped_samples=result.dropped_samples,
        violations=result.violations,
        max_gap=float(gap.max()) if len(trace) else 0.0,
        final_gap=float(gap[-1]) if len(trace) else 0.0,
        mean_abs_acquisition_error=(
            float(result.acquisition_error_sum) / result.delivered_samples
            if result.delivered_samples
            else 0.0
        ),
        pulses_emitted=result.pulses_emitted,
    )
    return RunResult(scenario=sc, engine=chosen, trace=trace, summary=summary)
