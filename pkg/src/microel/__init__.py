"""Deterministic discrete-time simulator of the MICROEL 01 data-acquisition
interface (8-bit converter, nibble-multiplexed parallel-port handshake, LED
display) and the knife-wear compensation rig it drives (contact transducer,
threshold detector, pulse generator, ratchet/worm/screw actuation, pneumatic
brake interlock).

The hot tick loop exists twice: a Cython kernel for speed and a pure-Python
reference selected automatically when the extension is missing.  Both
produce bit-identical traces.
"""

from .runner import (
    RunResult,
    RunSummary,
    compiled_available,
    default_engine,
    run,
)
from .scenario import Scenario, ScenarioError, canonical_text, load_scenario
from .trace import Trace, TraceInvariantError, TraceRecord, read_csv, validate_trace

__version__ = "0.1.0"

__all__ = [
    "RunResult",
    "RunSummary",
    "Scenario",
    "ScenarioError",
    "Trace",
    "TraceInvariantError",
    "TraceRecord",
    "canonical_text",
    "compiled_available",
    "default_engine",
    "load_scenario",
    "read_csv",
    "run",
    "validate_trace",
    "__version__",
]
