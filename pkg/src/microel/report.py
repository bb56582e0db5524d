"""Human-readable run summaries and per-column SVG plots."""

from __future__ import annotations

from pathlib import Path

from .runner import RunResult, RunSummary
from .trace import COLUMNS

_UNITS = {
    "max_gap": "um",
    "final_gap": "um",
    "mean_abs_acquisition_error": "V",
}


def summary_text(summary: RunSummary) -> str:
    lines = []
    for name in (
        "delivered_samples",
        "dropped_samples",
        "violations",
        "max_gap",
        "final_gap",
        "mean_abs_acquisition_error",
        "pulses_emitted",
    ):
        value = getattr(summary, name)
        rendered = format(value, ".9g") if isinstance(value, float) else str(value)
        unit = _UNITS.get(name, "")
        lines.append(f"{name:<28} {rendered}{' ' + unit if unit else ''}")
    return "\n".join(lines) + "\n"


def plot_columns(result: RunResult, columns: list[str], out_dir: Path) -> list[Path]:
    """Write one `<column>.svg` per requested trace column."""
    known = {name for name, _ in COLUMNS}
    for name in columns:
        if name not in known:
            raise ValueError(f"unknown trace column: {name!r}")

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir.mkdir(parents=True, exist_ok=True)
    t = result.trace.col("t")
    written = []
    for name in columns:
        fig, ax = plt.subplots(figsize=(8, 3))
        ax.plot(t, result.trace.col(name), drawstyle="steps-post", linewidth=0.9)
        ax.set_xlabel("t [s]")
        ax.set_ylabel(name)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = out_dir / f"{name}.svg"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written
