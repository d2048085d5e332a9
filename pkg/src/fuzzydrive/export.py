"""Trace export: CSV for analysis, SVG for a quick look at the run."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .sim import Trace

CSV_COLUMNS = (
    ("t", "s"),
    ("accel", "frac"),
    ("brake", "frac"),
    ("reverse", "bool"),
    ("v_eng", "V"),
    ("v_mot", "V"),
    ("omega2", "rad/s"),
    ("omega5", "rad/s"),
    ("omega_arm", "rad/s"),
    ("flc_engine_v", "V"),
    ("flc_motor_v", "V"),
    ("mode", "-"),
    ("no_fire", "bool"),
)
_FLOAT_FORMAT = "%.12g"


def trace_to_csv(trace: Trace) -> str:
    """Render a trace as CSV text; byte-identical for identical traces."""
    lines = [
        "# fuzzydrive trace",
        "# units: " + ", ".join(f"{name}={unit}" for name, unit in CSV_COLUMNS),
        f"# numbers formatted with {_FLOAT_FORMAT}",
        ",".join(name for name, _ in CSV_COLUMNS),
    ]
    fmt = _FLOAT_FORMAT
    for k in range(len(trace)):
        row = (
            fmt % trace.time[k],
            fmt % trace.accel[k],
            fmt % trace.brake[k],
            "1" if trace.reverse[k] else "0",
            fmt % trace.v_engine[k],
            fmt % trace.v_motor[k],
            fmt % trace.omega_engine[k],
            fmt % trace.omega_motor[k],
            fmt % trace.omega_arm[k],
            fmt % trace.flc_engine_v[k],
            fmt % trace.flc_motor_v[k],
            str(trace.mode[k]),
            "1" if trace.no_fire[k] else "0",
        )
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def export_csv(trace: Trace, path) -> None:
    """Write the trace as CSV (header only for an empty trace)."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(trace_to_csv(trace))


def export_plot(trace: Trace, path, title: str = "") -> None:
    """Write an SVG of the three shaft speeds versus time, shared axes."""
    if len(trace) == 0:
        raise ValueError("cannot plot an empty trace")
    fig, ax = plt.subplots(figsize=(9, 5))
    ax.plot(trace.time, trace.omega_engine, label=r"engine $\omega_2$", lw=1.2)
    ax.plot(trace.time, trace.omega_motor, label=r"DC motor $\omega_5$", lw=1.2)
    ax.plot(trace.time, trace.omega_arm, label=r"wheels $\omega_{arm}$", lw=1.6)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("shaft speed (rad/s)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.4)
    ax.legend(loc="best")
    fig.tight_layout()
    try:
        fig.savefig(path, format="svg")
    finally:
        plt.close(fig)
