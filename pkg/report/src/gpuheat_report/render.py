"""Figure and report rendering from parsed traces.

Outputs (all deterministic for fixed inputs): a GPU-temperature-vs-time
overlay with eclipse shading, a per-fragment runtime-vs-temperature
scatter with a two-segment knee fit, an HTML index, and a machine-readable
report.json carrying every number shown.

The trace CSV does not carry a workload-class column, so fragments are
grouped by their mean GPU power level (distinct plateaus in the power
histogram); the highest-power group is the compute-bound one and is the
knee-fit target.
"""

import html
import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .fit import HingeFit, fit_two_segment
from .trace import Trace, eclipse_intervals, fragment_runs, parse_trace

IMAGE_FORMATS = ("png", "svg")

OVERLAY_NAME = "temperature_overlay"
SCATTER_NAME = "runtime_scatter"

_GROUP_COLORS = ("#d62728", "#9467bd", "#1f77b4", "#2ca02c", "#8c564b")
_TRACE_MARKERS = ("o", "s", "^", "D", "v", "P", "X")


@dataclass(frozen=True)
class ReportSpec:
    """What to render: labelled traces, a target directory, image format."""

    traces: tuple            # ((path, label), ...)
    output_dir: str
    image_format: str = "png"

    def __post_init__(self):
        if not self.traces:
            raise ValueError("report needs at least one trace")
        labels = [label for _, label in self.traces]
        if len(set(labels)) != len(labels):
            raise ValueError(f"trace labels must be unique, got {labels}")
        if self.image_format not in IMAGE_FORMATS:
            raise ValueError(
                f"image format must be one of {IMAGE_FORMATS}, got {self.image_format!r}"
            )


@dataclass(frozen=True)
class PowerGroup:
    """Fragments sharing one power plateau, descending-power rank 0 = hottest."""

    rank: int
    label: str
    mean_power_w: float
    runs: tuple


def group_runs_by_power(runs):
    """Split completed fragment runs into power plateaus.

    Gaps wider than 10% of the observed power range (at least 5 W) start
    a new group. Group 0 is the highest-power plateau.
    """
    completed = [r for r in runs if r.completed]
    if not completed:
        return []
    ordered = sorted(completed, key=lambda r: r.mean_power_w)
    span = ordered[-1].mean_power_w - ordered[0].mean_power_w
    threshold = max(5.0, 0.10 * span)
    clusters = [[ordered[0]]]
    for run in ordered[1:]:
        if run.mean_power_w - clusters[-1][-1].mean_power_w > threshold:
            clusters.append([run])
        else:
            clusters[-1].append(run)
    clusters.reverse()  # highest power first

    groups = []
    for rank, cluster in enumerate(clusters):
        if len(clusters) == 1:
            label = "all fragments"
        elif rank == 0:
            label = "compute-bound (highest power)"
        elif rank == len(clusters) - 1:
            label = "memory-bound (lowest power)"
        else:
            label = "mixed"
        mean_power = sum(r.mean_power_w for r in cluster) / len(cluster)
        groups.append(
            PowerGroup(
                rank=rank,
                label=label,
                mean_power_w=mean_power,
                runs=tuple(sorted(cluster, key=lambda r: r.start_time_s)),
            )
        )
    return groups


def knee_fit_for(groups):
    """Hinge fit over the highest-power group, or None when unfittable."""
    if not groups:
        return None
    top = groups[0]
    temps = [r.start_temp_gpu_c for r in top.runs]
    walls = [r.wall_s for r in top.runs]
    try:
        return fit_two_segment(temps, walls)
    except ValueError:
        return None


def trace_metrics(trace: Trace) -> dict:
    """Summary-style metrics recomputed purely from the CSV rows."""
    runs = fragment_runs(trace)
    completed = [r for r in runs if r.completed]
    eclipse_ticks = sum(1 for p in trace.phase if p == "eclipse")
    return {
        "records": len(trace),
        "duration_s": trace.time_s[-1] + trace.dt_s,
        "peak_temp_gpu_c": max(trace.temp_gpu_c),
        "min_temp_gpu_c": min(trace.temp_gpu_c),
        "peak_temp_body_c": max(trace.temp_body_c),
        "min_temp_body_c": min(trace.temp_body_c),
        "total_flops": trace.cumulative_flops[-1],
        "lost_compute_s": trace.cumulative_lost_s[-1],
        "preemptions": sum(1 for d in trace.decision if d == "preempt"),
        "fragments_completed": len(completed),
        "gpu_energy_j": sum(trace.gpu_power_w) * trace.dt_s,
        "heater_energy_j": sum(trace.heater_power_w) * trace.dt_s,
        "band_violation_fraction": (
            sum(trace.band_violation) / len(trace) if len(trace) else 0.0
        ),
        "eclipse_record_fraction": eclipse_ticks / len(trace),
    }


def _render_overlay(traces, path, image_format):
    fig, ax = plt.subplots(figsize=(9, 4.5))
    for start, end in eclipse_intervals(traces[0]):
        ax.axvspan(start, end, color="0.85", zorder=0)
    for trace in traces:
        ax.plot(trace.time_s, trace.temp_gpu_c, label=trace.label, linewidth=1.2)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("GPU temperature (°C)")
    ax.set_title("GPU temperature over time (shaded: eclipse)")
    ax.legend(loc="best")
    _save(fig, path, image_format)


def _render_scatter(traces, per_trace_groups, per_trace_fit, path, image_format):
    fig, ax = plt.subplots(figsize=(9, 4.5))
    for t_index, trace in enumerate(traces):
        marker = _TRACE_MARKERS[t_index % len(_TRACE_MARKERS)]
        for group in per_trace_groups[trace.label]:
            color = _GROUP_COLORS[group.rank % len(_GROUP_COLORS)]
            temps = [r.start_temp_gpu_c for r in group.runs]
            walls = [r.wall_s for r in group.runs]
            ax.scatter(
                temps,
                walls,
                s=14,
                marker=marker,
                color=color,
                alpha=0.8,
                label=f"{trace.label}: {group.label}",
            )
        fit = per_trace_fit[trace.label]
        if fit is not None:
            top = per_trace_groups[trace.label][0]
            temps = sorted(r.start_temp_gpu_c for r in top.runs)
            line = [
                fit.base_runtime_s
                + fit.slope_s_per_c * max(0.0, t - fit.knee_c)
                for t in temps
            ]
            ax.plot(temps, line, "--", color="black", linewidth=1.0)
            ax.axvline(fit.knee_c, color="black", linewidth=0.8, linestyle=":")
    ax.set_xlabel("GPU temperature at fragment start (°C)")
    ax.set_ylabel("fragment wall time (s)")
    ax.set_title("Fragment runtime vs temperature (dashed: two-segment fit)")
    ax.legend(loc="best", fontsize=8)
    _save(fig, path, image_format)


def _save(fig, path, image_format):
    fig.tight_layout()
    metadata = {"Date": None} if image_format == "svg" else None
    fig.savefig(path, format=image_format, dpi=110, metadata=metadata)
    plt.close(fig)


def _fit_to_dict(fit):
    if fit is None:
        return None
    return {
        "knee_c": fit.knee_c,
        "slope_s_per_c": fit.slope_s_per_c,
        "base_runtime_s": fit.base_runtime_s,
        "sse": fit.sse,
        "points": fit.points,
    }


def _index_html(traces, metrics, fits, overlay_file, scatter_file):
    rows = []
    keys = [
        "records",
        "duration_s",
        "peak_temp_gpu_c",
        "min_temp_gpu_c",
        "total_flops",
        "fragments_completed",
        "preemptions",
        "lost_compute_s",
        "gpu_energy_j",
        "heater_energy_j",
        "band_violation_fraction",
    ]
    header = "".join(f"<th>{html.escape(k)}</th>" for k in ["trace"] + keys)
    for trace in traces:
        m = metrics[trace.label]
        cells = "".join(
            f"<td>{m[k]:.6g}</td>" if isinstance(m[k], float) else f"<td>{m[k]}</td>"
            for k in keys
        )
        rows.append(f"<tr><td>{html.escape(trace.label)}</td>{cells}</tr>")
    fit_rows = []
    for trace in traces:
        fit = fits[trace.label]
        if fit is None:
            fit_rows.append(
                f"<tr><td>{html.escape(trace.label)}</td>"
                "<td colspan='3'>not fitted</td></tr>"
            )
        else:
            fit_rows.append(
                f"<tr><td>{html.escape(trace.label)}</td>"
                f"<td>{fit.knee_c:.2f}</td><td>{fit.slope_s_per_c:.4f}</td>"
                f"<td>{fit.points}</td></tr>"
            )
    return f"""<!DOCTYPE html>
<html>
<head><meta charset="utf-8"><title>GPU heater simulation report</title>
<style>
body {{ font-family: sans-serif; margin: 2em; }}
table {{ border-collapse: collapse; margin: 1em 0; }}
td, th {{ border: 1px solid #999; padding: 0.3em 0.6em; text-align: right; }}
th {{ background: #eee; }}
td:first-child, th:first-child {{ text-align: left; }}
img {{ max-width: 100%; }}
</style></head>
<body>
<h1>GPU heater simulation report</h1>
<h2>GPU temperature over time</h2>
<img src="{overlay_file}" alt="temperature overlay">
<h2>Fragment runtime vs temperature</h2>
<img src="{scatter_file}" alt="runtime scatter">
<h2>Per-trace metrics</h2>
<table><tr>{header}</tr>
{chr(10).join(rows)}
</table>
<h2>Two-segment runtime fit (highest-power fragment group)</h2>
<table><tr><th>trace</th><th>knee (°C)</th><th>slope (s/°C)</th><th>points</th></tr>
{chr(10).join(fit_rows)}
</table>
</body>
</html>
"""


def render_report(spec: ReportSpec) -> dict:
    """Render all outputs; returns the report.json payload."""
    traces = [parse_trace(path, label) for path, label in spec.traces]
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    per_trace_groups = {t.label: group_runs_by_power(fragment_runs(t)) for t in traces}
    per_trace_fit = {t.label: knee_fit_for(per_trace_groups[t.label]) for t in traces}
    metrics = {t.label: trace_metrics(t) for t in traces}

    overlay_file = f"{OVERLAY_NAME}.{spec.image_format}"
    scatter_file = f"{SCATTER_NAME}.{spec.image_format}"
    _render_overlay(traces, out / overlay_file, spec.image_format)
    _render_scatter(
        traces, per_trace_groups, per_trace_fit, out / scatter_file, spec.image_format
    )

    payload = {
        "traces": {
            t.label: {
                **metrics[t.label],
                "power_groups": [
                    {
                        "label": g.label,
                        "mean_power_w": g.mean_power_w,
                        "fragments": len(g.runs),
                    }
                    for g in per_trace_groups[t.label]
                ],
                "two_segment_fit": _fit_to_dict(per_trace_fit[t.label]),
            }
            for t in traces
        },
        "images": [overlay_file, scatter_file],
    }
    (out / "report.json").write_text(json.dumps(payload, indent=2) + "\n")
    (out / "index.html").write_text(
        _index_html(traces, metrics, per_trace_fit, overlay_file, scatter_file)
    )
    return payload
