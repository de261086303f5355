"""Offline report renderer for GPU-heater simulation trace CSVs."""

from .fit import HingeFit, fit_two_segment
from .render import ReportSpec, group_runs_by_power, render_report, trace_metrics
from .trace import (
    EXPECTED_HEADER,
    FragmentRun,
    Trace,
    TraceFormatError,
    eclipse_intervals,
    fragment_runs,
    parse_trace,
)

__version__ = "0.1.0"
