"""Parsing of simulator trace CSVs.

The report consumes only the public trace contract: a fixed 14-column
header, one row per tick, Celsius temperatures, empty fragment fields on
ticks without a fragment. Everything here is derived from the rows alone.
"""

import csv
from dataclasses import dataclass, field

EXPECTED_HEADER = [
    "time_s",
    "phase",
    "temp_gpu_c",
    "temp_body_c",
    "gpu_power_w",
    "heater_power_w",
    "decision",
    "reason",
    "job_id",
    "fragment_index",
    "fragment_elapsed_s",
    "cumulative_flops",
    "cumulative_lost_s",
    "band_violation",
]


class TraceFormatError(ValueError):
    """Trace file does not satisfy the CSV contract."""


@dataclass
class Trace:
    """One parsed trace: parallel per-tick columns."""

    label: str
    path: str
    time_s: list
    phase: list
    temp_gpu_c: list
    temp_body_c: list
    gpu_power_w: list
    heater_power_w: list
    decision: list
    reason: list
    job_id: list
    fragment_index: list       # int or None
    fragment_elapsed_s: list   # float or None
    cumulative_flops: list
    cumulative_lost_s: list
    band_violation: list

    def __len__(self):
        return len(self.time_s)

    @property
    def dt_s(self) -> float:
        if len(self.time_s) < 2:
            return 1.0
        return self.time_s[1] - self.time_s[0]


@dataclass
class FragmentRun:
    """One contiguous stretch of a fragment on the GPU.

    wall_s counts the ticks the fragment actually ran; completed is False
    for stretches ended by a preemption or cut off by the end of trace.
    """

    job_id: str
    fragment_index: int
    start_time_s: float
    start_temp_gpu_c: float
    wall_s: float
    mean_power_w: float
    completed: bool


def _column_diff(header):
    missing = [c for c in EXPECTED_HEADER if c not in header]
    unexpected = [c for c in header if c not in EXPECTED_HEADER]
    parts = []
    if missing:
        parts.append(f"missing columns: {', '.join(missing)}")
    if unexpected:
        parts.append(f"unexpected columns: {', '.join(unexpected)}")
    if not parts:
        parts.append(f"column order must be exactly: {', '.join(EXPECTED_HEADER)}")
    return "; ".join(parts)


def parse_trace(path, label=None) -> Trace:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != EXPECTED_HEADER:
            raise TraceFormatError(
                f"{path}: bad trace header ({_column_diff(header or [])})"
            )
        trace = Trace(
            label=label if label is not None else str(path),
            path=str(path),
            time_s=[], phase=[], temp_gpu_c=[], temp_body_c=[],
            gpu_power_w=[], heater_power_w=[], decision=[], reason=[],
            job_id=[], fragment_index=[], fragment_elapsed_s=[],
            cumulative_flops=[], cumulative_lost_s=[], band_violation=[],
        )
        for row in reader:
            if not row:
                continue
            if len(row) != len(EXPECTED_HEADER):
                raise TraceFormatError(
                    f"{path}: row {len(trace.time_s) + 2} has {len(row)} fields"
                )
            trace.time_s.append(float(row[0]))
            trace.phase.append(row[1])
            trace.temp_gpu_c.append(float(row[2]))
            trace.temp_body_c.append(float(row[3]))
            trace.gpu_power_w.append(float(row[4]))
            trace.heater_power_w.append(float(row[5]))
            trace.decision.append(row[6])
            trace.reason.append(row[7])
            trace.job_id.append(row[8])
            trace.fragment_index.append(int(row[9]) if row[9] else None)
            trace.fragment_elapsed_s.append(float(row[10]) if row[10] else None)
            trace.cumulative_flops.append(int(row[11]))
            trace.cumulative_lost_s.append(float(row[12]))
            trace.band_violation.append(row[13] == "1")
    if not trace.time_s:
        raise TraceFormatError(f"{path}: trace has a header but no records")
    return trace


def eclipse_intervals(trace: Trace):
    """[(start_s, end_s)] stretches where the phase column says eclipse."""
    intervals = []
    start = None
    for t, phase in zip(trace.time_s, trace.phase):
        if phase == "eclipse" and start is None:
            start = t
        elif phase != "eclipse" and start is not None:
            intervals.append((start, t))
            start = None
    if start is not None:
        intervals.append((start, trace.time_s[-1] + trace.dt_s))
    return intervals


def fragment_runs(trace: Trace):
    """Contiguous fragment stretches recovered from the decision column.

    A stretch opens at a run_fragment row and extends through the
    continue_running rows of the same (job, index). A preempt row for
    those ids ends it as un-completed; any other row ends it as completed.
    A stretch still open at the end of the trace is dropped (unknown fate).
    """
    runs = []
    open_run = None  # [job_id, index, start_t, start_temp, ticks, power_sum]

    def close(completed):
        nonlocal open_run
        job_id, index, start_t, start_temp, ticks, power_sum = open_run
        runs.append(
            FragmentRun(
                job_id=job_id,
                fragment_index=index,
                start_time_s=start_t,
                start_temp_gpu_c=start_temp,
                wall_s=ticks * trace.dt_s,
                mean_power_w=power_sum / ticks,
                completed=completed,
            )
        )
        open_run = None

    for i in range(len(trace)):
        decision = trace.decision[i]
        ids = (trace.job_id[i], trace.fragment_index[i])
        if open_run is not None:
            if decision == "continue_running" and ids == tuple(open_run[:2]):
                open_run[4] += 1
                open_run[5] += trace.gpu_power_w[i]
                continue
            if decision == "preempt" and ids == tuple(open_run[:2]):
                close(completed=False)
                continue
            close(completed=True)
        if decision == "run_fragment":
            open_run = [
                trace.job_id[i],
                trace.fragment_index[i],
                trace.time_s[i],
                trace.temp_gpu_c[i],
                1,
                trace.gpu_power_w[i],
            ]
    # an open run at end-of-trace has an unknown fate; drop it
    return runs
