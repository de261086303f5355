"""Deterministic fixed-step run loop binding orbit, thermal network, GPU
model, workload and scheduler.

Each tick: read the phase, ask the policy for a decision, apply fragment
transitions, compute applied powers (GPU heat plus the resistive-heater
baseline/fallback), advance the thermal network one explicit-Euler step,
then advance the running fragment by dt scaled against its
temperature-adjusted runtime. The trace records the state each decision
saw; two runs of the same scenario are bitwise identical.
"""

import json
import math
from dataclasses import dataclass, field

from .errors import ConfigurationError
from .gpu import (
    GpuModel,
    dynamic_power,
    gpu_power,
    leakage_power,
    runtime_at_temperature,
)
from .scheduling import (
    POLICY_ALWAYS_RUN,
    POLICY_IDS,
    POLICY_NEVER_RUN,
    POLICY_THERMOSTAT,
    Decision,
    DecisionKind,
    ThermostatConfig,
    baseline_always_run,
    baseline_never_run,
    thermostat_decide,
)
from .thermal import (
    OrbitProfile,
    Phase,
    ThermalEnvironment,
    ThermalLink,
    ThermalNode,
    celsius_to_kelvin,
    initial_state,
    kelvin_to_celsius,
    net_heat_flow,
    orbital_phase,
    step_thermal,
)
from .workload import (
    DEFAULT_CHECKPOINT_OVERHEAD_S,
    CheckpointLedger,
    DependencyMode,
    advance_fragment,
    begin_fragment,
    complete_fragment,
    fragment_finished,
    fragment_job,
    preempt_fragment,
)

GPU_NODE_ID = "gpu"
BODY_NODE_ID = "body"

# Tolerance band for the violation flag: this far outside the thermostat
# band counts as a violation.
BAND_TOLERANCE_C = 2.0

TRACE_HEADER = (
    "time_s,phase,temp_gpu_c,temp_body_c,gpu_power_w,heater_power_w,"
    "decision,reason,job_id,fragment_index,fragment_elapsed_s,"
    "cumulative_flops,cumulative_lost_s,band_violation"
)


@dataclass(frozen=True)
class JobSpec:
    """Job definition as loaded from a scenario: totals, not fragments."""

    id: str
    total_flops: int
    total_mem_accesses: int
    total_duration_s: float
    fragment_duration_s: float
    dependency_mode: DependencyMode
    priority: int = 0

    def __post_init__(self):
        # Fragmenting performs the full validation; discard the result so
        # bad job definitions surface at config time, not mid-run.
        fragment_job(
            self.id,
            self.total_flops,
            self.total_mem_accesses,
            self.total_duration_s,
            self.fragment_duration_s,
            self.dependency_mode,
            self.priority,
        )


@dataclass(frozen=True)
class PolicyConfig:
    id: str = POLICY_THERMOSTAT
    thermostat: ThermostatConfig = field(default_factory=ThermostatConfig)
    allow_sunlit_compute: bool = False

    def __post_init__(self):
        if self.id not in POLICY_IDS:
            raise ConfigurationError(
                f"policy.id: must be one of {', '.join(POLICY_IDS)}, got {self.id!r}"
            )


@dataclass(frozen=True)
class Scenario:
    """Complete, validated input of one simulation run.

    seed is reserved for future stochastic extensions; the simulator
    itself is seedless-deterministic.
    """

    orbit: OrbitProfile
    nodes: tuple
    links: tuple
    environment: ThermalEnvironment
    gpu: GpuModel
    jobs: tuple
    policy: PolicyConfig
    dt_s: float = 1.0
    duration_s: float = 5400.0
    heater_rated_w: float = 200.0
    checkpoint_overhead_s: float = DEFAULT_CHECKPOINT_OVERHEAD_S
    seed: int = 0

    def __post_init__(self):
        problems = []
        if not self.dt_s > 0:
            problems.append(f"run.dt_s: must be > 0, got {self.dt_s}")
        elif not self.duration_s >= self.dt_s:
            problems.append(
                f"run.duration_s: must be >= dt_s, got {self.duration_s} < {self.dt_s}"
            )
        if self.heater_rated_w < 0:
            problems.append(f"run.heater_rated_w: must be >= 0, got {self.heater_rated_w}")
        if self.checkpoint_overhead_s < 0:
            problems.append(
                f"run.checkpoint_overhead_s: must be >= 0, got {self.checkpoint_overhead_s}"
            )
        node_ids = [n.id for n in self.nodes]
        if len(set(node_ids)) != len(node_ids):
            problems.append(f"nodes: ids must be unique, got {node_ids}")
        for required in (GPU_NODE_ID, BODY_NODE_ID):
            if required not in node_ids:
                problems.append(
                    f"nodes: a node with id {required!r} is required by the trace format"
                )
        for link in self.links:
            for end in (link.node_a, link.node_b):
                if end not in node_ids:
                    problems.append(f"links: unknown node id {end!r}")
        if self.policy.thermostat.control_node not in node_ids:
            problems.append(
                f"policy.control_node: unknown node id "
                f"{self.policy.thermostat.control_node!r}"
            )
        job_ids = [j.id for j in self.jobs]
        if len(set(job_ids)) != len(job_ids):
            problems.append(f"jobs: ids must be unique, got {job_ids}")
        if problems:
            raise ConfigurationError(problems)


@dataclass(frozen=True)
class TraceRecord:
    """One tick. Temperatures are the state the decision saw (pre-step);
    cumulative counters include this tick's effects."""

    time_s: float
    phase: Phase
    temp_gpu_c: float
    temp_body_c: float
    gpu_power_w: float
    heater_power_w: float
    decision: DecisionKind
    reason: str
    job_id: str          # empty string when no fragment is involved
    fragment_index: int  # None when no fragment is involved
    fragment_elapsed_s: float  # None when no fragment is involved
    cumulative_flops: int
    cumulative_lost_s: float
    band_violation: bool


@dataclass(frozen=True)
class Summary:
    fragments_completed: int
    jobs_completed: int
    total_flops: int
    gpu_energy_j: float
    heater_energy_j: float
    heater_energy_saved_j: float
    preemptions: int
    lost_compute_s: float
    band_violation_fraction: float
    peak_temperature_c: dict
    min_temperature_c: dict


@dataclass(frozen=True)
class StepInfo:
    """Instrumentation payload for the on_step hook: enough to audit one
    tick independently. jobs is the live registry; do not mutate it."""

    time_s: float
    phase: Phase
    decision: Decision
    applied_power_w: dict
    state_before: object
    state_after: object
    jobs: list


class _Accumulator:
    """Mutable run counters, folded into a Summary at the end."""

    def __init__(self, node_ids):
        self.fragments_completed = 0
        self.cumulative_flops = 0
        self.cumulative_lost_s = 0.0
        self.preemptions = 0
        self.gpu_energy_j = 0.0
        self.heater_energy_j = 0.0
        self.eclipse_ticks_after_first_orbit = 0
        self.band_violations_after_first_orbit = 0
        self.peak = {nid: -math.inf for nid in node_ids}
        self.low = {nid: math.inf for nid in node_ids}

    def observe_temperatures(self, state):
        for nid, temp_k in state.node_temperatures.items():
            if temp_k > self.peak[nid]:
                self.peak[nid] = temp_k
            if temp_k < self.low[nid]:
                self.low[nid] = temp_k


def build_jobs(specs):
    return [
        fragment_job(
            s.id,
            s.total_flops,
            s.total_mem_accesses,
            s.total_duration_s,
            s.fragment_duration_s,
            s.dependency_mode,
            s.priority,
        )
        for s in specs
    ]


def _decide(scenario, phase, control_temp_c, jobs, predicted_net_heat_w):
    policy = scenario.policy
    if policy.id == POLICY_THERMOSTAT:
        return thermostat_decide(
            policy.thermostat,
            phase,
            control_temp_c,
            jobs,
            scenario.gpu,
            policy.allow_sunlit_compute,
            predicted_net_heat_w,
        )
    if policy.id == POLICY_ALWAYS_RUN:
        return baseline_always_run(phase, jobs, policy.allow_sunlit_compute)
    return baseline_never_run(phase, jobs)


_DISCARD = object()  # record sink that skips building records entirely


def _run(scenario: Scenario, record_sink=None, on_step=None):
    """Single-policy run. Returns (trace, accumulator, jobs).

    record_sink None collects records into the returned trace; a callable
    streams each record out as produced (the trace comes back empty);
    _DISCARD skips record construction for silent baseline runs.
    """
    orbit = scenario.orbit
    env = scenario.environment
    nodes = scenario.nodes
    links = scenario.links
    model = scenario.gpu
    cfg = scenario.policy.thermostat
    dt = scenario.dt_s
    never_run = scenario.policy.id == POLICY_NEVER_RUN

    nodes_by_id = {n.id: n for n in nodes}
    gpu_node = nodes_by_id[GPU_NODE_ID]
    control_node = nodes_by_id[cfg.control_node]
    band_low_k = celsius_to_kelvin(cfg.band_low_c)

    jobs = build_jobs(scenario.jobs)
    ledger = CheckpointLedger(scenario.checkpoint_overhead_s)
    state = initial_state(nodes)
    acc = _Accumulator(nodes_by_id)
    trace = []
    emit = trace.append if record_sink is None else record_sink
    running = None           # (job, fragment) on the GPU, if any
    checkpoint_left = 0.0    # seconds of checkpoint save still blocking the GPU

    n_steps = int(math.ceil(scenario.duration_s / dt - 1e-9))
    for i in range(n_steps):
        t = i * dt
        phase = orbital_phase(orbit, t)
        temp_gpu_k = state.node_temperatures[GPU_NODE_ID]
        temp_control_k = state.node_temperatures[cfg.control_node]
        temp_control_c = kelvin_to_celsius(temp_control_k)

        acc.observe_temperatures(state)

        if checkpoint_left > 0:
            decision = Decision.idle("checkpoint")
            checkpoint_left -= dt
        else:

            def predicted_net_heat_w(workload_class):
                power = dynamic_power(model, workload_class) + leakage_power(
                    model, temp_gpu_k
                )
                return net_heat_flow(gpu_node, state, env, links, phase, power)

            decision = _decide(scenario, phase, temp_control_c, jobs, predicted_net_heat_w)

        # Fragment bookkeeping for the record: elapsed as of tick start,
        # captured before any reset or advance.
        rec_job_id = decision.job_id if decision.job_id is not None else ""
        rec_index = decision.fragment_index
        rec_elapsed = None

        if decision.kind is DecisionKind.PREEMPT:
            job, fragment = running
            rec_elapsed = fragment.elapsed_s
            acc.cumulative_lost_s += preempt_fragment(job, fragment.index)
            acc.preemptions += 1
            running = None
        elif decision.kind is DecisionKind.RUN_FRAGMENT:
            job = next(j for j in jobs if j.id == decision.job_id)
            fragment = begin_fragment(job, decision.fragment_index)
            running = (job, fragment)
            rec_elapsed = 0.0
        elif decision.kind is DecisionKind.CONTINUE_RUNNING:
            rec_elapsed = running[1].elapsed_s

        workload_class = running[1].workload_class if running else None
        gpu_power_w = gpu_power(model, workload_class, temp_gpu_k)

        # The heater backs up idleness (no runnable work, checkpoint saves,
        # the never_run baseline), never a transitional preempt tick: a
        # deadbeat heater firing into a one-tick gap would pin the control
        # temperature at band_low and re-trigger the thermostat every tick.
        heater_power_w = 0.0
        if phase is Phase.ECLIPSE and decision.kind is DecisionKind.IDLE:
            applied_on_control = gpu_power_w if cfg.control_node == GPU_NODE_ID else 0.0
            q_control = net_heat_flow(
                control_node, state, env, links, phase, applied_on_control
            )
            needed = (
                control_node.heat_capacity_j_per_k * (band_low_k - temp_control_k) / dt
                - q_control
            )
            heater_power_w = min(max(needed, 0.0), scenario.heater_rated_w)

        applied = {GPU_NODE_ID: gpu_power_w}
        applied[cfg.control_node] = applied.get(cfg.control_node, 0.0) + heater_power_w

        acc.gpu_energy_j += gpu_power_w * dt
        acc.heater_energy_j += heater_power_w * dt

        band_violation = not (
            cfg.band_low_c - BAND_TOLERANCE_C
            <= temp_control_c
            <= cfg.band_high_c + BAND_TOLERANCE_C
        )
        if phase is Phase.ECLIPSE and t >= orbit.period_s:
            acc.eclipse_ticks_after_first_orbit += 1
            if band_violation:
                acc.band_violations_after_first_orbit += 1

        new_state = step_thermal(state, nodes, links, env, phase, applied, dt)

        if running is not None:
            job, fragment = running
            adjusted = runtime_at_temperature(
                model,
                fragment.workload_class,
                fragment.nominal_duration_s,
                kelvin_to_celsius(temp_gpu_k),
            )
            advance_fragment(fragment, dt, adjusted)
            if fragment_finished(fragment):
                complete_fragment(job, fragment.index, ledger)
                acc.fragments_completed += 1
                acc.cumulative_flops += fragment.flops
                checkpoint_left = scenario.checkpoint_overhead_s
                running = None

        if emit is not _DISCARD:
            emit(
                TraceRecord(
                    time_s=t,
                    phase=phase,
                    temp_gpu_c=kelvin_to_celsius(temp_gpu_k),
                    temp_body_c=kelvin_to_celsius(state.node_temperatures[BODY_NODE_ID]),
                    gpu_power_w=gpu_power_w,
                    heater_power_w=heater_power_w,
                    decision=decision.kind,
                    reason=decision.reason,
                    job_id=rec_job_id,
                    fragment_index=rec_index,
                    fragment_elapsed_s=rec_elapsed,
                    cumulative_flops=acc.cumulative_flops,
                    cumulative_lost_s=acc.cumulative_lost_s,
                    band_violation=band_violation,
                )
            )

        if on_step is not None:
            on_step(
                StepInfo(
                    time_s=t,
                    phase=phase,
                    decision=decision,
                    applied_power_w=applied,
                    state_before=state,
                    state_after=new_state,
                    jobs=jobs,
                )
            )

        state = new_state

    return trace, acc, jobs


def _summarize(acc, jobs, heater_energy_saved_j):
    if acc.eclipse_ticks_after_first_orbit:
        fraction = (
            acc.band_violations_after_first_orbit / acc.eclipse_ticks_after_first_orbit
        )
    else:
        fraction = 0.0
    return Summary(
        fragments_completed=acc.fragments_completed,
        jobs_completed=sum(1 for j in jobs if j.completed),
        total_flops=acc.cumulative_flops,
        gpu_energy_j=acc.gpu_energy_j,
        heater_energy_j=acc.heater_energy_j,
        heater_energy_saved_j=heater_energy_saved_j,
        preemptions=acc.preemptions,
        lost_compute_s=acc.cumulative_lost_s,
        band_violation_fraction=fraction,
        peak_temperature_c={nid: kelvin_to_celsius(v) for nid, v in acc.peak.items()},
        min_temperature_c={nid: kelvin_to_celsius(v) for nid, v in acc.low.items()},
    )


def with_policy(scenario: Scenario, policy_id: str) -> Scenario:
    """Copy of the scenario running a different policy, all else equal."""
    return Scenario(
        orbit=scenario.orbit,
        nodes=scenario.nodes,
        links=scenario.links,
        environment=scenario.environment,
        gpu=scenario.gpu,
        jobs=scenario.jobs,
        policy=PolicyConfig(
            id=policy_id,
            thermostat=scenario.policy.thermostat,
            allow_sunlit_compute=scenario.policy.allow_sunlit_compute,
        ),
        dt_s=scenario.dt_s,
        duration_s=scenario.duration_s,
        heater_rated_w=scenario.heater_rated_w,
        checkpoint_overhead_s=scenario.checkpoint_overhead_s,
        seed=scenario.seed,
    )


def run_simulation(scenario: Scenario, on_step=None):
    """Run one scenario; returns (trace, summary).

    heater_energy_saved_j in the summary compares against the never_run
    baseline on the same scenario (run silently when the scenario policy
    is not itself never_run).
    """
    trace, acc, jobs = _run(scenario, on_step=on_step)
    return trace, _summarize(acc, jobs, _baseline_savings(scenario, acc))


def _baseline_savings(scenario, acc):
    if scenario.policy.id == POLICY_NEVER_RUN:
        return 0.0
    _, baseline_acc, _ = _run(
        with_policy(scenario, POLICY_NEVER_RUN), record_sink=_DISCARD
    )
    return baseline_acc.heater_energy_j - acc.heater_energy_j


@dataclass(frozen=True)
class PolicyComparison:
    policy_id: str
    summary: Summary
    flops_gained: int  # vs the never_run baseline


def compare_policies(scenario: Scenario, policy_ids):
    """Run each policy on the identical scenario; deltas are vs never_run.

    Output order follows the input list. The never_run baseline is the
    listed run when present, otherwise one extra silent run.
    """
    if not policy_ids:
        raise ValueError("policy list must not be empty")
    results = {}
    for pid in policy_ids:
        _, acc, jobs = _run(with_policy(scenario, pid), record_sink=_DISCARD)
        results[pid] = (acc, jobs)
    if POLICY_NEVER_RUN in results:
        baseline_acc = results[POLICY_NEVER_RUN][0]
    else:
        _, baseline_acc, _ = _run(
            with_policy(scenario, POLICY_NEVER_RUN), record_sink=_DISCARD
        )
    rows = []
    for pid in policy_ids:
        acc, jobs = results[pid]
        summary = _summarize(acc, jobs, baseline_acc.heater_energy_j - acc.heater_energy_j)
        rows.append(
            PolicyComparison(
                policy_id=pid,
                summary=summary,
                flops_gained=acc.cumulative_flops - baseline_acc.cumulative_flops,
            )
        )
    return rows


# --- trace and summary serialization ---------------------------------------


def format_float(value: float) -> str:
    """Six significant digits, fixed (never scientific) notation."""
    if value == 0:
        return "0.00000"
    digits = 6 - int(math.floor(math.log10(abs(value)))) - 1
    if digits >= 0:
        return f"{value:.{digits}f}"
    return f"{round(value, digits):.0f}"


def trace_record_to_csv(record: TraceRecord) -> str:
    if record.fragment_index is None:
        fragment_index = ""
        fragment_elapsed = ""
    else:
        fragment_index = str(record.fragment_index)
        fragment_elapsed = format_float(record.fragment_elapsed_s)
    return ",".join(
        (
            format_float(record.time_s),
            record.phase.value,
            format_float(record.temp_gpu_c),
            format_float(record.temp_body_c),
            format_float(record.gpu_power_w),
            format_float(record.heater_power_w),
            record.decision.value,
            record.reason,
            record.job_id,
            fragment_index,
            fragment_elapsed,
            str(record.cumulative_flops),
            format_float(record.cumulative_lost_s),
            "1" if record.band_violation else "0",
        )
    )


def write_trace(records, path):
    """Stream records to a CSV file; usable with any record iterable."""
    with open(path, "w", newline="") as fh:
        fh.write(TRACE_HEADER + "\n")
        for record in records:
            fh.write(trace_record_to_csv(record) + "\n")


def run_to_files(scenario: Scenario, trace_path, summary_path) -> Summary:
    """Run one scenario streaming the trace to disk as it is produced, and
    write the summary as JSON. Returns the summary."""
    with open(trace_path, "w", newline="") as fh:
        fh.write(TRACE_HEADER + "\n")

        def sink(record):
            fh.write(trace_record_to_csv(record) + "\n")

        _, acc, jobs = _run(scenario, record_sink=sink)
    summary = _summarize(acc, jobs, _baseline_savings(scenario, acc))
    with open(summary_path, "w") as fh:
        json.dump(summary_to_dict(summary), fh, indent=2)
        fh.write("\n")
    return summary


def summary_to_dict(summary: Summary) -> dict:
    return {
        "fragments_completed": summary.fragments_completed,
        "jobs_completed": summary.jobs_completed,
        "total_flops": summary.total_flops,
        "gpu_energy_j": summary.gpu_energy_j,
        "heater_energy_j": summary.heater_energy_j,
        "heater_energy_saved_j": summary.heater_energy_saved_j,
        "preemptions": summary.preemptions,
        "lost_compute_s": summary.lost_compute_s,
        "band_violation_fraction": summary.band_violation_fraction,
        "peak_temperature_c": dict(summary.peak_temperature_c),
        "min_temperature_c": dict(summary.min_temperature_c),
    }
