"""Per-tick fragment selection: thermostat policy plus two baselines.

The thermostat reads one node's temperature and picks work by heat
output: high-heat (execution-dominated) fragments when cold, low-heat
(memory-dominated) fragments when warm, idling in sunlight. Because
every preemption destroys a fragment of progress, a running fragment is
only preempted when the decision class changes, never because a
marginally better fragment showed up.
"""

from dataclasses import dataclass
from enum import Enum

from .errors import ConfigurationError
from .gpu import GpuModel, WorkloadKind, dynamic_power
from .thermal import Phase
from .workload import FragmentState, assignable_fragments, first_assignable

POLICY_THERMOSTAT = "thermostat"
POLICY_ALWAYS_RUN = "always_run"
POLICY_NEVER_RUN = "never_run"
POLICY_IDS = (POLICY_THERMOSTAT, POLICY_ALWAYS_RUN, POLICY_NEVER_RUN)

_KIND_HEAT_RANK = {
    WorkloadKind.MEMORY_DOMINATED: 0,
    WorkloadKind.MIXED: 1,
    WorkloadKind.EXECUTION_DOMINATED: 2,
}


@dataclass(frozen=True)
class ThermostatConfig:
    """Temperature band on the control node plus the hot/cold preference.

    Below exec_preference_threshold_c the thermostat prefers
    execution-dominated fragments (more heat, and they run faster while
    cold); above it, memory-dominated ones.
    """

    band_low_c: float = 0.0
    band_high_c: float = 30.0
    control_node: str = "body"
    exec_preference_threshold_c: float = 15.0

    def __post_init__(self):
        problems = []
        if not self.band_low_c < self.band_high_c:
            problems.append(
                f"policy.band_low_c: must be below band_high_c "
                f"({self.band_low_c} vs {self.band_high_c})"
            )
        elif not self.band_low_c <= self.exec_preference_threshold_c <= self.band_high_c:
            problems.append(
                "policy.exec_preference_threshold_c: must lie within "
                f"[{self.band_low_c}, {self.band_high_c}], "
                f"got {self.exec_preference_threshold_c}"
            )
        if problems:
            raise ConfigurationError(problems)


class DecisionKind(Enum):
    RUN_FRAGMENT = "run_fragment"
    CONTINUE_RUNNING = "continue_running"
    PREEMPT = "preempt"
    IDLE = "idle"


@dataclass(frozen=True)
class Decision:
    """What the GPU does this tick, with a machine-readable reason tag."""

    kind: DecisionKind
    job_id: str = None
    fragment_index: int = None
    reason: str = ""

    @classmethod
    def idle(cls, reason):
        return cls(DecisionKind.IDLE, reason=reason)

    @classmethod
    def run(cls, job_id, index, reason):
        return cls(DecisionKind.RUN_FRAGMENT, job_id, index, reason)

    @classmethod
    def cont(cls, job_id, index, reason):
        return cls(DecisionKind.CONTINUE_RUNNING, job_id, index, reason)

    @classmethod
    def preempt(cls, job_id, index, reason):
        return cls(DecisionKind.PREEMPT, job_id, index, reason)


def find_running(jobs):
    """The (job, fragment) currently on the GPU, or None. Single GPU: at
    most one fragment runs system-wide."""
    for job in jobs:
        fragment = job.running_fragment()
        if fragment is not None:
            return job, fragment
    return None


def _candidates(jobs):
    """(job, fragment) pairs legal to start now.

    Jobs whose fragments all share one class contribute only their first
    startable fragment; within such a job the tie-break chain would pick
    it anyway.
    """
    out = []
    for job in jobs:
        if job.uniform_class:
            index = first_assignable(job)
            if index is not None:
                out.append((job, job.fragments[index]))
            continue
        for index in assignable_fragments(job):
            fragment = job.fragments[index]
            if fragment.state is FragmentState.PENDING:
                out.append((job, fragment))
    return out


def _pick(candidates, gpu: GpuModel, want_high_heat: bool):
    """Deterministic choice: heat output, then priority, job id, index."""
    sign = -1.0 if want_high_heat else 1.0
    return min(
        candidates,
        key=lambda jf: (
            sign * dynamic_power(gpu, jf[1].workload_class),
            jf[0].priority,
            jf[0].id,
            jf[1].index,
        ),
    )


def thermostat_decide(
    cfg: ThermostatConfig,
    phase: Phase,
    control_temp_c: float,
    jobs,
    gpu: GpuModel,
    allow_sunlit_compute: bool = False,
    predicted_net_heat_w=None,
) -> Decision:
    """One thermostat decision against the current state.

    predicted_net_heat_w, when given, maps a candidate WorkloadClass to
    the net heat flow (W) of the node receiving GPU power if that class
    ran now; it gates the over-temperature "coast" branch (run low-heat
    work only while the powered node would still shed heat on net).
    Without it, over-temperature always idles.
    """
    running = find_running(jobs)

    if phase is Phase.SUNLIT and not allow_sunlit_compute:
        if running:
            job, fragment = running
            return Decision.preempt(job.id, fragment.index, "sunlit")
        return Decision.idle("sunlit")

    if control_temp_c < cfg.band_low_c:
        zone = "heat-up"
        want_high = True
    elif control_temp_c <= cfg.band_high_c:
        zone = "hold"
        want_high = control_temp_c < cfg.exec_preference_threshold_c
    else:
        zone = "over-temp"
        want_high = False

    if zone == "over-temp":
        if running:
            job, fragment = running
            if (
                fragment.workload_class.kind is WorkloadKind.MEMORY_DOMINATED
                and predicted_net_heat_w is not None
                and predicted_net_heat_w(fragment.workload_class) < 0
            ):
                return Decision.cont(job.id, fragment.index, "coast")
            return Decision.preempt(job.id, fragment.index, "over-temp")
        memory_only = [
            jf
            for jf in _candidates(jobs)
            if jf[1].workload_class.kind is WorkloadKind.MEMORY_DOMINATED
        ]
        if memory_only and predicted_net_heat_w is not None:
            job, fragment = _pick(memory_only, gpu, want_high_heat=False)
            if predicted_net_heat_w(fragment.workload_class) < 0:
                return Decision.run(job.id, fragment.index, "coast")
        return Decision.idle("over-temp")

    candidates = _candidates(jobs)

    if running:
        job, fragment = running
        if zone == "heat-up" and candidates:
            best_job, best_fragment = _pick(candidates, gpu, want_high_heat=True)
            if (
                _KIND_HEAT_RANK[best_fragment.workload_class.kind]
                > _KIND_HEAT_RANK[fragment.workload_class.kind]
            ):
                return Decision.preempt(job.id, fragment.index, "heat-up")
        return Decision.cont(job.id, fragment.index, zone)

    if not candidates:
        return Decision.idle("no-work")
    job, fragment = _pick(candidates, gpu, want_high_heat=want_high)
    return Decision.run(job.id, fragment.index, zone)


def baseline_always_run(
    phase: Phase, jobs, allow_sunlit_compute: bool = False
) -> Decision:
    """Unmanaged GPU: first assignable fragment regardless of temperature.
    The sunlit gate still applies."""
    running = find_running(jobs)
    if phase is Phase.SUNLIT and not allow_sunlit_compute:
        if running:
            job, fragment = running
            return Decision.preempt(job.id, fragment.index, "sunlit")
        return Decision.idle("sunlit")
    if running:
        job, fragment = running
        return Decision.cont(job.id, fragment.index, "always-run")
    candidates = _candidates(jobs)
    if not candidates:
        return Decision.idle("no-work")
    job, fragment = min(
        candidates, key=lambda jf: (jf[0].priority, jf[0].id, jf[1].index)
    )
    return Decision.run(job.id, fragment.index, "always-run")


def baseline_never_run(phase: Phase, jobs) -> Decision:
    """Conventional setup: GPU permanently idle; a resistive heater (in
    the simulator) holds the band floor during eclipse instead."""
    return Decision.idle("never-run")
