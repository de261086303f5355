"""Jobs split into equal-duration fragments with checkpoint semantics.

A fragment is the unit of scheduling and of lost work: progress within
a fragment is discarded on preemption, while completed fragments are
checkpointed and survive any later GPU shutdown or job switch. In-order
jobs expose only their first unfinished fragment; out-of-order jobs
expose every pending fragment.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import ConfigurationError, SchedulerLogicError
from .gpu import WorkloadClass, classify_workload

DEFAULT_CHECKPOINT_OVERHEAD_S = 0.5

_COMPLETION_EPS = 1e-9  # progress slack absorbing float accumulation error


class DependencyMode(Enum):
    IN_ORDER = "in_order"
    OUT_OF_ORDER = "out_of_order"


class FragmentState(Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"


@dataclass
class Fragment:
    """One equal-duration segment of a job.

    elapsed_s is wall-clock time since begin; progress_s is accumulated
    nominal-scale progress (a fragment completes when progress reaches
    its nominal duration, however long that takes on a hot GPU).
    workload_class is derived from the fragment's own counts and cached,
    since schedulers consult it every tick.
    """

    job_id: str
    index: int
    nominal_duration_s: float
    flops: int
    mem_accesses: int
    state: FragmentState = FragmentState.PENDING
    elapsed_s: float = 0.0
    progress_s: float = 0.0
    workload_class: WorkloadClass = None

    def __post_init__(self):
        if self.workload_class is None:
            self.workload_class = classify_workload(self.flops, self.mem_accesses)


@dataclass
class Job:
    """Ordered fragments plus the dependency rule that gates assignment.

    running_index and prefix_completed are caches maintained by the
    transition functions below (the only sanctioned mutators), keeping
    per-tick scheduler queries cheap on long jobs.
    """

    id: str
    fragments: list
    dependency_mode: DependencyMode
    priority: int = 0
    running_index: int = None
    prefix_completed: int = 0

    def __post_init__(self):
        for expected, fragment in enumerate(self.fragments):
            if fragment.index != expected:
                raise ConfigurationError(
                    f"job {self.id}: fragment indices must be 0..n-1 without gaps"
                )
        # Fragments made by fragment_job share one class; heterogeneous
        # hand-built jobs force per-fragment evaluation in schedulers.
        kinds = {f.workload_class.kind for f in self.fragments}
        self.uniform_class = len(kinds) == 1
        self.running_index = next(
            (f.index for f in self.fragments if f.state is FragmentState.RUNNING), None
        )
        self._advance_prefix()

    def _advance_prefix(self):
        n = len(self.fragments)
        while (
            self.prefix_completed < n
            and self.fragments[self.prefix_completed].state is FragmentState.COMPLETED
        ):
            self.prefix_completed += 1

    @property
    def completed(self) -> bool:
        return self.prefix_completed == len(self.fragments)

    def running_fragment(self):
        if self.running_index is None:
            return None
        return self.fragments[self.running_index]


@dataclass
class CheckpointLedger:
    """Record of saved fragment completions; the completed set only grows."""

    checkpoint_overhead_s: float = DEFAULT_CHECKPOINT_OVERHEAD_S
    completed: dict = field(default_factory=dict)  # job id -> set of indices

    def __post_init__(self):
        if self.checkpoint_overhead_s < 0:
            raise ConfigurationError(
                f"checkpoint_overhead_s must be >= 0, got {self.checkpoint_overhead_s}"
            )

    def record(self, job_id: str, index: int):
        self.completed.setdefault(job_id, set()).add(index)

    def is_completed(self, job_id: str, index: int) -> bool:
        return index in self.completed.get(job_id, ())

    def completed_count(self) -> int:
        return sum(len(s) for s in self.completed.values())


def fragment_job(
    job_id: str,
    total_flops: int,
    total_mem_accesses: int,
    total_duration_s: float,
    fragment_duration_s: float,
    mode: DependencyMode,
    priority: int = 0,
) -> Job:
    """Split a job into equal-duration fragments.

    The fragment count is ceil(total / fragment duration) and every
    fragment then gets exactly total/n seconds, so no short tail
    fragment exists. Operation counts split evenly with the remainder
    on the last fragment.
    """
    problems = []
    if not fragment_duration_s > 0:
        problems.append(
            f"job {job_id}: fragment_duration_s must be > 0, got {fragment_duration_s}"
        )
    if not total_duration_s > 0:
        problems.append(f"job {job_id}: total_duration_s must be > 0, got {total_duration_s}")
    elif fragment_duration_s > 0 and total_duration_s < fragment_duration_s:
        problems.append(
            f"job {job_id}: total_duration_s ({total_duration_s}) must be >= "
            f"fragment_duration_s ({fragment_duration_s})"
        )
    if total_flops < 0 or total_mem_accesses < 0:
        problems.append(f"job {job_id}: operation counts must be >= 0")
    if total_flops == 0 and total_mem_accesses == 0:
        problems.append(f"job {job_id}: empty work (no FLOPs, no accesses)")
    if problems:
        raise ConfigurationError(problems)

    # The tiny slack keeps an exact multiple from gaining a phantom
    # fragment through float rounding of the quotient.
    n = max(1, math.ceil(total_duration_s / fragment_duration_s - 1e-9))
    if total_flops < n and total_mem_accesses < n:
        raise ConfigurationError(
            f"job {job_id}: {n} fragments but only {total_flops} FLOPs and "
            f"{total_mem_accesses} accesses; every fragment needs some work"
        )
    nominal = total_duration_s / n
    flops_each = total_flops // n
    mem_each = total_mem_accesses // n

    fragments = []
    for i in range(n):
        last = i == n - 1
        fragments.append(
            Fragment(
                job_id=job_id,
                index=i,
                nominal_duration_s=nominal,
                flops=total_flops - flops_each * (n - 1) if last else flops_each,
                mem_accesses=total_mem_accesses - mem_each * (n - 1) if last else mem_each,
            )
        )
    return Job(id=job_id, fragments=fragments, dependency_mode=mode, priority=priority)


def assignable_fragments(job: Job) -> list:
    """Indices that may legally be started next.

    In-order: the single lowest-index fragment that is not completed
    (empty once the job is done). Out-of-order: every fragment that is
    neither completed nor running, in index order.
    """
    if job.dependency_mode is DependencyMode.IN_ORDER:
        for f in job.fragments[job.prefix_completed:]:
            if f.state is not FragmentState.COMPLETED:
                return [f.index]
        return []
    return [
        f.index
        for f in job.fragments[job.prefix_completed:]
        if f.state is FragmentState.PENDING
    ]


def first_assignable(job: Job):
    """Lowest startable (pending and assignable) index, or None.

    Equivalent to the head of assignable_fragments filtered to pending
    fragments; schedulers use it as a fast path on jobs whose fragments
    all share one workload class.
    """
    for f in job.fragments[job.prefix_completed:]:
        if f.state is FragmentState.PENDING:
            return f.index
        if (
            job.dependency_mode is DependencyMode.IN_ORDER
            and f.state is not FragmentState.COMPLETED
        ):
            return None
    return None


def begin_fragment(job: Job, index: int):
    """Pending -> Running. Illegal starts are scheduler bugs, not input errors."""
    fragment = _fragment(job, index)
    if fragment.state is not FragmentState.PENDING:
        raise SchedulerLogicError(
            f"cannot begin {job.id}[{index}]: state is {fragment.state.value}"
        )
    if index not in assignable_fragments(job):
        raise SchedulerLogicError(
            f"cannot begin {job.id}[{index}]: not assignable "
            f"(mode {job.dependency_mode.value})"
        )
    fragment.state = FragmentState.RUNNING
    fragment.elapsed_s = 0.0
    fragment.progress_s = 0.0
    job.running_index = index
    return fragment


def advance_fragment(fragment: Fragment, dt: float, adjusted_runtime_s: float):
    """Accrue one tick of progress against the temperature-adjusted runtime.

    Progress accumulates as dt * nominal / adjusted_runtime so that the
    fragment finishes exactly when its wall time matches the adjusted
    runtime under constant temperature, and consistently when the
    temperature drifts mid-fragment.
    """
    if fragment.state is not FragmentState.RUNNING:
        raise SchedulerLogicError(
            f"cannot advance {fragment.job_id}[{fragment.index}]: not running"
        )
    fragment.elapsed_s += dt
    fragment.progress_s += dt * fragment.nominal_duration_s / adjusted_runtime_s


def fragment_finished(fragment: Fragment) -> bool:
    return (
        fragment.state is FragmentState.RUNNING
        and fragment.progress_s >= fragment.nominal_duration_s - _COMPLETION_EPS
    )


def complete_fragment(job: Job, index: int, ledger: CheckpointLedger):
    """Running -> Completed (terminal); the ledger records the checkpoint."""
    fragment = _fragment(job, index)
    if not fragment_finished(fragment):
        raise SchedulerLogicError(
            f"cannot complete {job.id}[{index}]: state {fragment.state.value}, "
            f"progress {fragment.progress_s:.6f}/{fragment.nominal_duration_s:.6f} s"
        )
    fragment.state = FragmentState.COMPLETED
    fragment.progress_s = fragment.nominal_duration_s
    if job.running_index == index:
        job.running_index = None
    job._advance_prefix()
    ledger.record(job.id, index)
    return fragment


def preempt_fragment(job: Job, index: int) -> float:
    """Running -> Pending; in-flight progress is lost, completed siblings keep.

    Returns the nominal-scale progress discarded, for lost-work accounting.
    """
    fragment = _fragment(job, index)
    if fragment.state is not FragmentState.RUNNING:
        raise SchedulerLogicError(
            f"cannot preempt {job.id}[{index}]: state is {fragment.state.value}"
        )
    lost = fragment.progress_s
    fragment.state = FragmentState.PENDING
    fragment.elapsed_s = 0.0
    fragment.progress_s = 0.0
    if job.running_index == index:
        job.running_index = None
    return lost


def _fragment(job: Job, index: int) -> Fragment:
    if not 0 <= index < len(job.fragments):
        raise SchedulerLogicError(f"job {job.id} has no fragment {index}")
    return job.fragments[index]
