"""GPU power and runtime as functions of workload class and temperature.

The GPU is the heat engine of the design: dynamic power depends on how
compute-bound the running kernel is, static (leakage) power grows with
temperature as T^2 exp(-b/T), and runtime degrades with temperature —
sharply above a knee for compute-bound work, mildly and linearly for
memory-bound work.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ConfigurationError

# Arithmetic-intensity thresholds (FLOPs per memory access) splitting
# workloads into the two extreme classes.
EXECUTION_DOMINATED_MIN_INTENSITY = 100.0
MEMORY_DOMINATED_MAX_INTENSITY = 0.01

LEAK_CALIBRATION_TEMP_K = 350.0
LEAK_CALIBRATION_FRACTION = 0.10


class WorkloadKind(Enum):
    EXECUTION_DOMINATED = "execution-dominated"
    MEMORY_DOMINATED = "memory-dominated"
    MIXED = "mixed"


@dataclass(frozen=True)
class WorkloadClass:
    """Heat class of a kernel: its kind plus the raw arithmetic intensity.

    intensity is FLOPs per memory access (math.inf when the kernel makes
    no memory accesses at all).
    """

    kind: WorkloadKind
    intensity: float

    def __str__(self):
        if self.kind is WorkloadKind.MIXED:
            return f"mixed({self.intensity})"
        return self.kind.value


EXECUTION_DOMINATED = WorkloadClass(WorkloadKind.EXECUTION_DOMINATED, math.inf)
MEMORY_DOMINATED = WorkloadClass(WorkloadKind.MEMORY_DOMINATED, 0.0)


def classify_workload(flops: int, mem_accesses: int) -> WorkloadClass:
    """Classify by FLOPs per memory access.

    > 100 is execution-dominated, < 0.01 is memory-dominated, anything
    between is mixed. Zero accesses with nonzero FLOPs counts as
    infinite intensity; zero work is an error.
    """
    if flops < 0 or mem_accesses < 0:
        raise ValueError(f"counts must be >= 0, got flops={flops}, mem_accesses={mem_accesses}")
    if mem_accesses == 0:
        if flops == 0:
            raise ValueError("empty work: flops == 0 and mem_accesses == 0")
        intensity = math.inf
    else:
        intensity = flops / mem_accesses
    if intensity > EXECUTION_DOMINATED_MIN_INTENSITY:
        return WorkloadClass(WorkloadKind.EXECUTION_DOMINATED, intensity)
    if intensity < MEMORY_DOMINATED_MAX_INTENSITY:
        return WorkloadClass(WorkloadKind.MEMORY_DOMINATED, intensity)
    return WorkloadClass(WorkloadKind.MIXED, intensity)


@dataclass(frozen=True)
class KernelSpec:
    """Loop-structured kernel described by per-iteration operation counts.

    Counting convention: only floating-point arithmetic in the loop body
    counts as FLOPs; integer address arithmetic and loop counters count
    zero. Each distinct array read/write in the body counts once per
    iteration; a value loaded into a register before the loop counts as
    one access total (base_mem_accesses).
    """

    name: str
    flops_per_iteration: int
    mem_accesses_per_iteration: int
    iterations: int
    base_flops: int = 0
    base_mem_accesses: int = 0

    def __post_init__(self):
        problems = []
        for f in ("flops_per_iteration", "mem_accesses_per_iteration",
                  "base_flops", "base_mem_accesses"):
            if getattr(self, f) < 0:
                problems.append(f"kernel {self.name}: {f} must be >= 0")
        if self.iterations <= 0:
            problems.append(
                f"kernel {self.name}: iterations must be > 0, got {self.iterations}"
            )
        if problems:
            raise ConfigurationError(problems)


def kernel_to_counts(kernel: KernelSpec) -> tuple:
    """Total (flops, mem_accesses) for one element's pass over the kernel."""
    flops = kernel.base_flops + kernel.flops_per_iteration * kernel.iterations
    mem = kernel.base_mem_accesses + kernel.mem_accesses_per_iteration * kernel.iterations
    if flops == 0 and mem == 0:
        raise ValueError(f"kernel {kernel.name}: empty work (no FLOPs, no accesses)")
    return flops, mem


# Reference kernels: a multiply/divide chain over a register-cached value
# (5 FLOPs per iteration, one load total) and a streaming 4-read
# accumulation run 150x longer to match wall time.
TEST_SIZE = 300_000
MEMORY_WORKLOAD_FACTOR = 150

EXECUTION_KERNEL = KernelSpec(
    name="execution-dominated",
    flops_per_iteration=5,
    mem_accesses_per_iteration=0,
    iterations=TEST_SIZE,
    base_mem_accesses=1,
)

MEMORY_KERNEL = KernelSpec(
    name="memory-dominated",
    flops_per_iteration=0,
    mem_accesses_per_iteration=4,
    iterations=TEST_SIZE * MEMORY_WORKLOAD_FACTOR,
)


def calibrated_leak_coefficient(
    tdp_w: float,
    leak_exp_b: float,
    fraction: float = LEAK_CALIBRATION_FRACTION,
    reference_temp_k: float = LEAK_CALIBRATION_TEMP_K,
) -> float:
    """Leak coefficient such that leakage(reference_temp) = fraction * TDP.

    The leakage law's shape is physical; its magnitude is a calibration
    choice, made explicit here and overridable per scenario.
    """
    return fraction * tdp_w / (reference_temp_k**2 * math.exp(-leak_exp_b / reference_temp_k))


@dataclass(frozen=True)
class GpuModel:
    """Power and runtime-degradation parameters of one GPU.

    leak_coeff_k defaults to the 10%-of-TDP-at-350K calibration when not
    given. Slopes: compute-bound runtime is flat below exec_knee_c and
    grows exec_slope_s_per_c per degree above it; memory-bound runtime
    grows mem_slope_s_per_c per degree above mem_ref_temp_c (clamped at
    zero below, keeping runtime >= nominal).
    """

    tdp_w: float = 250.0
    idle_power_w: float = 25.0
    leak_coeff_k: float = None     # W/K²; None -> calibrated from TDP
    leak_exp_b: float = 2500.0     # K
    mem_power_fraction: float = 0.55
    exec_knee_c: float = 73.0
    exec_slope_s_per_c: float = 0.200
    mem_slope_s_per_c: float = 0.00324
    mem_ref_temp_c: float = 40.0

    def __post_init__(self):
        if self.leak_coeff_k is None:
            object.__setattr__(
                self, "leak_coeff_k", calibrated_leak_coefficient(self.tdp_w, self.leak_exp_b)
            )
        problems = []
        if not self.tdp_w > 0:
            problems.append(f"gpu.tdp_w: must be > 0, got {self.tdp_w}")
        if not 0 <= self.idle_power_w < self.tdp_w:
            problems.append(
                f"gpu.idle_power_w: must be in [0, tdp_w), got {self.idle_power_w}"
            )
        if self.leak_coeff_k < 0:
            problems.append(f"gpu.leak_coeff_k: must be >= 0, got {self.leak_coeff_k}")
        if not self.leak_exp_b > 0:
            problems.append(f"gpu.leak_exp_b: must be > 0, got {self.leak_exp_b}")
        if not 0 < self.mem_power_fraction <= 1:
            problems.append(
                f"gpu.mem_power_fraction: must be in (0, 1], got {self.mem_power_fraction}"
            )
        if not self.exec_slope_s_per_c > self.mem_slope_s_per_c:
            problems.append(
                "gpu.exec_slope_s_per_c: must exceed mem_slope_s_per_c "
                f"({self.exec_slope_s_per_c} vs {self.mem_slope_s_per_c})"
            )
        if self.exec_slope_s_per_c < 0 or self.mem_slope_s_per_c < 0:
            problems.append("gpu slopes must be >= 0")
        if problems:
            raise ConfigurationError(problems)


def leakage_power(model: GpuModel, temp_k: float) -> float:
    """Subthreshold leakage k * T^2 * exp(-b/T); strictly increasing in T."""
    if not temp_k > 0:
        raise ValueError(f"temp_k must be > 0, got {temp_k}")
    return model.leak_coeff_k * temp_k**2 * math.exp(-model.leak_exp_b / temp_k)


def _mix_weight(intensity: float) -> float:
    """Position of a mixed intensity between the two thresholds, in log10."""
    lo = math.log10(MEMORY_DOMINATED_MAX_INTENSITY)
    hi = math.log10(EXECUTION_DOMINATED_MIN_INTENSITY)
    w = (math.log10(intensity) - lo) / (hi - lo)
    return min(1.0, max(0.0, w))


def dynamic_power(model: GpuModel, workload: WorkloadClass) -> float:
    """Temperature-independent part of gpu_power for a given class.

    Used by schedulers to rank candidate fragments by heat output:
    leakage is common to all candidates at a given instant, so this
    ordering equals the full gpu_power ordering.
    """
    if workload is None:
        return model.idle_power_w
    if workload.kind is WorkloadKind.EXECUTION_DOMINATED:
        return model.tdp_w
    mem_level = model.idle_power_w + model.mem_power_fraction * (model.tdp_w - model.idle_power_w)
    if workload.kind is WorkloadKind.MEMORY_DOMINATED:
        return mem_level
    w = _mix_weight(workload.intensity)
    return mem_level + w * (model.tdp_w - mem_level)


def gpu_power(model: GpuModel, workload, temp_k: float) -> float:
    """Electrical power (== heat output) in watts; workload None means idle.

    Execution-dominated work draws TDP, memory-dominated work draws
    idle + mem_power_fraction of the dynamic range, mixed work
    interpolates log-linearly in intensity between those levels.
    Leakage is added on top in every state.
    """
    return dynamic_power(model, workload) + leakage_power(model, temp_k)


def runtime_at_temperature(
    model: GpuModel, workload: WorkloadClass, nominal_s: float, temp_c: float
) -> float:
    """Wall time of a nominally nominal_s-long kernel at temp_c.

    Never below nominal_s. Mixed classes interpolate the two penalties
    log-linearly in intensity.
    """
    if not nominal_s > 0:
        raise ValueError(f"nominal_s must be > 0, got {nominal_s}")
    exec_penalty = model.exec_slope_s_per_c * max(0.0, temp_c - model.exec_knee_c)
    mem_penalty = model.mem_slope_s_per_c * max(0.0, temp_c - model.mem_ref_temp_c)
    if workload.kind is WorkloadKind.EXECUTION_DOMINATED:
        penalty = exec_penalty
    elif workload.kind is WorkloadKind.MEMORY_DOMINATED:
        penalty = mem_penalty
    else:
        w = _mix_weight(workload.intensity)
        penalty = mem_penalty + w * (exec_penalty - mem_penalty)
    return nominal_s + penalty
