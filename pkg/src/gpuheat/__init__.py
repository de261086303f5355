"""Thermal-aware GPU scheduling simulator for eclipse-phase satellite heating."""

from .errors import (
    CatalogError,
    ConfigurationError,
    GpuHeatError,
    ModelError,
    NumericalError,
    SchedulerLogicError,
    StabilityWarning,
)
from .gpu import (
    EXECUTION_KERNEL,
    MEMORY_KERNEL,
    GpuModel,
    KernelSpec,
    WorkloadClass,
    WorkloadKind,
    calibrated_leak_coefficient,
    classify_workload,
    gpu_power,
    kernel_to_counts,
    leakage_power,
    runtime_at_temperature,
)
from .hardware import (
    BUILTIN_CATALOG,
    ProductKind,
    ProductSpec,
    best_by,
    cost_ratio,
    load_catalog,
    price_efficiency,
    save_catalog,
    size_efficiency,
    stacked_heater_volume,
)
from .scenario import default_scenario, load_scenario, parse_scenario, save_scenario
from .scheduling import (
    Decision,
    DecisionKind,
    ThermostatConfig,
    baseline_always_run,
    baseline_never_run,
    thermostat_decide,
)
from .simulation import (
    JobSpec,
    PolicyConfig,
    Scenario,
    Summary,
    TraceRecord,
    TRACE_HEADER,
    compare_policies,
    run_simulation,
    run_to_files,
    with_policy,
    write_trace,
)
from .thermal import (
    OrbitProfile,
    Phase,
    ThermalEnvironment,
    ThermalLink,
    ThermalNode,
    ThermalState,
    equilibrium_temperature,
    net_heat_flow,
    orbital_phase,
    step_thermal,
)
from .workload import (
    CheckpointLedger,
    DependencyMode,
    Fragment,
    FragmentState,
    Job,
    assignable_fragments,
    begin_fragment,
    complete_fragment,
    fragment_job,
    preempt_fragment,
)

__version__ = "0.1.0"
