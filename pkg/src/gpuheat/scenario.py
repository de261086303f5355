"""Scenario files: strict JSON loading, validation, and the bundled default.

A scenario file has sections mirroring the simulator's domain types
(orbit, nodes, links, environment, gpu, jobs, policy, run), every field
named exactly as in its type and carrying that type's unit. Unknown keys
are fatal: a silent typo in a physical parameter corrupts an experiment.
All problems in a file are reported together, not one at a time.
"""

import json

from .errors import ConfigurationError
from .gpu import GpuModel
from .simulation import JobSpec, PolicyConfig, Scenario
from .scheduling import ThermostatConfig
from .thermal import OrbitProfile, ThermalEnvironment, ThermalLink, ThermalNode
from .workload import DependencyMode

DEFAULT_SCENARIO_NAMES = ("default", "default.scenario")

_REQUIRED = object()


class _Section:
    """Field extractor that records every problem instead of failing fast."""

    _TYPES = {
        "number": ((int, float), "a number"),
        "int": ((int,), "an integer"),
        "str": ((str,), "a string"),
        "bool": ((bool,), "a boolean"),
    }

    def __init__(self, name, data, problems):
        self.name = name
        self.problems = problems
        self.seen = set()
        if isinstance(data, dict):
            self.data = data
        else:
            self.data = {}
            problems.append(f"{name}: must be an object, got {type(data).__name__}")
        self.ok = True

    def get(self, key, kind, default=_REQUIRED):
        required = default is _REQUIRED
        self.seen.add(key)
        if key not in self.data:
            if required:
                self.problems.append(f"{self.name}.{key}: missing required field")
                self.ok = False
                return None
            return default
        value = self.data[key]
        expected, label = self._TYPES[kind]
        if isinstance(value, bool) and kind != "bool":
            self.problems.append(f"{self.name}.{key}: must be {label}, got a boolean")
            self.ok = False
            return None
        if not isinstance(value, expected):
            self.problems.append(
                f"{self.name}.{key}: must be {label}, got {value!r}"
            )
            self.ok = False
            return None
        return float(value) if kind == "number" else value

    def finish(self):
        for key in sorted(set(self.data) - self.seen):
            self.problems.append(f"{self.name}.{key}: unknown key")
            self.ok = False
        return self.ok


def _build(factory, kwargs, problems):
    try:
        return factory(**kwargs)
    except ConfigurationError as exc:
        problems.extend(exc.problems)
        return None


def parse_scenario(data: dict) -> Scenario:
    """Build a validated Scenario from parsed JSON, reporting every bad
    field at once."""
    problems = []
    if not isinstance(data, dict):
        raise ConfigurationError(
            [f"scenario: top level must be an object, got {type(data).__name__}"]
        )
    known_sections = {"orbit", "nodes", "links", "environment", "gpu", "jobs",
                      "policy", "run"}
    for key in sorted(set(data) - known_sections):
        problems.append(f"{key}: unknown section")

    orbit = None
    sec = _Section("orbit", data.get("orbit", {}), problems)
    kwargs = {
        "period_s": sec.get("period_s", "number"),
        "eclipse_fraction": sec.get("eclipse_fraction", "number"),
        "phase_offset_s": sec.get("phase_offset_s", "number", 0.0),
    }
    if sec.finish():
        orbit = _build(OrbitProfile, kwargs, problems)

    nodes = []
    raw_nodes = data.get("nodes", [])
    if not isinstance(raw_nodes, list) or not raw_nodes:
        problems.append("nodes: must be a non-empty list")
        raw_nodes = []
    for pos, raw in enumerate(raw_nodes):
        sec = _Section(f"nodes[{pos}]", raw, problems)
        kwargs = {
            "id": sec.get("id", "str"),
            "heat_capacity_j_per_k": sec.get("heat_capacity_j_per_k", "number"),
            "temperature_k": sec.get("temperature_k", "number"),
            "emissive_area_m2": sec.get("emissive_area_m2", "number", 0.0),
            "emissivity": sec.get("emissivity", "number", 0.0),
            "absorptive_area_m2": sec.get("absorptive_area_m2", "number", 0.0),
            "absorptivity": sec.get("absorptivity", "number", 0.0),
            "internal_load_w": sec.get("internal_load_w", "number", 0.0),
        }
        if sec.finish():
            node = _build(ThermalNode, kwargs, problems)
            if node is not None:
                nodes.append(node)

    links = []
    raw_links = data.get("links", [])
    if not isinstance(raw_links, list):
        problems.append("links: must be a list")
        raw_links = []
    for pos, raw in enumerate(raw_links):
        sec = _Section(f"links[{pos}]", raw, problems)
        kwargs = {
            "node_a": sec.get("node_a", "str"),
            "node_b": sec.get("node_b", "str"),
            "conductance_w_per_k": sec.get("conductance_w_per_k", "number"),
        }
        if sec.finish():
            link = _build(ThermalLink, kwargs, problems)
            if link is not None:
                links.append(link)

    environment = None
    sec = _Section("environment", data.get("environment", {}), problems)
    kwargs = {
        "solar_flux_w_per_m2": sec.get("solar_flux_w_per_m2", "number", 1361.0),
        "sink_temperature_k": sec.get("sink_temperature_k", "number", 2.7),
    }
    if sec.finish():
        environment = _build(ThermalEnvironment, kwargs, problems)

    gpu = None
    sec = _Section("gpu", data.get("gpu", {}), problems)
    defaults = GpuModel()
    kwargs = {
        "tdp_w": sec.get("tdp_w", "number", defaults.tdp_w),
        "idle_power_w": sec.get("idle_power_w", "number", defaults.idle_power_w),
        "leak_coeff_k": sec.get("leak_coeff_k", "number", None),
        "leak_exp_b": sec.get("leak_exp_b", "number", defaults.leak_exp_b),
        "mem_power_fraction": sec.get(
            "mem_power_fraction", "number", defaults.mem_power_fraction
        ),
        "exec_knee_c": sec.get("exec_knee_c", "number", defaults.exec_knee_c),
        "exec_slope_s_per_c": sec.get(
            "exec_slope_s_per_c", "number", defaults.exec_slope_s_per_c
        ),
        "mem_slope_s_per_c": sec.get(
            "mem_slope_s_per_c", "number", defaults.mem_slope_s_per_c
        ),
        "mem_ref_temp_c": sec.get("mem_ref_temp_c", "number", defaults.mem_ref_temp_c),
    }
    if sec.finish():
        gpu = _build(GpuModel, kwargs, problems)

    jobs = []
    raw_jobs = data.get("jobs", [])
    if not isinstance(raw_jobs, list):
        problems.append("jobs: must be a list")
        raw_jobs = []
    for pos, raw in enumerate(raw_jobs):
        sec = _Section(f"jobs[{pos}]", raw, problems)
        kwargs = {
            "id": sec.get("id", "str"),
            "total_flops": sec.get("total_flops", "int"),
            "total_mem_accesses": sec.get("total_mem_accesses", "int"),
            "total_duration_s": sec.get("total_duration_s", "number"),
            "fragment_duration_s": sec.get("fragment_duration_s", "number"),
            "priority": sec.get("priority", "int", 0),
        }
        mode = sec.get("dependency_mode", "str")
        ok = sec.finish()
        if mode is not None:
            try:
                kwargs["dependency_mode"] = DependencyMode(mode)
            except ValueError:
                problems.append(
                    f"jobs[{pos}].dependency_mode: must be in_order or out_of_order, "
                    f"got {mode!r}"
                )
                ok = False
        if ok:
            job = _build(JobSpec, kwargs, problems)
            if job is not None:
                jobs.append(job)

    policy = None
    sec = _Section("policy", data.get("policy", {}), problems)
    policy_id = sec.get("id", "str", "thermostat")
    thermostat_defaults = ThermostatConfig()
    thermostat_kwargs = {
        "band_low_c": sec.get("band_low_c", "number", thermostat_defaults.band_low_c),
        "band_high_c": sec.get("band_high_c", "number", thermostat_defaults.band_high_c),
        "control_node": sec.get("control_node", "str", thermostat_defaults.control_node),
        "exec_preference_threshold_c": sec.get(
            "exec_preference_threshold_c",
            "number",
            thermostat_defaults.exec_preference_threshold_c,
        ),
    }
    allow_sunlit = sec.get("allow_sunlit_compute", "bool", False)
    if sec.finish():
        thermostat = _build(ThermostatConfig, thermostat_kwargs, problems)
        if thermostat is not None:
            policy = _build(
                PolicyConfig,
                {
                    "id": policy_id,
                    "thermostat": thermostat,
                    "allow_sunlit_compute": allow_sunlit,
                },
                problems,
            )

    sec = _Section("run", data.get("run", {}), problems)
    run_kwargs = {
        "dt_s": sec.get("dt_s", "number", 1.0),
        "duration_s": sec.get("duration_s", "number"),
        "heater_rated_w": sec.get("heater_rated_w", "number", 200.0),
        "checkpoint_overhead_s": sec.get("checkpoint_overhead_s", "number", 0.5),
        "seed": sec.get("seed", "int", 0),
    }
    run_ok = sec.finish()

    if problems or None in (orbit, environment, gpu, policy) or not run_ok:
        raise ConfigurationError(problems or ["scenario: invalid"])

    scenario = _build(
        Scenario,
        {
            "orbit": orbit,
            "nodes": tuple(nodes),
            "links": tuple(links),
            "environment": environment,
            "gpu": gpu,
            "jobs": tuple(jobs),
            "policy": policy,
            **run_kwargs,
        },
        problems,
    )
    if scenario is None:
        raise ConfigurationError(problems)
    return scenario


def scenario_to_dict(scenario: Scenario) -> dict:
    """Inverse of parse_scenario, for writing scenario files."""
    return {
        "orbit": {
            "period_s": scenario.orbit.period_s,
            "eclipse_fraction": scenario.orbit.eclipse_fraction,
            "phase_offset_s": scenario.orbit.phase_offset_s,
        },
        "nodes": [
            {
                "id": n.id,
                "heat_capacity_j_per_k": n.heat_capacity_j_per_k,
                "temperature_k": n.temperature_k,
                "emissive_area_m2": n.emissive_area_m2,
                "emissivity": n.emissivity,
                "absorptive_area_m2": n.absorptive_area_m2,
                "absorptivity": n.absorptivity,
                "internal_load_w": n.internal_load_w,
            }
            for n in scenario.nodes
        ],
        "links": [
            {
                "node_a": link.node_a,
                "node_b": link.node_b,
                "conductance_w_per_k": link.conductance_w_per_k,
            }
            for link in scenario.links
        ],
        "environment": {
            "solar_flux_w_per_m2": scenario.environment.solar_flux_w_per_m2,
            "sink_temperature_k": scenario.environment.sink_temperature_k,
        },
        "gpu": {
            "tdp_w": scenario.gpu.tdp_w,
            "idle_power_w": scenario.gpu.idle_power_w,
            "leak_coeff_k": scenario.gpu.leak_coeff_k,
            "leak_exp_b": scenario.gpu.leak_exp_b,
            "mem_power_fraction": scenario.gpu.mem_power_fraction,
            "exec_knee_c": scenario.gpu.exec_knee_c,
            "exec_slope_s_per_c": scenario.gpu.exec_slope_s_per_c,
            "mem_slope_s_per_c": scenario.gpu.mem_slope_s_per_c,
            "mem_ref_temp_c": scenario.gpu.mem_ref_temp_c,
        },
        "jobs": [
            {
                "id": j.id,
                "total_flops": j.total_flops,
                "total_mem_accesses": j.total_mem_accesses,
                "total_duration_s": j.total_duration_s,
                "fragment_duration_s": j.fragment_duration_s,
                "dependency_mode": j.dependency_mode.value,
                "priority": j.priority,
            }
            for j in scenario.jobs
        ],
        "policy": {
            "id": scenario.policy.id,
            "band_low_c": scenario.policy.thermostat.band_low_c,
            "band_high_c": scenario.policy.thermostat.band_high_c,
            "control_node": scenario.policy.thermostat.control_node,
            "exec_preference_threshold_c": (
                scenario.policy.thermostat.exec_preference_threshold_c
            ),
            "allow_sunlit_compute": scenario.policy.allow_sunlit_compute,
        },
        "run": {
            "dt_s": scenario.dt_s,
            "duration_s": scenario.duration_s,
            "heater_rated_w": scenario.heater_rated_w,
            "checkpoint_overhead_s": scenario.checkpoint_overhead_s,
            "seed": scenario.seed,
        },
    }


def load_scenario(path) -> Scenario:
    """Parse a scenario file; the names in DEFAULT_SCENARIO_NAMES fall back
    to the built-in default when no such file exists on disk."""
    try:
        with open(path) as fh:
            text = fh.read()
    except FileNotFoundError:
        if str(path) in DEFAULT_SCENARIO_NAMES:
            return default_scenario()
        raise ConfigurationError([f"scenario file not found: {path}"]) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError([f"{path}: not valid JSON ({exc})"]) from None
    return parse_scenario(data)


def save_scenario(scenario: Scenario, path):
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2)
        fh.write("\n")


def default_scenario() -> Scenario:
    """The bundled default: a small LEO satellite whose body, absent any
    heating, falls below -40 °C within one eclipse, with a 250 W-class
    GPU able to cover the eclipse heat deficit and a mixed queue of
    compute- and memory-bound jobs sized to outlast ten orbits.

    All thermal magnitudes (capacities, areas, conductance) are
    calibration choices, not measured values.
    """
    # Sized so neither class runs out inside ten orbits: the thermostat
    # burns ~1600 s of compute-bound and ~300 s of memory-bound work per
    # 1890 s eclipse.
    exec_flops = 2_250_000_000_000
    exec_accesses = 15_000_000
    mem_flops = 9_000_000
    mem_accesses = 1_350_000_000_000
    return Scenario(
        orbit=OrbitProfile(period_s=5400.0, eclipse_fraction=0.35, phase_offset_s=0.0),
        nodes=(
            ThermalNode(
                id="gpu",
                heat_capacity_j_per_k=2000.0,
                temperature_k=293.15,
                emissive_area_m2=0.05,
                emissivity=0.10,
            ),
            ThermalNode(
                id="body",
                heat_capacity_j_per_k=1500.0,
                temperature_k=293.15,
                emissive_area_m2=0.7,
                emissivity=0.92,
                absorptive_area_m2=0.289,
                absorptivity=0.65,
                internal_load_w=9.2,
            ),
        ),
        links=(ThermalLink("gpu", "body", 25.0),),
        environment=ThermalEnvironment(),
        gpu=GpuModel(),
        jobs=(
            JobSpec(
                id="compute-batch-a",
                total_flops=exec_flops,
                total_mem_accesses=exec_accesses,
                total_duration_s=9000.0,
                fragment_duration_s=60.0,
                dependency_mode=DependencyMode.IN_ORDER,
                priority=0,
            ),
            JobSpec(
                id="compute-batch-b",
                total_flops=exec_flops,
                total_mem_accesses=exec_accesses,
                total_duration_s=9000.0,
                fragment_duration_s=60.0,
                dependency_mode=DependencyMode.OUT_OF_ORDER,
                priority=1,
            ),
            JobSpec(
                id="scan-batch-a",
                total_flops=mem_flops,
                total_mem_accesses=mem_accesses,
                total_duration_s=5400.0,
                fragment_duration_s=60.0,
                dependency_mode=DependencyMode.IN_ORDER,
                priority=0,
            ),
            JobSpec(
                id="scan-batch-b",
                total_flops=mem_flops,
                total_mem_accesses=mem_accesses,
                total_duration_s=5400.0,
                fragment_duration_s=60.0,
                dependency_mode=DependencyMode.OUT_OF_ORDER,
                priority=1,
            ),
        ),
        policy=PolicyConfig(
            id="thermostat",
            thermostat=ThermostatConfig(
                band_low_c=0.0,
                band_high_c=30.0,
                control_node="body",
                exec_preference_threshold_c=15.0,
            ),
            allow_sunlit_compute=False,
        ),
        dt_s=1.0,
        duration_s=54000.0,
        heater_rated_w=200.0,
        checkpoint_overhead_s=0.5,
        seed=0,
    )
