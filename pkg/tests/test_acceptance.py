"""Acceptance suite: one test per release criterion, each printing a
PASS line with its measured numbers (run with -s to see them inline).

Hardware-dependent absolute temperatures are out of reach at desk scale;
these criteria pin model arithmetic, invariant properties, and
simulator-level shape reproductions instead.
"""

import math
import random
import time
from dataclasses import replace
from pathlib import Path

import pytest

from gpuheat.cli import main
from gpuheat.gpu import (
    GpuModel,
    KernelSpec,
    WorkloadKind,
    classify_workload,
    kernel_to_counts,
    leakage_power,
    runtime_at_temperature,
)
from gpuheat.hardware import (
    BUILTIN_CATALOG,
    ProductKind,
    best_by,
    cost_ratio,
    format_price_efficiency,
    format_size_efficiency,
    price_efficiency,
    size_efficiency,
)
from gpuheat.scenario import default_scenario
from gpuheat.scheduling import DecisionKind
from gpuheat.simulation import compare_policies, run_simulation, with_policy
from gpuheat.thermal import (
    Phase,
    ThermalEnvironment,
    ThermalNode,
    equilibrium_temperature,
    initial_state,
    net_heat_flow,
    step_thermal,
)
from gpuheat.workload import (
    CheckpointLedger,
    DependencyMode,
    FragmentState,
    advance_fragment,
    assignable_fragments,
    begin_fragment,
    complete_fragment,
    fragment_finished,
    fragment_job,
    preempt_fragment,
)

REPO_ROOT = Path(__file__).resolve().parent.parent


def test_table1_arithmetic():
    """Catalog efficiency figures at displayed rounding; cost ratio ~ 1/9."""
    t0 = time.monotonic()

    def product(name):
        return next(p for p in BUILTIN_CATALOG if p.name == name)

    arc = product("ASRock Intel ARC A380 6GB")
    omega = product("Omega Polyimide Heater Kit")
    gtx980 = product("MSI GTX 980 GAMING 4G")
    minco = product("Minco Polyimide Thermofoil")

    assert format_price_efficiency(price_efficiency(arc)) == "1.47"
    assert format_price_efficiency(price_efficiency(omega)) == "12.58"
    assert format_size_efficiency(size_efficiency(gtx980)) == "8.5"
    assert format_size_efficiency(size_efficiency(minco)) == "0.013"

    best_gpu = best_by(BUILTIN_CATALOG, "price", ProductKind.GPU)
    best_heater = best_by(BUILTIN_CATALOG, "price", ProductKind.HEATER)
    assert best_gpu == arc and best_heater == omega
    ratio = cost_ratio(best_gpu, best_heater)
    assert round(1.0 / ratio) == 9

    elapsed = time.monotonic() - t0
    assert elapsed < 1.0
    print(
        f"\nACCEPTANCE PASS: table-1 arithmetic "
        f"(1.47/12.58 $/W, 8.5/0.013 cm3/W, ratio {ratio:.4f} ~ 1/9, {elapsed:.2f}s)"
    )


def test_classification_thresholds_and_roundtrip():
    """Threshold classifications exact; 1000 random kernel specs agree with
    a brute-force reclassification oracle."""
    assert classify_workload(150, 1).kind is WorkloadKind.EXECUTION_DOMINATED
    assert classify_workload(5, 1000).kind is WorkloadKind.MEMORY_DOMINATED  # 0.005
    assert classify_workload(10, 10).kind is WorkloadKind.MIXED  # 1.0

    rng = random.Random(20240809)
    cases = 0
    while cases < 1000:
        spec = KernelSpec(
            name=f"rnd{cases}",
            flops_per_iteration=rng.randrange(0, 200),
            mem_accesses_per_iteration=rng.randrange(0, 200),
            iterations=rng.randrange(1, 1_000_000),
            base_flops=rng.randrange(0, 5),
            base_mem_accesses=rng.randrange(0, 5),
        )
        try:
            flops, mem = kernel_to_counts(spec)
        except ValueError:
            continue
        got = classify_workload(flops, mem)

        # oracle: recompute the totals and reclassify with bare comparisons
        oracle_flops = spec.base_flops + spec.flops_per_iteration * spec.iterations
        oracle_mem = spec.base_mem_accesses + spec.mem_accesses_per_iteration * spec.iterations
        if oracle_mem == 0:
            expected = WorkloadKind.EXECUTION_DOMINATED
        else:
            intensity = oracle_flops / oracle_mem
            if intensity > 100.0:
                expected = WorkloadKind.EXECUTION_DOMINATED
            elif intensity < 0.01:
                expected = WorkloadKind.MEMORY_DOMINATED
            else:
                expected = WorkloadKind.MIXED
        assert got.kind is expected, spec
        assert (flops, mem) == (oracle_flops, oracle_mem)
        cases += 1

    print(f"\nACCEPTANCE PASS: classification thresholds + {cases} round-trips")


def test_runtime_degradation_model():
    """Knee and slope values reproduced to 1e-9 relative."""
    model = GpuModel()
    exec_cls = classify_workload(1000, 1)
    mem_cls = classify_workload(1, 1000)

    assert runtime_at_temperature(model, exec_cls, 1.0, 60.0) == pytest.approx(
        1.0, rel=1e-9
    )
    assert runtime_at_temperature(model, exec_cls, 1.0, 80.0) == pytest.approx(
        2.4, rel=1e-9
    )
    assert runtime_at_temperature(model, mem_cls, 1.0, 70.0) == pytest.approx(
        1.0972, rel=1e-9
    )
    print("\nACCEPTANCE PASS: runtime degradation (1.0s@60C, 2.4s@80C, 1.0972s@70C)")


def test_leakage_law():
    """Monotone on [200, 400] K; zero at zero coefficient; calibration holds."""
    model = GpuModel()
    grid = [200.0 + k for k in range(201)]
    values = [leakage_power(model, t) for t in grid]
    assert all(b > a for a, b in zip(values, values[1:]))

    dead = GpuModel(leak_coeff_k=0.0)
    assert all(leakage_power(dead, t) == 0.0 for t in grid)

    assert leakage_power(model, 350.0) == pytest.approx(0.10 * model.tdp_w, rel=1e-9)
    print(
        f"\nACCEPTANCE PASS: leakage law (monotone on 201-point grid, "
        f"{leakage_power(model, 350.0):.9f} W at 350 K = 10% of TDP)"
    )


def test_thermal_integrator():
    """Per-step energy bookkeeping over a 10-orbit run at 1e-9 relative;
    steady state within 0.1 K of the analytic fourth-root oracle."""
    t0 = time.monotonic()
    scenario = default_scenario()
    nodes = {n.id: n for n in scenario.nodes}
    steps = 0

    def audit(step):
        nonlocal steps
        for node in scenario.nodes:
            q = net_heat_flow(
                node,
                step.state_before,
                scenario.environment,
                scenario.links,
                step.phase,
                step.applied_power_w.get(node.id, 0.0),
            )
            t_after = step.state_after.node_temperatures[node.id]
            delta = t_after - step.state_before.node_temperatures[node.id]
            capacity = nodes[node.id].heat_capacity_j_per_k
            lhs = capacity * delta
            rhs = q * scenario.dt_s
            # 1e-9 relative, floored by one ulp of the stored temperature:
            # the energy resolution the state representation itself has
            floor = capacity * math.ulp(t_after)
            assert abs(lhs - rhs) <= 1e-9 * max(abs(lhs), abs(rhs)) + floor
        steps += 1

    run_simulation(scenario, on_step=audit)
    assert steps == 54000

    env = ThermalEnvironment()
    node = ThermalNode(
        id="r",
        heat_capacity_j_per_k=400.0,
        temperature_k=250.0,
        emissive_area_m2=0.1,
        emissivity=0.9,
    )
    oracle = equilibrium_temperature(180.0, node, env)
    state = initial_state([node])
    for _ in range(30000):
        state = step_thermal(state, [node], [], env, Phase.ECLIPSE, {"r": 180.0}, 1.0)
    assert state.node_temperatures["r"] == pytest.approx(oracle, abs=0.1)

    elapsed = time.monotonic() - t0
    assert elapsed < 10.0
    print(
        f"\nACCEPTANCE PASS: thermal integrator ({steps} audited steps, "
        f"steady state {state.node_temperatures['r']:.3f} K vs oracle "
        f"{oracle:.3f} K, {elapsed:.1f}s)"
    )


def test_temperature_rise_shape():
    """Compute-bound queue: strictly higher GPU peak, reaches ambient+10 C
    strictly sooner than a memory-bound queue, all else identical."""
    scenario = default_scenario()
    ambient_c = scenario.nodes[0].temperature_k - 273.15
    target_c = ambient_c + 10.0

    def first_crossing(trace):
        return next((r.time_s for r in trace if r.temp_gpu_c >= target_c), math.inf)

    exec_sc = replace(
        scenario, jobs=tuple(j for j in scenario.jobs if j.id.startswith("compute"))
    )
    mem_sc = replace(
        scenario, jobs=tuple(j for j in scenario.jobs if j.id.startswith("scan"))
    )
    exec_trace, exec_summary = run_simulation(exec_sc)
    mem_trace, mem_summary = run_simulation(mem_sc)

    exec_peak = exec_summary.peak_temperature_c["gpu"]
    mem_peak = mem_summary.peak_temperature_c["gpu"]
    t_exec = first_crossing(exec_trace)
    t_mem = first_crossing(mem_trace)

    assert exec_peak > mem_peak
    assert t_exec < t_mem

    mem_cross = "never" if t_mem == math.inf else f"{t_mem:.0f}s"
    print(
        f"\nACCEPTANCE PASS: temperature-rise shape (peaks {exec_peak:.2f} > "
        f"{mem_peak:.2f} C; +10C at {t_exec:.0f}s vs {mem_cross})"
    )


def _random_queue(rng):
    jobs = []
    for k in range(rng.randrange(1, 6)):
        n_fragments = rng.randrange(2, 12)
        fragment_s = rng.uniform(10.0, 60.0)
        total_s = fragment_s * n_fragments * rng.uniform(0.82, 1.0)
        if total_s < fragment_s:
            total_s = fragment_s
        mem = rng.randrange(10**4, 10**8)
        intensity = 10.0 ** rng.uniform(-5.0, 5.0)
        flops = max(int(mem * intensity), n_fragments + 1)
        jobs.append(
            dict(
                id=f"job{k}",
                total_flops=flops,
                total_mem_accesses=mem,
                total_duration_s=total_s,
                fragment_duration_s=fragment_s,
                dependency_mode=rng.choice(list(DependencyMode)),
                priority=rng.randrange(0, 4),
            )
        )
    return jobs


def test_scheduler_safety_and_tracking():
    """1000 randomized queues: no in-order violation, no sunlit compute,
    every start assignable. Default 10-orbit run: eclipse band violations
    <= 5% after orbit one; thermostat heater energy <= heater baseline."""
    t0 = time.monotonic()
    from gpuheat.simulation import JobSpec

    base = default_scenario()
    rng = random.Random(424242)
    runs = 0
    decisions_checked = 0

    for case in range(1000):
        specs = tuple(JobSpec(**kw) for kw in _random_queue(rng))
        scenario = replace(
            base,
            jobs=specs,
            dt_s=5.0,
            duration_s=base.orbit.period_s,
            checkpoint_overhead_s=rng.choice([0.0, 0.5, 2.0]),
        )

        def check(step):
            nonlocal decisions_checked
            decision = step.decision
            if step.phase is Phase.SUNLIT:
                assert decision.kind not in (
                    DecisionKind.RUN_FRAGMENT,
                    DecisionKind.CONTINUE_RUNNING,
                ), "sunlit compute with the flag off"
            if decision.kind is DecisionKind.RUN_FRAGMENT:
                job = next(j for j in step.jobs if j.id == decision.job_id)
                fragment = job.fragments[decision.fragment_index]
                # the fragment just began; it must have been assignable,
                # and in-order jobs must have every lower index completed
                assert fragment.state is FragmentState.RUNNING
                if job.dependency_mode is DependencyMode.IN_ORDER:
                    assert all(
                        f.state is FragmentState.COMPLETED
                        for f in job.fragments[: decision.fragment_index]
                    ), "in-order violation"
                    assert assignable_fragments(job) == [decision.fragment_index]
                else:
                    others = [
                        f
                        for f in job.fragments
                        if f.state is FragmentState.RUNNING
                        and f.index != decision.fragment_index
                    ]
                    assert not others, "two fragments running in one job"
                decisions_checked += 1

        run_simulation(scenario, on_step=check)
        runs += 1

    scenario = default_scenario()
    rows = compare_policies(scenario, ["thermostat", "never_run"])
    thermostat, never = rows
    band = thermostat.summary.band_violation_fraction
    assert band <= 0.05
    assert thermostat.summary.heater_energy_j <= never.summary.heater_energy_j

    elapsed = time.monotonic() - t0
    assert elapsed < 120.0
    print(
        f"\nACCEPTANCE PASS: scheduler safety ({runs} randomized runs, "
        f"{decisions_checked} starts checked; band violations {band:.2%}, "
        f"heater {thermostat.summary.heater_energy_j:.0f} J <= "
        f"{never.summary.heater_energy_j:.0f} J; {elapsed:.0f}s)"
    )


def test_preemption_semantics():
    """>= 500 randomized preemption storms: only in-flight progress lost,
    bounded by preemptions x fragment duration; ledger only grows."""
    rng = random.Random(7777)
    cases = 0
    while cases < 500:
        n = rng.randrange(1, 10)
        mode = rng.choice(list(DependencyMode))
        duration = rng.uniform(20.0, 200.0)
        job = fragment_job(
            f"storm{cases}", 10**10, 10**7, duration, duration / n, mode
        )
        fragment_duration = job.fragments[0].nominal_duration_s
        ledger = CheckpointLedger(rng.choice([0.0, 0.5]))
        preemptions = 0
        lost = 0.0
        completed_before = set()
        for _ in range(rng.randrange(10, 150)):
            running = job.running_fragment()
            if running is None:
                startable = [
                    i
                    for i in assignable_fragments(job)
                    if job.fragments[i].state is FragmentState.PENDING
                ]
                if not startable:
                    break
                begin_fragment(job, rng.choice(startable))
                continue
            if rng.random() < 0.45:
                # hot GPU: progress may accrue slower than wall time
                slowdown = rng.uniform(1.0, 2.0)
                advance_fragment(
                    running,
                    rng.uniform(0.05, 1.2) * fragment_duration,
                    slowdown * fragment_duration,
                )
                if fragment_finished(running):
                    complete_fragment(job, running.index, ledger)
            else:
                lost += preempt_fragment(job, running.index)
                preemptions += 1

            completed_now = set(ledger.completed.get(job.id, set()))
            assert completed_before <= completed_now, "completed set shrank"
            completed_before = completed_now
            for i in completed_now:
                assert job.fragments[i].state is FragmentState.COMPLETED

        assert lost <= preemptions * fragment_duration + 1e-9
        cases += 1

    print(f"\nACCEPTANCE PASS: preemption semantics ({cases} storms)")


def test_simulate_determinism(tmp_path):
    """Two CLI runs of the bundled default scenario produce byte-identical
    trace files."""
    scenario_path = str(REPO_ROOT / "default.scenario")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert (
        main(["simulate", scenario_path, "--trace", str(a),
              "--summary", str(tmp_path / "a.json")]) == 0
    )
    assert (
        main(["simulate", scenario_path, "--trace", str(b),
              "--summary", str(tmp_path / "b.json")]) == 0
    )
    a_bytes = a.read_bytes()
    assert a_bytes == b.read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    print(
        f"\nACCEPTANCE PASS: determinism (two runs, {len(a_bytes)} identical bytes)"
    )
