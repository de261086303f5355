"""Fixtures that produce real traces by invoking the simulator CLI.

The report package consumes the simulator only through its external
interfaces: scenario JSON in, trace CSV out. These fixtures write
scenario files, shell out to `python -m gpuheat simulate`, and hand the
resulting CSVs to the tests.
"""

import json
import shutil
import subprocess
import sys

import pytest

# A thermal setup whose GPU sweeps from ~53 °C to ~110 °C while a
# compute-bound job runs fragment after fragment: points on both sides of
# the 73 °C runtime knee.
KNEE_SCENARIO = {
    "orbit": {"period_s": 100000.0, "eclipse_fraction": 0.99, "phase_offset_s": 0.0},
    "nodes": [
        {
            "id": "gpu",
            "heat_capacity_j_per_k": 800.0,
            "temperature_k": 321.15,
            "emissive_area_m2": 0.05,
            "emissivity": 0.1,
        },
        {
            "id": "body",
            "heat_capacity_j_per_k": 4000.0,
            "temperature_k": 321.15,
            "emissive_area_m2": 0.27,
            "emissivity": 0.9,
            "internal_load_w": 9.2,
        },
    ],
    "links": [{"node_a": "gpu", "node_b": "body", "conductance_w_per_k": 50.0}],
    "environment": {},
    "gpu": {},
    "jobs": [
        {
            "id": "sweep",
            "total_flops": 2_000_000_000_000,
            "total_mem_accesses": 2_000_000,
            "total_duration_s": 3600.0,
            "fragment_duration_s": 10.0,
            "dependency_mode": "out_of_order",
            "priority": 0,
        }
    ],
    "policy": {
        "id": "always_run",
        "band_low_c": 0.0,
        "band_high_c": 30.0,
        "control_node": "body",
        "exec_preference_threshold_c": 15.0,
    },
    "run": {
        "dt_s": 0.25,
        "duration_s": 3800.0,
        "heater_rated_w": 0.0,
        "checkpoint_overhead_s": 0.25,
        "seed": 0,
    },
}


def _leo_scenario(job):
    """Two-orbit LEO scenario with a single-class job queue."""
    return {
        "orbit": {"period_s": 5400.0, "eclipse_fraction": 0.35, "phase_offset_s": 0.0},
        "nodes": [
            {
                "id": "gpu",
                "heat_capacity_j_per_k": 2000.0,
                "temperature_k": 293.15,
                "emissive_area_m2": 0.05,
                "emissivity": 0.1,
            },
            {
                "id": "body",
                "heat_capacity_j_per_k": 1500.0,
                "temperature_k": 293.15,
                "emissive_area_m2": 0.7,
                "emissivity": 0.92,
                "absorptive_area_m2": 0.289,
                "absorptivity": 0.65,
                "internal_load_w": 9.2,
            },
        ],
        "links": [{"node_a": "gpu", "node_b": "body", "conductance_w_per_k": 25.0}],
        "environment": {},
        "gpu": {},
        "jobs": [job],
        "policy": {
            "id": "thermostat",
            "band_low_c": 0.0,
            "band_high_c": 30.0,
            "control_node": "body",
            "exec_preference_threshold_c": 15.0,
        },
        "run": {
            "dt_s": 1.0,
            "duration_s": 10800.0,
            "heater_rated_w": 200.0,
            "checkpoint_overhead_s": 0.5,
            "seed": 0,
        },
    }


EXEC_ONLY_SCENARIO = _leo_scenario(
    {
        "id": "compute",
        "total_flops": 2_250_000_000_000,
        "total_mem_accesses": 15_000_000,
        "total_duration_s": 9000.0,
        "fragment_duration_s": 60.0,
        "dependency_mode": "out_of_order",
        "priority": 0,
    }
)

MEMORY_ONLY_SCENARIO = _leo_scenario(
    {
        "id": "scan",
        "total_flops": 15_000_000,
        "total_mem_accesses": 2_250_000_000_000,
        "total_duration_s": 9000.0,
        "fragment_duration_s": 60.0,
        "dependency_mode": "out_of_order",
        "priority": 0,
    }
)


def simulate(scenario: dict, workdir, name: str):
    """Run the simulator CLI on a scenario dict; returns the trace path."""
    scenario_path = workdir / f"{name}.scenario"
    trace_path = workdir / f"{name}.trace.csv"
    summary_path = workdir / f"{name}.summary.json"
    scenario_path.write_text(json.dumps(scenario))
    result = subprocess.run(
        [
            sys.executable,
            "-m",
            "gpuheat",
            "simulate",
            str(scenario_path),
            "--trace",
            str(trace_path),
            "--summary",
            str(summary_path),
        ],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0, f"simulator failed:\n{result.stderr}"
    return trace_path


def _simulator_available():
    probe = subprocess.run(
        [sys.executable, "-m", "gpuheat", "classify", "--flops", "150",
         "--accesses", "1"],
        capture_output=True,
    )
    return probe.returncode == 0


@pytest.fixture(scope="session")
def simulator():
    if not _simulator_available():
        pytest.skip("gpuheat simulator CLI not installed")
    return simulate


@pytest.fixture(scope="session")
def knee_trace(simulator, tmp_path_factory):
    return simulator(KNEE_SCENARIO, tmp_path_factory.mktemp("knee"), "knee")


@pytest.fixture(scope="session")
def exec_memory_traces(simulator, tmp_path_factory):
    workdir = tmp_path_factory.mktemp("pair")
    return (
        simulator(EXEC_ONLY_SCENARIO, workdir, "exec"),
        simulator(MEMORY_ONLY_SCENARIO, workdir, "memory"),
    )
