"""Tests for thermostat and baseline scheduling decisions."""

import random

import pytest

from gpuheat.errors import ConfigurationError
from gpuheat.gpu import GpuModel, WorkloadKind
from gpuheat.scheduling import (
    DecisionKind,
    ThermostatConfig,
    baseline_always_run,
    baseline_never_run,
    thermostat_decide,
)
from gpuheat.thermal import Phase
from gpuheat.workload import (
    CheckpointLedger,
    DependencyMode,
    advance_fragment,
    begin_fragment,
    complete_fragment,
    fragment_job,
)


EXEC_COUNTS = (10**9, 100)       # intensity 1e7
MEM_COUNTS = (100, 10**9)        # intensity 1e-7


@pytest.fixture
def gpu():
    return GpuModel()


@pytest.fixture
def cfg():
    return ThermostatConfig(
        band_low_c=0.0, band_high_c=30.0, control_node="body",
        exec_preference_threshold_c=15.0,
    )


def exec_job(job_id="exec", priority=0, mode=DependencyMode.OUT_OF_ORDER):
    return fragment_job(job_id, *EXEC_COUNTS, 300.0, 60.0, mode, priority)


def mem_job(job_id="mem", priority=0, mode=DependencyMode.OUT_OF_ORDER):
    return fragment_job(job_id, *MEM_COUNTS, 300.0, 60.0, mode, priority)


def always_cooling(_cls):
    return -10.0


def always_warming(_cls):
    return +10.0


class TestThermostatZones:

    def test_cold_picks_execution_dominated(self, cfg, gpu):
        jobs = [exec_job(), mem_job()]
        d = thermostat_decide(cfg, Phase.ECLIPSE, -10.0, jobs, gpu)
        assert d.kind is DecisionKind.RUN_FRAGMENT
        assert d.job_id == "exec"
        assert d.reason == "heat-up"

    def test_sunlit_preempts_then_idles(self, cfg, gpu):
        jobs = [exec_job()]
        begin_fragment(jobs[0], 0)
        d = thermostat_decide(cfg, Phase.SUNLIT, 10.0, jobs, gpu)
        assert d.kind is DecisionKind.PREEMPT
        assert d.reason == "sunlit"
        # once nothing runs, sunlit idles
        d2 = thermostat_decide(cfg, Phase.SUNLIT, 10.0, [exec_job()], gpu)
        assert d2.kind is DecisionKind.IDLE
        assert d2.reason == "sunlit"

    def test_allow_sunlit_compute_disables_gate(self, cfg, gpu):
        jobs = [exec_job()]
        d = thermostat_decide(
            cfg, Phase.SUNLIT, -5.0, jobs, gpu, allow_sunlit_compute=True
        )
        assert d.kind is DecisionKind.RUN_FRAGMENT

    def test_hold_cool_prefers_memory(self, cfg, gpu):
        jobs = [exec_job(), mem_job()]
        d = thermostat_decide(cfg, Phase.ECLIPSE, 20.0, jobs, gpu)
        assert (d.job_id, d.reason) == ("mem", "hold")

    def test_hold_hot_prefers_execution(self, cfg, gpu):
        jobs = [exec_job(), mem_job()]
        d = thermostat_decide(cfg, Phase.ECLIPSE, 10.0, jobs, gpu)
        assert (d.job_id, d.reason) == ("exec", "hold")

    def test_hold_with_only_memory_runs_memory(self, cfg, gpu):
        d = thermostat_decide(cfg, Phase.ECLIPSE, 10.0, [mem_job()], gpu)
        assert (d.job_id, d.reason) == ("mem", "hold")

    def test_empty_queue_idles(self, cfg, gpu):
        d = thermostat_decide(cfg, Phase.ECLIPSE, 10.0, [], gpu)
        assert d.kind is DecisionKind.IDLE
        assert d.reason == "no-work"


class TestOverTemperature:

    def test_coast_on_memory_when_still_cooling(self, cfg, gpu):
        jobs = [exec_job(), mem_job()]
        d = thermostat_decide(
            cfg, Phase.ECLIPSE, 35.0, jobs, gpu, predicted_net_heat_w=always_cooling
        )
        assert d.kind is DecisionKind.RUN_FRAGMENT
        assert (d.job_id, d.reason) == ("mem", "coast")

    def test_idle_when_memory_would_warm(self, cfg, gpu):
        jobs = [exec_job(), mem_job()]
        d = thermostat_decide(
            cfg, Phase.ECLIPSE, 35.0, jobs, gpu, predicted_net_heat_w=always_warming
        )
        assert d.kind is DecisionKind.IDLE
        assert d.reason == "over-temp"

    def test_idle_without_predictor(self, cfg, gpu):
        d = thermostat_decide(cfg, Phase.ECLIPSE, 35.0, [mem_job()], gpu)
        assert d.kind is DecisionKind.IDLE

    def test_never_coasts_on_execution_work(self, cfg, gpu):
        d = thermostat_decide(
            cfg, Phase.ECLIPSE, 35.0, [exec_job()], gpu,
            predicted_net_heat_w=always_cooling,
        )
        assert d.kind is DecisionKind.IDLE

    def test_running_memory_fragment_coasts(self, cfg, gpu):
        jobs = [mem_job()]
        begin_fragment(jobs[0], 0)
        d = thermostat_decide(
            cfg, Phase.ECLIPSE, 35.0, jobs, gpu, predicted_net_heat_w=always_cooling
        )
        assert d.kind is DecisionKind.CONTINUE_RUNNING
        assert d.reason == "coast"

    def test_running_execution_fragment_preempted(self, cfg, gpu):
        jobs = [exec_job()]
        begin_fragment(jobs[0], 0)
        d = thermostat_decide(
            cfg, Phase.ECLIPSE, 35.0, jobs, gpu, predicted_net_heat_w=always_cooling
        )
        assert d.kind is DecisionKind.PREEMPT
        assert d.reason == "over-temp"


class TestPreemptionHysteresis:

    def test_hold_never_preempts_within_band(self, cfg, gpu):
        jobs = [mem_job(), exec_job()]
        begin_fragment(jobs[0], 0)
        for temp in (1.0, 10.0, 20.0, 29.0):
            d = thermostat_decide(cfg, Phase.ECLIPSE, temp, jobs, gpu)
            assert d.kind is DecisionKind.CONTINUE_RUNNING

    def test_heat_up_preempts_for_strictly_higher_class(self, cfg, gpu):
        jobs = [mem_job(), exec_job()]
        begin_fragment(jobs[0], 0)
        d = thermostat_decide(cfg, Phase.ECLIPSE, -5.0, jobs, gpu)
        assert d.kind is DecisionKind.PREEMPT
        assert (d.job_id, d.reason) == ("mem", "heat-up")

    def test_heat_up_keeps_running_best_class(self, cfg, gpu):
        jobs = [exec_job(), mem_job()]
        begin_fragment(jobs[0], 0)
        d = thermostat_decide(cfg, Phase.ECLIPSE, -5.0, jobs, gpu)
        assert d.kind is DecisionKind.CONTINUE_RUNNING

    def test_run_fragment_only_when_idle(self, cfg, gpu):
        rng = random.Random(123)
        jobs = [exec_job(), mem_job()]
        begin_fragment(jobs[1], 0)
        for _ in range(100):
            temp = rng.uniform(-30.0, 60.0)
            phase = rng.choice([Phase.ECLIPSE, Phase.SUNLIT])
            d = thermostat_decide(
                cfg, phase, temp, jobs, gpu, predicted_net_heat_w=always_cooling
            )
            assert d.kind is not DecisionKind.RUN_FRAGMENT


class TestTieBreaks:

    def test_priority_breaks_class_tie(self, cfg, gpu):
        jobs = [exec_job("b", priority=1), exec_job("a", priority=0)]
        d = thermostat_decide(cfg, Phase.ECLIPSE, -5.0, jobs, gpu)
        assert d.job_id == "a"

    def test_job_id_breaks_priority_tie(self, cfg, gpu):
        jobs = [exec_job("zeta"), exec_job("alpha")]
        d = thermostat_decide(cfg, Phase.ECLIPSE, -5.0, jobs, gpu)
        assert d.job_id == "alpha"

    def test_index_is_last_resort(self, cfg, gpu):
        job = exec_job("only")
        fragment = begin_fragment(job, 0)
        advance_fragment(fragment, fragment.nominal_duration_s, fragment.nominal_duration_s)
        complete_fragment(job, 0, CheckpointLedger(0.0))
        d = thermostat_decide(cfg, Phase.ECLIPSE, -5.0, [job], gpu)
        assert (d.kind, d.fragment_index) == (DecisionKind.RUN_FRAGMENT, 1)

    def test_deterministic_across_orderings(self, cfg, gpu):
        jobs1 = [exec_job("a"), exec_job("b"), mem_job("c")]
        jobs2 = [mem_job("c"), exec_job("b"), exec_job("a")]
        d1 = thermostat_decide(cfg, Phase.ECLIPSE, -5.0, jobs1, gpu)
        d2 = thermostat_decide(cfg, Phase.ECLIPSE, -5.0, jobs2, gpu)
        assert (d1.job_id, d1.fragment_index) == (d2.job_id, d2.fragment_index)


class TestBaselines:

    def test_always_run_picks_first_assignable(self, gpu):
        jobs = [mem_job("m", priority=0), exec_job("e", priority=1)]
        d = baseline_always_run(Phase.ECLIPSE, jobs)
        assert (d.kind, d.job_id) == (DecisionKind.RUN_FRAGMENT, "m")
        assert d.reason == "always-run"

    def test_always_run_idles_in_sunlit(self, gpu):
        d = baseline_always_run(Phase.SUNLIT, [exec_job()])
        assert (d.kind, d.reason) == (DecisionKind.IDLE, "sunlit")

    def test_always_run_preempts_at_sunlit_entry(self, gpu):
        jobs = [exec_job()]
        begin_fragment(jobs[0], 0)
        d = baseline_always_run(Phase.SUNLIT, jobs)
        assert d.kind is DecisionKind.PREEMPT

    def test_always_run_empty_queue_idles(self, gpu):
        d = baseline_always_run(Phase.ECLIPSE, [])
        assert (d.kind, d.reason) == (DecisionKind.IDLE, "no-work")

    def test_never_run_always_idles(self, gpu):
        jobs = [exec_job()]
        for phase in (Phase.ECLIPSE, Phase.SUNLIT):
            d = baseline_never_run(phase, jobs)
            assert (d.kind, d.reason) == (DecisionKind.IDLE, "never-run")


class TestConfigValidation:

    def test_band_must_be_ordered(self):
        with pytest.raises(ConfigurationError):
            ThermostatConfig(band_low_c=30.0, band_high_c=0.0)

    def test_threshold_must_be_inside_band(self):
        with pytest.raises(ConfigurationError):
            ThermostatConfig(band_low_c=0.0, band_high_c=30.0,
                             exec_preference_threshold_c=40.0)
