"""Shared fixtures: trimmed variants of the default scenario."""

from dataclasses import replace

import pytest

from gpuheat.scenario import default_scenario


@pytest.fixture(scope="session")
def default_sc():
    return default_scenario()


@pytest.fixture()
def two_orbit_sc(default_sc):
    """Default scenario cut to two orbits for fast simulator tests."""
    return replace(default_sc, duration_s=2 * default_sc.orbit.period_s)


@pytest.fixture()
def one_orbit_sc(default_sc):
    return replace(default_sc, duration_s=default_sc.orbit.period_s)
