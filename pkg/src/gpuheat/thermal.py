"""Lumped-capacitance thermal network with orbital phase-dependent solar input.

Each body is a single node with one temperature and one heat capacity.
Nodes exchange heat through conductive links, radiate to a cold sink,
and (on sun-exposed nodes) absorb solar flux during the sunlit phase.
The network is advanced by a fixed-step explicit Euler integrator so
that per-step energy bookkeeping is exact by construction.

Temperatures are kelvin throughout this module; Celsius appears only at
the I/O boundary (traces, configs, CLI).
"""

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

from .errors import ConfigurationError, ModelError, NumericalError, StabilityWarning

STEFAN_BOLTZMANN = 5.670374419e-8  # W/(m²·K⁴)
SOLAR_FLUX_1AU = 1361.0            # W/m² — solar constant at 1 AU
DEEP_SPACE_K = 2.7                 # K — cosmic background sink

KELVIN_OFFSET = 273.15


def celsius_to_kelvin(temp_c: float) -> float:
    return temp_c + KELVIN_OFFSET


def kelvin_to_celsius(temp_k: float) -> float:
    return temp_k - KELVIN_OFFSET


class Phase(Enum):
    """Orbital phase relative to Earth's shadow."""

    SUNLIT = "sunlit"
    ECLIPSE = "eclipse"


@dataclass(frozen=True)
class OrbitProfile:
    """Periodic sunlit/eclipse cycle of a circular LEO orbit.

    The eclipse window is half-open: [0, eclipse_fraction * period_s)
    of each period is Eclipse and the boundary instant belongs to
    Sunlit, so the phase at any instant is unambiguous.
    """

    period_s: float                # seconds per orbit
    eclipse_fraction: float        # fraction of the period in shadow, (0, 1)
    phase_offset_s: float = 0.0    # shifts t = 0 within the cycle

    def __post_init__(self):
        problems = []
        if not self.period_s > 0:
            problems.append(f"orbit.period_s: must be > 0, got {self.period_s}")
        if not 0.0 < self.eclipse_fraction < 1.0:
            problems.append(
                f"orbit.eclipse_fraction: must be in (0, 1), got {self.eclipse_fraction}"
            )
        if problems:
            raise ConfigurationError(problems)


@dataclass(frozen=True)
class ThermalNode:
    """One lump of the thermal network.

    emissive_area_m2/emissivity set radiative coupling to the sink;
    absorptive_area_m2/absorptivity set solar pickup (zero product means
    the node never sees the sun). internal_load_w is always-on
    dissipation such as avionics.
    """

    id: str
    heat_capacity_j_per_k: float
    temperature_k: float           # initial temperature
    emissive_area_m2: float = 0.0
    emissivity: float = 0.0
    absorptive_area_m2: float = 0.0
    absorptivity: float = 0.0
    internal_load_w: float = 0.0

    def __post_init__(self):
        problems = []
        if not self.heat_capacity_j_per_k > 0:
            problems.append(
                f"node {self.id}: heat_capacity_j_per_k must be > 0, "
                f"got {self.heat_capacity_j_per_k}"
            )
        if not self.temperature_k > 0:
            problems.append(
                f"node {self.id}: temperature_k must be > 0, got {self.temperature_k}"
            )
        for name, value, low, high in (
            ("emissivity", self.emissivity, 0.0, 1.0),
            ("absorptivity", self.absorptivity, 0.0, 1.0),
        ):
            if not low <= value <= high:
                problems.append(f"node {self.id}: {name} must be in [0, 1], got {value}")
        for name, value in (
            ("emissive_area_m2", self.emissive_area_m2),
            ("absorptive_area_m2", self.absorptive_area_m2),
            ("internal_load_w", self.internal_load_w),
        ):
            if value < 0:
                problems.append(f"node {self.id}: {name} must be >= 0, got {value}")
        if problems:
            raise ConfigurationError(problems)


@dataclass(frozen=True)
class ThermalLink:
    """Conductive coupling between two nodes, in W/K."""

    node_a: str
    node_b: str
    conductance_w_per_k: float

    def __post_init__(self):
        problems = []
        if self.conductance_w_per_k < 0:
            problems.append(
                f"link {self.node_a}-{self.node_b}: conductance_w_per_k must be >= 0, "
                f"got {self.conductance_w_per_k}"
            )
        if self.node_a == self.node_b:
            problems.append(f"link {self.node_a}-{self.node_b}: endpoints must differ")
        if problems:
            raise ConfigurationError(problems)


@dataclass(frozen=True)
class ThermalEnvironment:
    """Radiative environment: solar flux and the deep-space sink."""

    solar_flux_w_per_m2: float = SOLAR_FLUX_1AU
    sink_temperature_k: float = DEEP_SPACE_K

    def __post_init__(self):
        problems = []
        if self.solar_flux_w_per_m2 < 0:
            problems.append(
                "environment.solar_flux_w_per_m2: must be >= 0, "
                f"got {self.solar_flux_w_per_m2}"
            )
        if self.sink_temperature_k < 0:
            problems.append(
                "environment.sink_temperature_k: must be >= 0, "
                f"got {self.sink_temperature_k}"
            )
        if problems:
            raise ConfigurationError(problems)


@dataclass(frozen=True)
class ThermalState:
    """Snapshot of the network: simulation time plus per-node temperatures."""

    time_s: float
    node_temperatures: dict = field(default_factory=dict)  # node id -> kelvin

    def temperature(self, node_id: str) -> float:
        try:
            return self.node_temperatures[node_id]
        except KeyError:
            raise ModelError(f"unknown node id {node_id!r} in thermal state") from None


def initial_state(nodes) -> ThermalState:
    """State at t = 0 built from each node's configured temperature."""
    return ThermalState(0.0, {n.id: n.temperature_k for n in nodes})


def orbital_phase(orbit: OrbitProfile, t: float) -> Phase:
    """Phase at time t >= 0. Periodic with the orbit period (exactly)."""
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    cycle = ((t + orbit.phase_offset_s) % orbit.period_s) / orbit.period_s
    return Phase.ECLIPSE if cycle < orbit.eclipse_fraction else Phase.SUNLIT


def net_heat_flow(
    node: ThermalNode,
    state: ThermalState,
    env: ThermalEnvironment,
    links,
    phase: Phase,
    applied_power_w: float = 0.0,
) -> float:
    """Net heat flow into `node` in watts at the given state.

    Q = applied + internal + solar (sunlit, sun-exposed nodes only)
        + sum over links of G * (T_other - T_node)
        - emissivity * sigma * A * (T_node^4 - T_sink^4)
    """
    t_node = state.temperature(node.id)

    q = applied_power_w + node.internal_load_w

    if phase is Phase.SUNLIT:
        q += node.absorptivity * node.absorptive_area_m2 * env.solar_flux_w_per_m2

    for link in links:
        if link.node_a == node.id:
            other = link.node_b
        elif link.node_b == node.id:
            other = link.node_a
        else:
            continue
        q += link.conductance_w_per_k * (state.temperature(other) - t_node)

    q -= (
        node.emissivity
        * STEFAN_BOLTZMANN
        * node.emissive_area_m2
        * (t_node**4 - env.sink_temperature_k**4)
    )
    return q


def stability_limit(nodes, links, state: ThermalState) -> float:
    """Largest dt for which explicit Euler cannot overshoot equilibrium.

    Per node: heat_capacity / (sum of incident conductances + linearized
    radiative conductance 4*eps*sigma*A*T^3). Returns +inf for a fully
    decoupled network.
    """
    limit = math.inf
    for node in nodes:
        g = 0.0
        for link in links:
            if node.id in (link.node_a, link.node_b):
                g += link.conductance_w_per_k
        t = state.temperature(node.id)
        g += 4.0 * node.emissivity * STEFAN_BOLTZMANN * node.emissive_area_m2 * t**3
        if g > 0:
            limit = min(limit, node.heat_capacity_j_per_k / g)
    return limit


def step_thermal(
    state: ThermalState,
    nodes,
    links,
    env: ThermalEnvironment,
    phase: Phase,
    applied_power,
    dt: float,
) -> ThermalState:
    """Advance every node by one explicit-Euler step: T' = T + (Q/C) dt.

    Pure: the input state is never modified and equal inputs yield
    bitwise-equal outputs. `applied_power` maps node id to extra watts
    (missing nodes get zero). dt above the stability bound raises a
    StabilityWarning but the step still runs; a non-positive resulting
    temperature aborts with NumericalError.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")

    limit = stability_limit(nodes, links, state)
    if dt >= limit:
        warnings.warn(
            f"dt={dt} s exceeds the stability bound {limit:.3f} s at t={state.time_s} s",
            StabilityWarning,
            stacklevel=2,
        )

    new_temps = {}
    for node in nodes:
        q = net_heat_flow(node, state, env, links, phase, applied_power.get(node.id, 0.0))
        t_new = state.temperature(node.id) + (q / node.heat_capacity_j_per_k) * dt
        if not t_new > 0:
            raise NumericalError(
                f"node {node.id!r} reached non-positive temperature {t_new:.3f} K "
                f"at t={state.time_s} s (dt={dt} s); reduce dt or fix the scenario",
                time_s=state.time_s,
                node_id=node.id,
            )
        new_temps[node.id] = t_new
    return ThermalState(state.time_s + dt, new_temps)


def equilibrium_temperature(p_in: float, node: ThermalNode, env: ThermalEnvironment) -> float:
    """Steady-state temperature of a radiating node under constant input.

    Analytic inverse of the Stefan-Boltzmann term, used as the test
    oracle for the integrator: T = (P / (eps sigma A) + T_sink^4)^(1/4).
    """
    denom = node.emissivity * STEFAN_BOLTZMANN * node.emissive_area_m2
    if denom <= 0:
        raise ValueError(
            f"node {node.id!r} has no radiating surface (emissivity*area == 0)"
        )
    radicand = p_in / denom + env.sink_temperature_k**4
    if radicand < 0:
        raise ValueError(f"no physical equilibrium for p_in={p_in} W")
    return radicand**0.25
