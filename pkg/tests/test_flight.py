"""Tests for the truth flight dynamics."""

import math

import numpy as np
import pytest

from swapsim.airframe import Airframe, ControlInputs
from swapsim.atmosphere import AtmosphericState
from swapsim.const import INTEGRATOR_R4NORM, INTEGRATOR_SO3, INTEGRATORS
from swapsim.earth import EarthModel, GeodeticPosition
from swapsim.exceptions import DivergenceError, SimulationError
from swapsim.flight import (
    FlightEnvironment,
    FlightKernel,
    TruthState,
    check_finite,
    level_state,
)
from swapsim.rotations import euler_to_quat, quat_minus, quat_to_dcm

ORIGIN = GeodeticPosition(math.radians(-117.0), math.radians(33.9), 1500.0)


class VacuumEnvironment:
    """Airless environment with constant gravity and no wind."""

    def __init__(self, gravity: float = 9.81) -> None:
        """Initialize with a gravity magnitude."""
        self._gravity = np.array([0.0, 0.0, gravity])

    def gravity(self, position):
        """Return constant gravity."""
        return self._gravity

    def atmosphere(self, t, position):
        """Return zero pressure, so no aerodynamic or propulsive force."""
        return AtmosphericState(288.15, 0.0, 0.0, 0.0)

    def wind_ned(self, t, position):
        """Return no wind."""
        return np.zeros(3)

    @property
    def turbulence_body(self):
        """Return no turbulence."""
        return np.zeros(3)


def _state(velocity, attitude, rate, mass):
    return TruthState(
        ORIGIN.longitude,
        ORIGIN.latitude,
        ORIGIN.altitude,
        np.asarray(velocity, dtype=float),
        attitude,
        np.asarray(rate, dtype=float),
        mass,
    )


def _propagate(kernel, state, duration, dt):
    for index in range(round(duration / dt)):
        state = kernel.step(state, index * dt, ControlInputs(), dt)
    return state


def test_unknown_integrator(airframe):
    """Test an unknown integrator name is rejected."""
    with pytest.raises(SimulationError):
        FlightKernel(Airframe(airframe), VacuumEnvironment(), "euler")


@pytest.mark.parametrize("integrator", INTEGRATORS)
def test_ballistic_energy(airframe, integrator):
    """Test mechanical energy is conserved without dynamic pressure."""
    model = Airframe(airframe)
    kernel = FlightKernel(model, VacuumEnvironment(), integrator, rotating_earth=False)
    attitude = euler_to_quat(0.3, 0.1, 0.0)
    initial = _state([25.0, 0.0, -3.0], attitude, np.zeros(3), model.full_mass)

    final = _propagate(kernel, initial, 2.0, 0.01)

    def energy(state):
        return 0.5 * float(state.velocity @ state.velocity) + 9.81 * state.altitude

    assert energy(final) == pytest.approx(energy(initial), abs=1e-8)
    assert final.mass == initial.mass
    np.testing.assert_allclose(
        final.velocity_ned, initial.velocity_ned + [0.0, 0.0, 9.81 * 2.0], atol=1e-9
    )


@pytest.mark.parametrize("integrator", INTEGRATORS)
def test_torque_free_spin(airframe, integrator):
    """Test rotational energy and inertial angular momentum are conserved."""
    model = Airframe(airframe)
    kernel = FlightKernel(model, VacuumEnvironment(0.0), integrator, rotating_earth=False)
    inertia = model.mass_properties(airframe.fuel_capacity).inertia
    attitude = euler_to_quat(0.0, 0.0, 0.0)
    initial = _state(np.zeros(3), attitude, [0.8, 1.2, 0.5], model.full_mass)

    final = _propagate(kernel, initial, 3.0, 0.005)

    def momentum(state):
        return quat_to_dcm(state.attitude) @ inertia @ state.angular_rate

    def rotational_energy(state):
        return 0.5 * float(state.angular_rate @ inertia @ state.angular_rate)

    np.testing.assert_allclose(momentum(final), momentum(initial), atol=1e-8)
    assert rotational_energy(final) == pytest.approx(rotational_energy(initial), rel=1e-9)
    assert np.linalg.norm(final.attitude) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("integrator", INTEGRATORS)
def test_fourth_order_attitude(airframe, integrator):
    """Test halving the step cuts the attitude error by about sixteen."""
    model = Airframe(airframe)
    kernel = FlightKernel(model, VacuumEnvironment(0.0), integrator, rotating_earth=False)
    attitude = euler_to_quat(0.2, 0.1, -0.1)
    initial = _state(np.zeros(3), attitude, [0.8, 1.2, 0.5], model.full_mass)

    reference = _propagate(kernel, initial, 2.0, 0.0025)
    coarse = _propagate(kernel, initial, 2.0, 0.04)
    fine = _propagate(kernel, initial, 2.0, 0.02)
    coarse_error = np.linalg.norm(quat_minus(coarse.attitude, reference.attitude))
    fine_error = np.linalg.norm(quat_minus(fine.attitude, reference.attitude))

    assert coarse_error / fine_error > 10.0


def test_trim_is_equilibrium(airframe):
    """Test a trimmed wings-level state has no acceleration over a flat Earth."""
    model = Airframe(airframe)
    earth = EarthModel()
    environment = FlightEnvironment(earth)
    kernel = FlightKernel(model, environment, INTEGRATOR_SO3, rotating_earth=False)
    atmosphere = environment.atmosphere(0.0, ORIGIN)
    gravity = float(np.linalg.norm(environment.gravity(ORIGIN)))
    trim = model.trim(28.0, atmosphere, airframe.fuel_capacity, gravity=gravity)
    state = level_state(
        ORIGIN,
        28.0,
        trim.alpha,
        trim.beta,
        math.radians(40.0),
        trim.pitch,
        model.full_mass,
        rotating_earth=False,
    )

    derivative = kernel.state_derivative(state, 0.0, trim.controls)

    np.testing.assert_allclose(derivative.velocity, np.zeros(3), atol=1e-6)
    np.testing.assert_allclose(derivative.angular_rate, np.zeros(3), atol=1e-6)
    assert derivative.mass < 0.0
    assert derivative.observables.wrench.airspeed == pytest.approx(28.0)


def test_level_state_with_wind():
    """Test the ground velocity is the air velocity plus the wind."""
    wind = np.array([3.0, -4.0, 0.0])
    state = level_state(ORIGIN, 30.0, 0.0, 0.0, 0.0, 0.0, 20.0, wind_ned=wind)

    np.testing.assert_allclose(state.velocity_ned, [33.0, -4.0, 0.0])
    assert np.linalg.norm(state.angular_rate) > 0.0


def test_propagate_truth_stride(airframe):
    """Test the recorded grid keeps t=0 and every stride-th step."""
    model = Airframe(airframe)
    kernel = FlightKernel(model, VacuumEnvironment(), INTEGRATOR_R4NORM, rotating_earth=False)
    initial = _state([20.0, 0.0, 0.0], euler_to_quat(0.0, 0.0, 0.0), np.zeros(3), 19.0)

    record = kernel.propagate_truth(initial, lambda t: ControlInputs(), 0.1, stride=5)

    assert len(record) == 11
    assert record.times[-1] == pytest.approx(0.1)
    np.testing.assert_array_equal(record.state(0).as_vector(), initial.as_vector())


def test_state_vector_packing():
    """Test packing then unpacking a state is lossless."""
    state = _state([1.0, 2.0, 3.0], euler_to_quat(0.1, 0.2, 0.3), [0.01, 0.02, 0.03], 18.0)

    unpacked = TruthState.from_vector(state.as_vector())

    np.testing.assert_array_equal(unpacked.as_vector(), state.as_vector())
    assert unpacked.position == state.position


def test_divergence_names_component():
    """Test a non-finite state reports the offending component."""
    state = _state([1.0, math.nan, 0.0], euler_to_quat(0.0, 0.0, 0.0), np.zeros(3), 18.0)

    with pytest.raises(DivergenceError) as error:
        check_finite(state, 12.5)
    assert error.value.component == "velocity_y"
    assert error.value.time == 12.5


class BrokenEnvironment(VacuumEnvironment):
    """Environment whose gravity model fails numerically."""

    def gravity(self, position):
        """Raise a numerical error."""
        raise ValueError("math domain error")


def test_numerical_failure_is_divergence(airframe):
    """Test a numerical failure inside a step surfaces as a divergence."""
    kernel = FlightKernel(Airframe(airframe), BrokenEnvironment(), INTEGRATOR_SO3)
    state = _state([20.0, 0.0, 0.0], euler_to_quat(0.0, 0.0, 0.0), np.zeros(3), 18.0)

    with pytest.raises(DivergenceError, match="step"):
        kernel.step(state, 0.0, ControlInputs())


def test_observe_failure_is_divergence(airframe):
    """Test a numerical failure while observing surfaces as a divergence."""
    kernel = FlightKernel(Airframe(airframe), BrokenEnvironment(), INTEGRATOR_SO3)
    state = _state([20.0, 0.0, 0.0], euler_to_quat(0.0, 0.0, 0.0), np.zeros(3), 18.0)

    with pytest.raises(DivergenceError, match="observe"):
        kernel.observe(state, 0.0, ControlInputs())


def test_integrators_agree_in_trimmed_flight(airframe):
    """Test both integrators fly the same trimmed path over a rotating Earth."""
    model = Airframe(airframe)
    environment = FlightEnvironment(EarthModel())
    atmosphere = environment.atmosphere(0.0, ORIGIN)
    gravity = float(np.linalg.norm(environment.gravity(ORIGIN)))
    trim = model.trim(28.0, atmosphere, airframe.fuel_capacity, gravity=gravity)
    initial = level_state(
        ORIGIN, 28.0, trim.alpha, trim.beta, math.radians(40.0), trim.pitch, model.full_mass
    )
    kernels = {
        integrator: FlightKernel(model, environment, integrator) for integrator in INTEGRATORS
    }
    states = dict.fromkeys(INTEGRATORS, initial)

    dt = 0.002
    for index in range(1000):
        for integrator, kernel in kernels.items():
            states[integrator] = kernel.step(states[integrator], index * dt, trim.controls, dt)
        assert np.linalg.norm(states[INTEGRATOR_SO3].attitude) == pytest.approx(1.0, abs=1e-12)

    difference = quat_minus(states[INTEGRATOR_SO3].attitude, states[INTEGRATOR_R4NORM].attitude)
    assert np.linalg.norm(difference) < 1e-8
    np.testing.assert_allclose(
        states[INTEGRATOR_SO3].velocity, states[INTEGRATOR_R4NORM].velocity, atol=1e-8
    )
