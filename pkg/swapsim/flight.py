"""Truth flight dynamics over the rotating ellipsoidal Earth.

The truth state holds the geodetic position, the Earth-relative velocity in
body axes, the NED-to-body attitude quaternion, the inertial angular rate in
body axes and the total mass. Two fixed-step fourth order integrators are
provided: a classical one that treats the quaternion as a 4-vector and
renormalizes, and one that composes attitude increments on SO(3).
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
import logging
import math
from typing import Protocol

import numpy as np

from .airframe import Airframe, ControlInputs, Wrench
from .atmosphere import AtmosphericState, insa_state_at_geopotential
from .const import INTEGRATOR_R4NORM, INTEGRATOR_SO3, TRUTH_STEP
from .earth import (
    EarthModel,
    GeodeticPosition,
    earth_rate_ned,
    geodetic_rates,
    geopotential_from_geodetic,
    transport_rate_ned,
)
from .exceptions import DivergenceError, SimulationError, convert_exception
from .rotations import (
    cross,
    euler_to_quat,
    quat_derivative,
    quat_normalize,
    quat_plus,
    quat_to_dcm,
    quat_to_euler,
    right_jacobian_inverse_times,
)
from .wind import DrydenTurbulence, WeatherProfile, WindProfile

_LOGGER = logging.getLogger(__name__)

# Layout of the packed state vector.
_POSITION = slice(0, 3)
_VELOCITY = slice(3, 6)
_ATTITUDE = slice(6, 10)
_RATE = slice(10, 13)
_MASS = 13
STATE_SIZE = 14

STATE_COMPONENTS = (
    "longitude",
    "latitude",
    "altitude",
    "velocity_x",
    "velocity_y",
    "velocity_z",
    "attitude_w",
    "attitude_x",
    "attitude_y",
    "attitude_z",
    "rate_x",
    "rate_y",
    "rate_z",
    "mass",
)


@dataclass(frozen=True)
class TruthState:
    """Aircraft state: geodetic position, body velocity, attitude, inertial rate, mass."""

    longitude: float
    latitude: float
    altitude: float
    velocity: np.ndarray
    attitude: np.ndarray
    angular_rate: np.ndarray
    mass: float

    @property
    def position(self) -> GeodeticPosition:
        """Return the geodetic position."""
        return GeodeticPosition(self.longitude, self.latitude, self.altitude)

    @property
    def body_to_ned(self) -> np.ndarray:
        """Return the rotation matrix from body to NED."""
        return quat_to_dcm(self.attitude)

    @property
    def velocity_ned(self) -> np.ndarray:
        """Return the Earth-relative velocity in NED."""
        return self.body_to_ned @ self.velocity

    @property
    def euler(self) -> tuple[float, float, float]:
        """Return (yaw, pitch, roll) in radians."""
        return quat_to_euler(self.attitude)

    def as_vector(self) -> np.ndarray:
        """Pack the state into a flat array."""
        vector = np.empty(STATE_SIZE)
        vector[_POSITION] = (self.longitude, self.latitude, self.altitude)
        vector[_VELOCITY] = self.velocity
        vector[_ATTITUDE] = self.attitude
        vector[_RATE] = self.angular_rate
        vector[_MASS] = self.mass
        return vector

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> TruthState:
        """Unpack a flat array."""
        return cls(
            longitude=float(vector[0]),
            latitude=float(vector[1]),
            altitude=float(vector[2]),
            velocity=np.array(vector[_VELOCITY]),
            attitude=np.array(vector[_ATTITUDE]),
            angular_rate=np.array(vector[_RATE]),
            mass=float(vector[_MASS]),
        )


@dataclass(frozen=True)
class FlightObservables:
    """Quantities derived alongside the state derivative."""

    specific_force: np.ndarray
    angular_acceleration: np.ndarray
    rate_relative_to_ned: np.ndarray
    atmosphere: AtmosphericState
    wind_ned: np.ndarray
    wrench: Wrench
    gravity_ned: np.ndarray


@dataclass(frozen=True)
class StateDerivative:
    """Time derivative of a truth state plus the observables of the evaluation."""

    vector: np.ndarray
    observables: FlightObservables

    @property
    def velocity(self) -> np.ndarray:
        """Return the body velocity derivative."""
        return self.vector[_VELOCITY]

    @property
    def attitude(self) -> np.ndarray:
        """Return the quaternion derivative."""
        return self.vector[_ATTITUDE]

    @property
    def angular_rate(self) -> np.ndarray:
        """Return the angular acceleration."""
        return self.vector[_RATE]

    @property
    def mass(self) -> float:
        """Return the mass rate."""
        return float(self.vector[_MASS])


class Environment(Protocol):
    """Gravity, atmosphere and wind seen by the truth dynamics."""

    def gravity(self, position: GeodeticPosition) -> np.ndarray:
        """Return the gravity vector in NED."""

    def atmosphere(self, t: float, position: GeodeticPosition) -> AtmosphericState:
        """Return the atmospheric state."""

    def wind_ned(self, t: float, position: GeodeticPosition) -> np.ndarray:
        """Return the low-frequency wind in NED."""

    @property
    def turbulence_body(self) -> np.ndarray:
        """Return the turbulence velocity in body axes, held over a truth step."""


class FlightEnvironment:
    """Truth-side environment: perturbed Earth model, weather ramps, wind and turbulence."""

    def __init__(
        self,
        earth: EarthModel,
        wind: WindProfile | None = None,
        weather: WeatherProfile | None = None,
        turbulence: DrydenTurbulence | None = None,
        ground_altitude: float = 0.0,
    ) -> None:
        """Initialize the environment."""
        self.earth = earth
        self.wind = wind or WindProfile.calm()
        self.weather = weather or WeatherProfile.standard()
        self.turbulence = turbulence
        self.ground_altitude = ground_altitude

    def gravity(self, position: GeodeticPosition) -> np.ndarray:
        """Return the gravity vector in NED."""
        return self.earth.gravity(position.latitude, position.altitude)

    def atmosphere(self, t: float, position: GeodeticPosition) -> AtmosphericState:
        """Return the atmospheric state at the geodetic altitude."""
        temperature_offset, pressure_offset = self.weather.offsets(t)
        return insa_state_at_geopotential(
            geopotential_from_geodetic(position.altitude),
            temperature_offset,
            pressure_offset,
        )

    def wind_ned(self, t: float, position: GeodeticPosition) -> np.ndarray:
        """Return the low-frequency wind in NED."""
        return self.wind.velocity_ned(t)

    @property
    def turbulence_body(self) -> np.ndarray:
        """Return the current turbulence velocity in body axes."""
        if self.turbulence is None:
            return np.zeros(3)
        return self.turbulence.velocity

    def advance_turbulence(self, dt: float, airspeed: float, altitude: float) -> None:
        """Advance the turbulence filters by one truth step."""
        if self.turbulence is not None:
            self.turbulence.step(dt, airspeed, altitude - self.ground_altitude)


type ControlSchedule = Callable[[float], ControlInputs]


class FlightKernel:
    """Rigid-body equations of motion and their fixed-step integrators."""

    def __init__(
        self,
        airframe: Airframe,
        environment: Environment,
        integrator: str = INTEGRATOR_SO3,
        rotating_earth: bool = True,
    ) -> None:
        """Initialize the kernel.

        With ``rotating_earth`` off, the Earth rate and transport rate terms are
        dropped and NED behaves as an inertial frame.
        """
        if integrator not in (INTEGRATOR_SO3, INTEGRATOR_R4NORM):
            raise SimulationError(f"Unknown integrator: {integrator}")
        self.airframe = airframe
        self.environment = environment
        self.integrator = integrator
        self.rotating_earth = rotating_earth
        self._shaft_speed: float | None = None

    def _derivative(
        self, vector: np.ndarray, t: float, controls: ControlInputs
    ) -> tuple[np.ndarray, FlightObservables]:
        longitude, latitude, altitude = vector[_POSITION]
        velocity = vector[_VELOCITY]
        attitude = vector[_ATTITUDE]
        rate = vector[_RATE]
        mass_total = vector[_MASS]
        position = GeodeticPosition(longitude, latitude, altitude)
        environment = self.environment

        body_to_ned = quat_to_dcm(attitude)
        ned_to_body = body_to_ned.T
        velocity_ned = body_to_ned @ velocity
        if self.rotating_earth:
            earth_rate = earth_rate_ned(latitude)
            transport_rate = transport_rate_ned(latitude, altitude, velocity_ned)
        else:
            earth_rate = np.zeros(3)
            transport_rate = np.zeros(3)
        rate_nb = rate - ned_to_body @ (earth_rate + transport_rate)

        wind_ned = environment.wind_ned(t, position)
        air_velocity = velocity - ned_to_body @ wind_ned - environment.turbulence_body
        atmosphere = environment.atmosphere(t, position)
        fuel = mass_total - self.airframe.dry_mass
        mass = self.airframe.mass_properties(fuel)
        wrench = self.airframe.wrench(
            air_velocity, rate_nb, controls, atmosphere, fuel, mass, self._shaft_speed
        )
        self._shaft_speed = wrench.shaft_speed or None

        gravity_ned = environment.gravity(position)
        specific_force = wrench.force / mass_total
        velocity_dot = (
            specific_force
            + ned_to_body @ (gravity_ned - cross(2.0 * earth_rate + transport_rate, velocity_ned))
            - cross(rate_nb, velocity)
        )
        angular_acceleration = mass.inertia_inverse @ (
            wrench.moment - cross(rate, mass.inertia @ rate)
        )

        derivative = np.empty(STATE_SIZE)
        derivative[_POSITION] = geodetic_rates(latitude, altitude, velocity_ned)
        derivative[_VELOCITY] = velocity_dot
        derivative[_ATTITUDE] = quat_derivative(attitude, rate_nb)
        derivative[_RATE] = angular_acceleration
        derivative[_MASS] = -wrench.fuel_flow
        observables = FlightObservables(
            specific_force=specific_force,
            angular_acceleration=angular_acceleration,
            rate_relative_to_ned=rate_nb,
            atmosphere=atmosphere,
            wind_ned=wind_ned,
            wrench=wrench,
            gravity_ned=gravity_ned,
        )
        return derivative, observables

    def state_derivative(
        self, state: TruthState, t: float, controls: ControlInputs
    ) -> StateDerivative:
        """Return the full nonlinear derivative of a truth state."""
        derivative, observables = self._derivative(state.as_vector(), t, controls)
        return StateDerivative(derivative, observables)

    @convert_exception
    def observe(
        self, state: TruthState, t: float, controls: ControlInputs
    ) -> FlightObservables:
        """Return the observables at a state without advancing it."""
        return self._derivative(state.as_vector(), t, controls)[1]

    def rk4_step_r4norm(
        self, state: TruthState, t: float, controls: ControlInputs, dt: float
    ) -> TruthState:
        """Advance with classical RK4 on the packed state, then renormalize the quaternion."""
        x = state.as_vector()
        k1, _ = self._derivative(x, t, controls)
        k2, _ = self._derivative(x + 0.5 * dt * k1, t + 0.5 * dt, controls)
        k3, _ = self._derivative(x + 0.5 * dt * k2, t + 0.5 * dt, controls)
        k4, _ = self._derivative(x + dt * k3, t + dt, controls)
        x_next = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        x_next[_ATTITUDE] = quat_normalize(x_next[_ATTITUDE])
        return TruthState.from_vector(x_next)

    def _so3_stage(
        self,
        x: np.ndarray,
        increment: np.ndarray,
        tangent: np.ndarray,
        t: float,
        controls: ControlInputs,
        dt: float,
    ) -> tuple[np.ndarray, np.ndarray]:
        stage = x + increment
        stage[_ATTITUDE] = quat_plus(x[_ATTITUDE], tangent)
        derivative, observables = self._derivative(stage, t, controls)
        rotation = dt * right_jacobian_inverse_times(tangent, observables.rate_relative_to_ned)
        return derivative, rotation

    def rk4_step_so3(
        self, state: TruthState, t: float, controls: ControlInputs, dt: float
    ) -> TruthState:
        """Advance with RK4 composing attitude increments through the exponential map."""
        x = state.as_vector()
        zero = np.zeros(3)
        k1, r1 = self._so3_stage(x, np.zeros(STATE_SIZE), zero, t, controls, dt)
        k2, r2 = self._so3_stage(x, 0.5 * dt * k1, 0.5 * r1, t + 0.5 * dt, controls, dt)
        k3, r3 = self._so3_stage(x, 0.5 * dt * k2, 0.5 * r2, t + 0.5 * dt, controls, dt)
        k4, r4 = self._so3_stage(x, dt * k3, r3, t + dt, controls, dt)
        x_next = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        x_next[_ATTITUDE] = quat_plus(x[_ATTITUDE], (r1 + 2.0 * r2 + 2.0 * r3 + r4) / 6.0)
        return TruthState.from_vector(x_next)

    @convert_exception
    def step(
        self, state: TruthState, t: float, controls: ControlInputs, dt: float = TRUTH_STEP
    ) -> TruthState:
        """Advance one step with the configured integrator and check the result."""
        if self.integrator == INTEGRATOR_SO3:
            next_state = self.rk4_step_so3(state, t, controls, dt)
        else:
            next_state = self.rk4_step_r4norm(state, t, controls, dt)
        check_finite(next_state, t + dt)
        return next_state

    def propagate_truth(
        self,
        initial: TruthState,
        controls: ControlSchedule,
        t_end: float,
        dt: float = TRUTH_STEP,
        stride: int = 1,
    ) -> TruthRecord:
        """Integrate from t=0 to t_end on the fixed grid, keeping every stride-th epoch."""
        steps = round(t_end / dt)
        times = [0.0]
        states = [initial.as_vector()]
        state = initial
        for index in range(steps):
            t = index * dt
            state = self.step(state, t, controls(t), dt)
            if (index + 1) % stride == 0:
                times.append((index + 1) * dt)
                states.append(state.as_vector())
        _LOGGER.debug("Propagated %d truth steps to t=%.3f", steps, steps * dt)
        return TruthRecord(np.array(times), np.array(states))


@dataclass(frozen=True)
class TruthRecord:
    """Time-indexed truth states as a packed array, one row per epoch."""

    times: np.ndarray
    states: np.ndarray

    def __len__(self) -> int:
        """Return the number of epochs."""
        return len(self.times)

    def state(self, index: int) -> TruthState:
        """Return the state at an epoch index."""
        return TruthState.from_vector(self.states[index])


def check_finite(state: TruthState, t: float) -> None:
    """Raise a divergence error naming the first non-finite component."""
    vector = state.as_vector()
    if np.all(np.isfinite(vector)):
        return
    component = STATE_COMPONENTS[int(np.flatnonzero(~np.isfinite(vector))[0])]
    raise DivergenceError(f"Non-finite {component} at t={t:.3f} s", t, component)


def level_state(
    position: GeodeticPosition,
    airspeed: float,
    alpha: float,
    beta: float,
    yaw: float,
    pitch: float,
    mass: float,
    wind_ned: np.ndarray | None = None,
    rotating_earth: bool = True,
) -> TruthState:
    """Return a wings-level state with the given air-relative velocity and attitude.

    The inertial rate is set so that the attitude is steady relative to NED.
    """
    attitude = euler_to_quat(yaw, pitch, 0.0)
    air_velocity = airspeed * np.array(
        [math.cos(alpha) * math.cos(beta), math.sin(beta), math.sin(alpha) * math.cos(beta)]
    )
    velocity = air_velocity
    if wind_ned is not None:
        velocity = air_velocity + quat_to_dcm(attitude).T @ wind_ned
    angular_rate = np.zeros(3)
    if rotating_earth:
        velocity_ned = quat_to_dcm(attitude) @ velocity
        angular_rate = quat_to_dcm(attitude).T @ (
            earth_rate_ned(position.latitude)
            + transport_rate_ned(position.latitude, position.altitude, velocity_ned)
        )
    return TruthState(
        longitude=position.longitude,
        latitude=position.latitude,
        altitude=position.altitude,
        velocity=velocity,
        attitude=attitude,
        angular_rate=angular_rate,
        mass=mass,
    )
