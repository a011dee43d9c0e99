"""Pluggable navigation systems.

A navigation system turns the sensed trajectory into the estimated
trajectory at the sensing rate. Implementations register under a name and
receive only sensor records and the fine alignment result; the ideal
reference is the single exception and declares it with ``requires_truth``.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Callable
from dataclasses import dataclass
import logging
import math

import numpy as np

from .atmosphere import pressure_altitude_from_pressure
from .const import NAVIGATION_DEAD_RECKONING, NAVIGATION_IDEAL
from .earth import (
    EarthModel,
    GeodeticPosition,
    earth_rate_ned,
    geodetic_rates,
    transport_rate_ned,
)
from .exceptions import NavigationError
from .flight import FlightObservables, TruthState
from .rotations import cross, quat_plus, quat_to_dcm, quat_to_euler
from .sensors import InitialEstimate, SensedRecord

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class EstimatedState:
    """Navigation output at one sensing epoch."""

    t: float
    position: GeodeticPosition
    velocity_ned: np.ndarray
    attitude: np.ndarray
    angular_rate: np.ndarray
    airspeed: float
    alpha: float
    beta: float
    pressure_altitude: float
    temperature: float

    @property
    def euler(self) -> tuple[float, float, float]:
        """Return (yaw, pitch, roll) in radians."""
        return quat_to_euler(self.attitude)

    @property
    def bearing(self) -> float:
        """Return the ground track bearing in radians."""
        return math.atan2(self.velocity_ned[1], self.velocity_ned[0])

    @property
    def ground_speed(self) -> float:
        """Return the horizontal ground speed."""
        return math.hypot(self.velocity_ned[0], self.velocity_ned[1])

    @property
    def path_angle(self) -> float:
        """Return the aerodynamic flight path angle in radians."""
        if self.airspeed <= 0.0:
            return 0.0
        air_velocity = self.airspeed * np.array(
            [
                math.cos(self.alpha) * math.cos(self.beta),
                math.sin(self.beta),
                math.sin(self.alpha) * math.cos(self.beta),
            ]
        )
        down = float(quat_to_dcm(self.attitude)[2] @ air_velocity)
        return math.asin(max(-1.0, min(1.0, -down / self.airspeed)))


@dataclass(frozen=True)
class TruthSample:
    """Truth state and its observables at one epoch."""

    t: float
    state: TruthState
    observables: FlightObservables


def estimate_from_truth(sample: TruthSample) -> EstimatedState:
    """Return the truth expressed as an estimate."""
    state = sample.state
    observables = sample.observables
    return EstimatedState(
        t=sample.t,
        position=state.position,
        velocity_ned=state.velocity_ned,
        attitude=np.array(state.attitude),
        angular_rate=observables.rate_relative_to_ned,
        airspeed=observables.wrench.airspeed,
        alpha=observables.wrench.alpha,
        beta=observables.wrench.beta,
        pressure_altitude=observables.atmosphere.pressure_altitude,
        temperature=observables.atmosphere.temperature,
    )


class NavigationSystem(ABC):
    """Base navigation system."""

    name: str
    requires_truth: bool = False

    def __init__(self, initial: InitialEstimate, earth: EarthModel) -> None:
        """Initialize from the fine alignment result and the onboard Earth model."""
        self.initial = initial
        self.earth = earth

    @abstractmethod
    def step(
        self, record: SensedRecord, truth: TruthSample | None = None
    ) -> EstimatedState:
        """Return the estimate at the epoch of a sensor record."""


NAVIGATION_SYSTEMS: dict[str, type[NavigationSystem]] = {}


def register_navigation[_N: type[NavigationSystem]](name: str) -> Callable[[_N], _N]:
    """Return decorator registering a navigation system under a name."""

    def _register(cls: _N) -> _N:
        if name in NAVIGATION_SYSTEMS:
            raise NavigationError(f"Navigation system {name} already registered")
        cls.name = name
        NAVIGATION_SYSTEMS[name] = cls
        return cls

    return _register


def create_navigation(
    name: str, initial: InitialEstimate, earth: EarthModel
) -> NavigationSystem:
    """Instantiate a registered navigation system."""
    try:
        cls = NAVIGATION_SYSTEMS[name]
    except KeyError as exception:
        raise NavigationError(
            f"Unknown navigation system {name}; known: {', '.join(sorted(NAVIGATION_SYSTEMS))}"
        ) from exception
    return cls(initial, earth)


@register_navigation(NAVIGATION_IDEAL)
class IdealNavigation(NavigationSystem):
    """Truth pass-through, for control-loop and flight technical error studies."""

    requires_truth = True

    def step(
        self, record: SensedRecord, truth: TruthSample | None = None
    ) -> EstimatedState:
        """Return the truth."""
        if truth is None:
            raise NavigationError("Ideal navigation needs the truth sample")
        return estimate_from_truth(truth)


@register_navigation(NAVIGATION_DEAD_RECKONING)
class StrapdownDeadReckoning(NavigationSystem):
    """Strapdown inertial dead reckoning in NED with GNSS resets while available.

    Attitude, velocity and position are integrated with the trapezoidal rule
    on bias-corrected IMU outputs. Air data and pressure altitude come
    straight from the air data system.
    """

    def __init__(self, initial: InitialEstimate, earth: EarthModel) -> None:
        """Initialize from the fine alignment result."""
        super().__init__(initial, earth)
        self._position = initial.position
        self._velocity = np.array(initial.velocity_ned, dtype=float)
        self._attitude = np.array(initial.attitude, dtype=float)
        self._time: float | None = None
        self._rate = np.zeros(3)
        self._acceleration = np.zeros(3)

    def _rates(
        self, gyroscope: np.ndarray, accelerometer: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Return the rate relative to NED and the NED acceleration."""
        position = self._position
        body_to_ned = quat_to_dcm(self._attitude)
        earth_rate = earth_rate_ned(position.latitude)
        transport = transport_rate_ned(position.latitude, position.altitude, self._velocity)
        rate = gyroscope - self.initial.gyroscope_bias - body_to_ned.T @ (earth_rate + transport)
        acceleration = (
            body_to_ned @ (accelerometer - self.initial.accelerometer_bias)
            + self.earth.gravity(position.latitude, position.altitude)
            - cross(2.0 * earth_rate + transport, self._velocity)
        )
        return rate, acceleration

    def _propagate(self, dt: float, gyroscope: np.ndarray, accelerometer: np.ndarray) -> None:
        rate, _ = self._rates(gyroscope, accelerometer)
        self._attitude = quat_plus(self._attitude, 0.5 * dt * (self._rate + rate))
        _, acceleration = self._rates(gyroscope, accelerometer)
        velocity = self._velocity + 0.5 * dt * (self._acceleration + acceleration)
        mean_velocity = 0.5 * (self._velocity + velocity)
        longitude_rate, latitude_rate, altitude_rate = geodetic_rates(
            self._position.latitude, self._position.altitude, mean_velocity
        )
        self._position = GeodeticPosition(
            self._position.longitude + dt * longitude_rate,
            self._position.latitude + dt * latitude_rate,
            self._position.altitude + dt * altitude_rate,
        )
        self._velocity = velocity

    def step(
        self, record: SensedRecord, truth: TruthSample | None = None
    ) -> EstimatedState:
        """Integrate up to the record time and return the estimate."""
        if self._time is not None:
            self._propagate(record.t - self._time, record.angular_rate, record.specific_force)
        rate, acceleration = self._rates(record.angular_rate, record.specific_force)
        if record.gnss is not None:
            self._position = record.gnss.position
            self._velocity = np.array(record.gnss.velocity_ned, dtype=float)
        self._time = record.t
        self._rate = rate
        self._acceleration = acceleration
        if not (np.all(np.isfinite(self._velocity)) and np.all(np.isfinite(self._attitude))):
            raise NavigationError(f"Dead reckoning diverged at t={record.t:.2f} s")
        return EstimatedState(
            t=record.t,
            position=self._position,
            velocity_ned=self._velocity.copy(),
            attitude=self._attitude.copy(),
            angular_rate=rate,
            airspeed=record.airspeed,
            alpha=record.alpha,
            beta=record.beta,
            pressure_altitude=pressure_altitude_from_pressure(record.pressure),
            temperature=record.temperature,
        )
