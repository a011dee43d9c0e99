"""Low-frequency wind, weather offset ramps and Dryden turbulence."""

from __future__ import annotations

from dataclasses import dataclass, field
import functools
import math

import numpy as np
from scipy.linalg import expm

from .const import FT_TO_M
from .seedtree import StochasticSampler

# Severity -> (wind speed at 20 ft in m/s, medium/high altitude intensity in m/s).
SEVERITY_LEVELS: dict[str, tuple[float, float]] = {
    "none": (0.0, 0.0),
    "light": (7.72, 1.0),
    "moderate": (15.43, 2.0),
    "severe": (23.15, 3.5),
}

_LOW_ALTITUDE_FT = 1000.0
_HIGH_ALTITUDE_FT = 2000.0
_HIGH_SCALE_LENGTH_FT = 1750.0
_MIN_ALTITUDE_FT = 10.0
_MIN_AIRSPEED = 1.0
_TIME_CONSTANT_BIN = 1e-3
_SQRT3 = math.sqrt(3.0)
_NOISE_PER_STEP = 5


@dataclass(frozen=True)
class LinearRamp:
    """Value held at ``start`` before ``t_start``, at ``end`` after ``t_end``."""

    t_start: float
    t_end: float
    start: float
    end: float

    def value(self, t: float) -> float:
        """Return the ramp value at time t."""
        if t <= self.t_start:
            return self.start
        if t >= self.t_end:
            return self.end
        fraction = (t - self.t_start) / (self.t_end - self.t_start)
        return self.start + fraction * (self.end - self.start)

    @classmethod
    def constant(cls, value: float) -> LinearRamp:
        """Return a ramp that never changes."""
        return cls(0.0, 0.0, value, value)


@dataclass(frozen=True)
class WindProfile:
    """Piecewise-linear low-frequency wind; speed in m/s, bearing in degrees.

    The bearing is the direction the air mass moves toward. A negative speed
    reverses it.
    """

    speed: LinearRamp
    bearing: LinearRamp

    def velocity_ned(self, t: float) -> np.ndarray:
        """Return the wind velocity in NED at time t."""
        speed = self.speed.value(t)
        bearing = math.radians(self.bearing.value(t))
        return np.array([speed * math.cos(bearing), speed * math.sin(bearing), 0.0])

    @classmethod
    def calm(cls) -> WindProfile:
        """Return a profile with no wind."""
        return cls(LinearRamp.constant(0.0), LinearRamp.constant(0.0))


def wind_lowfreq(t: float, profile: WindProfile) -> np.ndarray:
    """Return the low-frequency wind velocity in NED."""
    return profile.velocity_ned(t)


@dataclass(frozen=True)
class WeatherProfile:
    """Temperature (K) and pressure (Pa) offset ramps."""

    temperature_offset: LinearRamp
    pressure_offset: LinearRamp

    def offsets(self, t: float) -> tuple[float, float]:
        """Return (ΔT, Δp) at time t."""
        return self.temperature_offset.value(t), self.pressure_offset.value(t)

    @classmethod
    def standard(cls) -> WeatherProfile:
        """Return zero offsets."""
        return cls(LinearRamp.constant(0.0), LinearRamp.constant(0.0))


@dataclass(frozen=True)
class DrydenParameters:
    """Turbulence intensities (m/s) and scale lengths (m) per body axis."""

    sigma: tuple[float, float, float]
    scale_length: tuple[float, float, float]


def _low_altitude_parameters(
    altitude_ft: float, wind_20ft: float
) -> tuple[np.ndarray, np.ndarray]:
    denominator = 0.177 + 0.000823 * altitude_ft
    sigma_w = 0.1 * wind_20ft
    sigma_uv = sigma_w / denominator**0.4
    length_uv = altitude_ft / denominator**1.2
    return (
        np.array([sigma_uv, sigma_uv, sigma_w]),
        np.array([length_uv, length_uv, altitude_ft]) * FT_TO_M,
    )


def dryden_parameters(altitude_agl: float, severity: str) -> DrydenParameters:
    """Return the military-specification Dryden parameters at an altitude.

    The low-altitude form applies below 1000 ft above ground, the
    medium/high-altitude form above 2000 ft, linearly blended in between.
    """
    wind_20ft, sigma_high = SEVERITY_LEVELS[severity]
    altitude_ft = max(altitude_agl / FT_TO_M, _MIN_ALTITUDE_FT)
    high_sigma = np.full(3, sigma_high)
    high_length = np.full(3, _HIGH_SCALE_LENGTH_FT * FT_TO_M)
    if altitude_ft >= _HIGH_ALTITUDE_FT:
        sigma, length = high_sigma, high_length
    elif altitude_ft <= _LOW_ALTITUDE_FT:
        sigma, length = _low_altitude_parameters(altitude_ft, wind_20ft)
    else:
        low_sigma, low_length = _low_altitude_parameters(_LOW_ALTITUDE_FT, wind_20ft)
        fraction = (altitude_ft - _LOW_ALTITUDE_FT) / (
            _HIGH_ALTITUDE_FT - _LOW_ALTITUDE_FT
        )
        sigma = low_sigma + fraction * (high_sigma - low_sigma)
        length = low_length + fraction * (high_length - low_length)
    return DrydenParameters(
        sigma=(float(sigma[0]), float(sigma[1]), float(sigma[2])),
        scale_length=(float(length[0]), float(length[1]), float(length[2])),
    )


@functools.lru_cache(maxsize=4096)
def _second_order_discretization(
    time_constant: float, dt: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (Φ, noise factor, output row) of the unit-variance lateral filter.

    The shaping filter is (1 + √3·T·s) / (1 + T·s)² driven by white noise of
    intensity T, which has unit stationary variance.
    """
    inverse = 1.0 / time_constant
    a_matrix = np.array([[0.0, 1.0], [-inverse * inverse, -2.0 * inverse]])
    b_vector = np.array([[0.0], [1.0]])
    intensity = b_vector @ b_vector.T * time_constant
    van_loan = np.zeros((4, 4))
    van_loan[:2, :2] = -a_matrix
    van_loan[:2, 2:] = intensity
    van_loan[2:, 2:] = a_matrix.T
    exponential = expm(van_loan * dt)
    transition = exponential[2:, 2:].T
    covariance = transition @ exponential[:2, 2:]
    covariance = 0.5 * (covariance + covariance.T)
    noise = np.linalg.cholesky(covariance)
    output = np.array([inverse * inverse, _SQRT3 * time_constant * inverse * inverse])
    return transition, noise, output


def _binned(time_constant: float) -> float:
    """Quantize a time constant to relative bins so discretizations are reused."""
    return math.exp(round(math.log(time_constant) / _TIME_CONSTANT_BIN) * _TIME_CONSTANT_BIN)


@dataclass
class WindState:
    """Dryden filter states and the resulting turbulence velocity (body axes)."""

    longitudinal: float = 0.0
    lateral: np.ndarray = field(default_factory=lambda: np.zeros(2))
    vertical: np.ndarray = field(default_factory=lambda: np.zeros(2))
    turbulence: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def copy(self) -> WindState:
        """Return an independent copy."""
        return WindState(
            self.longitudinal,
            self.lateral.copy(),
            self.vertical.copy(),
            self.turbulence.copy(),
        )


def dryden_step(
    state: WindState,
    dt: float,
    airspeed: float,
    altitude_agl: float,
    sampler: StochasticSampler,
    severity: str = "light",
) -> WindState:
    """Advance the three Dryden shaping filters by one step.

    Five standard normals are drawn per step whatever the severity, so the
    driving sequence depends on the TURB seed alone.
    """
    noise = sampler.standard_normal(_NOISE_PER_STEP)
    parameters = dryden_parameters(altitude_agl, severity)
    speed = max(airspeed, _MIN_AIRSPEED)
    sigma_u, sigma_v, sigma_w = parameters.sigma
    length_u, length_v, length_w = parameters.scale_length

    decay = math.exp(-speed * dt / length_u)
    longitudinal = decay * state.longitudinal + math.sqrt(1.0 - decay * decay) * noise[0]

    transition, factor, output_v = _second_order_discretization(
        _binned(length_v / speed), dt
    )
    lateral = transition @ state.lateral + factor @ noise[1:3]
    transition, factor, output_w = _second_order_discretization(
        _binned(length_w / speed), dt
    )
    vertical = transition @ state.vertical + factor @ noise[3:5]

    turbulence = np.array(
        [
            sigma_u * longitudinal,
            sigma_v * float(output_v @ lateral),
            sigma_w * float(output_w @ vertical),
        ]
    )
    return WindState(longitudinal, lateral, vertical, turbulence)


class DrydenTurbulence:
    """Single-owner Dryden generator bound to the TURB sampler."""

    def __init__(self, sampler: StochasticSampler, severity: str = "light") -> None:
        """Initialize at rest."""
        self._sampler = sampler
        self.severity = severity
        self.state = WindState()

    @property
    def velocity(self) -> np.ndarray:
        """Return the current turbulence velocity in body axes."""
        return self.state.turbulence

    def step(self, dt: float, airspeed: float, altitude_agl: float) -> np.ndarray:
        """Advance one step and return the turbulence velocity."""
        self.state = dryden_step(
            self.state, dt, airspeed, altitude_agl, self._sampler, self.severity
        )
        return self.state.turbulence
