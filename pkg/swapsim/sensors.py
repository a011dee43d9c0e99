"""Onboard sensor error models.

Every run-to-run term is drawn once when the models are built; in-run terms
(bias drift, white noise, GNSS random walk) are drawn at each sensor epoch.
Each sensor owns the sampler of its own module seed, so the draws of one
sensor never shift those of another.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math

import numpy as np

from .const import GNSS_STEP, SENSED_STEP
from .earth import GeodeticPosition, radii_of_curvature
from .rotations import cross, quat_exp, quat_plus, quat_to_dcm
from .seedtree import StochasticSampler, TrajectorySeedSet

_LOGGER = logging.getLogger(__name__)

_OFF_DIAGONAL = ((0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1))


@dataclass(frozen=True, kw_only=True)
class InertialSensorSpec:
    """Error specification of a triad of accelerometers or gyroscopes.

    Standard deviations: scale factor and cross coupling are dimensionless,
    bias offset in sensor units, bias random walk in units/√s, white noise
    density in units/√Hz.
    """

    scale_factor: float = 0.0
    cross_coupling: float = 0.0
    bias_offset: float = 0.0
    bias_walk: float = 0.0
    noise_density: float = 0.0


@dataclass(frozen=True, kw_only=True)
class MagnetometerSpec:
    """Soft-iron (scale and cross coupling), hard-iron (nT) and noise (nT) stds."""

    scale_factor: float = 0.0
    cross_coupling: float = 0.0
    hard_iron: float = 0.0
    noise: float = 0.0


@dataclass(frozen=True)
class ChannelSpec:
    """Bias offset and white noise standard deviations of a scalar channel."""

    bias: float = 0.0
    noise: float = 0.0


@dataclass(frozen=True, kw_only=True)
class AirDataSpec:
    """Channels of the air data system: Pa, K, m/s, rad, rad."""

    pressure: ChannelSpec = field(default_factory=ChannelSpec)
    temperature: ChannelSpec = field(default_factory=ChannelSpec)
    airspeed: ChannelSpec = field(default_factory=ChannelSpec)
    alpha: ChannelSpec = field(default_factory=ChannelSpec)
    beta: ChannelSpec = field(default_factory=ChannelSpec)


@dataclass(frozen=True, kw_only=True)
class GnssSpec:
    """Receiver errors: NED position noise, ionospheric bias and walk, velocity noise."""

    position_noise: tuple[float, float, float] = (0.0, 0.0, 0.0)
    ionospheric_bias: tuple[float, float, float] = (0.0, 0.0, 0.0)
    ionospheric_walk: tuple[float, float, float] = (0.0, 0.0, 0.0)
    velocity_noise: float = 0.0


@dataclass(frozen=True, kw_only=True)
class PlatformSpec:
    """IMU location in the structural frame (m) and mounting error stds."""

    imu_position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    imu_misalignment: float = 0.0
    lever_arm_knowledge: float = 0.0


@dataclass(frozen=True, kw_only=True)
class CameraSpec:
    """Camera location (m), nominal mounting (deg), mounting error stds (rad), intrinsics (px)."""

    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    mounting: tuple[float, float, float] = (0.0, -90.0, 0.0)
    misalignment: float = 0.0
    mounting_knowledge: float = 0.0
    focal_length: float = 800.0
    width: int = 1024
    height: int = 768


@dataclass(frozen=True, kw_only=True)
class AlignmentSpec:
    """Stds of the fine alignment: attitude (rad), bias estimates, hard-iron estimate (nT)."""

    attitude: tuple[float, float, float] = (0.0, 0.0, 0.0)
    accelerometer_bias: float = 0.0
    gyroscope_bias: float = 0.0
    hard_iron: float = 0.0


@dataclass(frozen=True, kw_only=True)
class SensorSpec:
    """Complete onboard sensor specification."""

    accelerometer: InertialSensorSpec = field(default_factory=InertialSensorSpec)
    gyroscope: InertialSensorSpec = field(default_factory=InertialSensorSpec)
    magnetometer: MagnetometerSpec = field(default_factory=MagnetometerSpec)
    air_data: AirDataSpec = field(default_factory=AirDataSpec)
    gnss: GnssSpec = field(default_factory=GnssSpec)
    platform: PlatformSpec = field(default_factory=PlatformSpec)
    camera: CameraSpec = field(default_factory=CameraSpec)
    alignment: AlignmentSpec = field(default_factory=AlignmentSpec)


def _distortion_matrix(
    sampler: StochasticSampler, scale_std: float, cross_std: float
) -> np.ndarray:
    """Draw I + diag(scale) + off-diagonal cross coupling; three then six normals."""
    matrix = np.eye(3) + np.diag(scale_std * sampler.standard_normal(3))
    cross = cross_std * sampler.standard_normal(6)
    for (row, column), value in zip(_OFF_DIAGONAL, cross, strict=True):
        matrix[row, column] = value
    return matrix


class InertialErrorModel:
    """Scale/cross coupling, bias offset, random-walk drift and white noise of a triad."""

    def __init__(
        self,
        spec: InertialSensorSpec,
        sampler: StochasticSampler,
        mounting: np.ndarray,
        dt: float = SENSED_STEP,
    ) -> None:
        """Draw the run-to-run terms."""
        self._sampler = sampler
        self.distortion = _distortion_matrix(sampler, spec.scale_factor, spec.cross_coupling)
        self.transform = self.distortion @ mounting
        self.bias_offset = spec.bias_offset * sampler.standard_normal(3)
        self.drift = np.zeros(3)
        self._walk_std = spec.bias_walk * math.sqrt(dt)
        self._noise_std = spec.noise_density / math.sqrt(dt)

    @property
    def bias(self) -> np.ndarray:
        """Return the current total bias."""
        return self.bias_offset + self.drift

    def measure(self, truth: np.ndarray) -> np.ndarray:
        """Advance the drift one epoch and return the measurement."""
        self.drift = self.drift + self._walk_std * self._sampler.standard_normal(3)
        noise = self._noise_std * self._sampler.standard_normal(3)
        return self.transform @ truth + self.bias_offset + self.drift + noise


@dataclass
class ImuErrorModel:
    """Accelerometer and gyroscope error models sharing one mounting."""

    accelerometer: InertialErrorModel
    gyroscope: InertialErrorModel
    lever_arm: np.ndarray
    mounting: np.ndarray
    lever_arm_estimate: np.ndarray


class MagnetometerErrorModel:
    """Soft iron, hard iron and white noise; drift free."""

    def __init__(self, spec: MagnetometerSpec, sampler: StochasticSampler) -> None:
        """Draw the run-to-run terms."""
        self._sampler = sampler
        self.soft_iron = _distortion_matrix(sampler, spec.scale_factor, spec.cross_coupling)
        self.hard_iron = spec.hard_iron * sampler.standard_normal(3)
        self._noise_std = spec.noise

    def measure(self, truth: np.ndarray) -> np.ndarray:
        """Return the measured field in body axes, nT."""
        noise = self._noise_std * self._sampler.standard_normal(3)
        return self.soft_iron @ truth + self.hard_iron + noise


class ChannelErrorModel:
    """Bias offset plus white noise on a scalar."""

    def __init__(self, spec: ChannelSpec, sampler: StochasticSampler) -> None:
        """Draw the bias."""
        self._sampler = sampler
        self.bias = sampler.normal(0.0, spec.bias)
        self._noise_std = spec.noise

    def measure(self, truth: float) -> float:
        """Return the measured value."""
        return truth + self.bias + self._sampler.normal(0.0, self._noise_std)


@dataclass
class AirDataErrorModel:
    """Independent channels, each on its own module seed."""

    pressure: ChannelErrorModel
    temperature: ChannelErrorModel
    airspeed: ChannelErrorModel
    alpha: ChannelErrorModel
    beta: ChannelErrorModel


class GnssErrorModel:
    """White noise plus slowly varying ionospheric error on position; white noise on velocity."""

    def __init__(
        self, spec: GnssSpec, sampler: StochasticSampler, denied_time: float
    ) -> None:
        """Draw the ionospheric bias."""
        self._sampler = sampler
        self.denied_time = denied_time
        self.ionospheric_bias = np.asarray(spec.ionospheric_bias) * sampler.standard_normal(3)
        self.walk = np.zeros(3)
        self._walk_std = np.asarray(spec.ionospheric_walk) * math.sqrt(GNSS_STEP)
        self._position_std = np.asarray(spec.position_noise, dtype=float)
        self._velocity_std = spec.velocity_noise

    def available(self, t: float) -> bool:
        """Return whether the receiver provides a fix at time t."""
        return t < self.denied_time

    def position_error(self) -> np.ndarray:
        """Advance the walk and return the NED position error of one fix."""
        self.walk = self.walk + self._walk_std * self._sampler.standard_normal(3)
        noise = self._position_std * self._sampler.standard_normal(3)
        return self.ionospheric_bias + self.walk + noise

    def velocity_error(self) -> np.ndarray:
        """Return the NED velocity error of one fix."""
        return self._velocity_std * self._sampler.standard_normal(3)


@dataclass
class SensorErrors:
    """All error models of one run."""

    imu: ImuErrorModel
    magnetometer: MagnetometerErrorModel
    air_data: AirDataErrorModel
    gnss: GnssErrorModel


@dataclass(frozen=True)
class GnssFix:
    """Geodetic position and NED velocity reported by the receiver."""

    position: GeodeticPosition
    velocity_ned: np.ndarray


@dataclass(frozen=True)
class SensedRecord:
    """Sensor outputs of one sensing epoch."""

    t: float
    specific_force: np.ndarray
    angular_rate: np.ndarray
    magnetic_field: np.ndarray
    pressure: float
    temperature: float
    airspeed: float
    alpha: float
    beta: float
    gnss: GnssFix | None = None


def initialize_sensor_errors(
    spec: SensorSpec, seeds: TrajectorySeedSet, denied_time: float
) -> SensorErrors:
    """Build every sensor error model of a run from its module seeds."""
    platform = seeds.sampler("PLAT")
    misalignment = spec.platform.imu_misalignment * platform.standard_normal(3)
    lever_arm_error = spec.platform.lever_arm_knowledge * platform.standard_normal(3)
    mounting = quat_to_dcm(quat_exp(misalignment)).T
    lever_arm = np.asarray(spec.platform.imu_position, dtype=float)
    imu = ImuErrorModel(
        accelerometer=InertialErrorModel(spec.accelerometer, seeds.sampler("ACC"), mounting),
        gyroscope=InertialErrorModel(spec.gyroscope, seeds.sampler("GYR"), mounting),
        lever_arm=lever_arm,
        mounting=mounting,
        lever_arm_estimate=lever_arm + lever_arm_error,
    )
    air = spec.air_data
    errors = SensorErrors(
        imu=imu,
        magnetometer=MagnetometerErrorModel(spec.magnetometer, seeds.sampler("MAG")),
        air_data=AirDataErrorModel(
            pressure=ChannelErrorModel(air.pressure, seeds.sampler("OSP")),
            temperature=ChannelErrorModel(air.temperature, seeds.sampler("OAT")),
            airspeed=ChannelErrorModel(air.airspeed, seeds.sampler("TAS")),
            alpha=ChannelErrorModel(air.alpha, seeds.sampler("AOA")),
            beta=ChannelErrorModel(air.beta, seeds.sampler("AOS")),
        ),
        gnss=GnssErrorModel(spec.gnss, seeds.sampler("GNSS"), denied_time),
    )
    _LOGGER.debug(
        "Sensor errors for run %d: accelerometer bias %s, gyroscope bias %s",
        seeds.run_index,
        imu.accelerometer.bias_offset,
        imu.gyroscope.bias_offset,
    )
    return errors


def offset_position(
    position: GeodeticPosition, offset_ned: np.ndarray
) -> GeodeticPosition:
    """Return a position displaced by a small NED offset."""
    meridian, prime_vertical = radii_of_curvature(position.latitude)
    return GeodeticPosition(
        position.longitude
        + offset_ned[1] / ((prime_vertical + position.altitude) * math.cos(position.latitude)),
        position.latitude + offset_ned[0] / (meridian + position.altitude),
        position.altitude - offset_ned[2],
    )


class SensorSuite:
    """Sensed trajectory generator for one run."""

    def __init__(self, errors: SensorErrors) -> None:
        """Initialize from drawn error models."""
        self.errors = errors

    def sense_imu(
        self,
        specific_force: np.ndarray,
        angular_rate: np.ndarray,
        angular_acceleration: np.ndarray,
        cg: np.ndarray,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Return the measured specific force and inertial angular rate.

        The specific force is taken at the IMU location, so the lever arm
        from the cg adds the tangential and centripetal terms.
        """
        imu = self.errors.imu
        arm = imu.lever_arm - cg
        force_at_imu = (
            specific_force
            + cross(angular_acceleration, arm)
            + cross(angular_rate, cross(angular_rate, arm))
        )
        return imu.accelerometer.measure(force_at_imu), imu.gyroscope.measure(angular_rate)

    def sense_magnetometer(self, field_body: np.ndarray) -> np.ndarray:
        """Return the measured magnetic field in body axes."""
        return self.errors.magnetometer.measure(field_body)

    def sense_airdata(
        self, pressure: float, temperature: float, airspeed: float, alpha: float, beta: float
    ) -> tuple[float, float, float, float, float]:
        """Return measured (p, T, vtas, α, β)."""
        air = self.errors.air_data
        return (
            air.pressure.measure(pressure),
            air.temperature.measure(temperature),
            air.airspeed.measure(airspeed),
            air.alpha.measure(alpha),
            air.beta.measure(beta),
        )

    def sense_gnss(
        self, t: float, position: GeodeticPosition, velocity_ned: np.ndarray
    ) -> GnssFix | None:
        """Return a fix, or None once the signals are denied."""
        gnss = self.errors.gnss
        if not gnss.available(t):
            return None
        position_error = gnss.position_error()
        velocity_error = gnss.velocity_error()
        return GnssFix(
            position=offset_position(position, position_error),
            velocity_ned=velocity_ned + velocity_error,
        )


@dataclass(frozen=True)
class InitialEstimate:
    """Navigation state and sensor-error estimates after fine alignment."""

    position: GeodeticPosition
    velocity_ned: np.ndarray
    attitude: np.ndarray
    accelerometer_bias: np.ndarray
    gyroscope_bias: np.ndarray
    hard_iron: np.ndarray
    lever_arm: np.ndarray


def fine_alignment(
    position: GeodeticPosition,
    velocity_ned: np.ndarray,
    attitude: np.ndarray,
    errors: SensorErrors,
    spec: AlignmentSpec,
    sampler: StochasticSampler,
    fix: GnssFix | None = None,
) -> InitialEstimate:
    """Return the initial estimate: truth perturbed by the alignment errors.

    Attitude error is a small rotation on the body side; bias estimates are
    the true biases plus normal errors. Position and velocity come from the
    first GNSS fix when one is available.
    """
    attitude_error = np.asarray(spec.attitude) * sampler.standard_normal(3)
    accelerometer_bias = errors.imu.accelerometer.bias + spec.accelerometer_bias * (
        sampler.standard_normal(3)
    )
    gyroscope_bias = errors.imu.gyroscope.bias + spec.gyroscope_bias * sampler.standard_normal(3)
    hard_iron = errors.magnetometer.hard_iron + spec.hard_iron * sampler.standard_normal(3)
    if fix is not None:
        position, velocity_ned = fix.position, fix.velocity_ned
    return InitialEstimate(
        position=position,
        velocity_ned=np.array(velocity_ned, dtype=float),
        attitude=quat_plus(attitude, attitude_error),
        accelerometer_bias=accelerometer_bias,
        gyroscope_bias=gyroscope_bias,
        hard_iron=hard_iron,
        lever_arm=errors.imu.lever_arm_estimate,
    )


def allan_deviation(
    samples: np.ndarray, dt: float, cluster_sizes: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Return (τ, overlapping Allan deviation) of a rate-type signal."""
    samples = np.asarray(samples, dtype=float)
    count = len(samples)
    if cluster_sizes is None:
        cluster_sizes = np.unique(np.logspace(0, math.log10(count // 10), 30).astype(int))
    integral = np.concatenate([[0.0], np.cumsum(samples) * dt])
    taus = []
    deviations = []
    for size in cluster_sizes:
        tau = size * dt
        differences = integral[2 * size :] - 2.0 * integral[size:-size] + integral[: -2 * size]
        if len(differences) == 0:
            break
        taus.append(tau)
        deviations.append(math.sqrt(np.mean(differences**2) / (2.0 * tau * tau)))
    return np.array(taus), np.array(deviations)
