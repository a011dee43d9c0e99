"""Cascaded PID autopilot.

Four primary loops drive the surfaces and throttle; secondary loops turn
pressure altitude, path angle and bearing setpoints into pitch and bank
setpoints for the primary ones. Integrators are kept in output units so a
loop can be initialized on an operating point directly.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
import math

from .airframe import ControlInputs, TrimResult
from .const import CONTROL_STEP
from .guidance import AileronMode, ElevatorMode, GuidanceTarget, ThrottleMode
from .navigation import EstimatedState
from .rotations import wrap_angle

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, kw_only=True)
class PidGains:
    """Gains, derivative filter, setpoint ramp and output limits of one loop."""

    kp: float
    ki: float = 0.0
    kd: float = 0.0
    derivative_time_constant: float = 0.05
    ramp_rate: float = math.inf
    output_min: float = -math.inf
    output_max: float = math.inf
    angular: bool = False


class PidLoop:
    """PID with filtered derivative on measurement, setpoint ramp and conditional anti-windup."""

    def __init__(self, gains: PidGains, dt: float = CONTROL_STEP) -> None:
        """Initialize an idle loop."""
        self.gains = gains
        self.dt = dt
        self.integral = 0.0
        self.setpoint: float | None = None
        self.derivative = 0.0
        self._measurement: float | None = None
        self._filter = gains.derivative_time_constant / (gains.derivative_time_constant + dt)

    def _difference(self, a: float, b: float) -> float:
        return wrap_angle(a - b) if self.gains.angular else a - b

    def reset(self, measurement: float, integral: float = 0.0) -> None:
        """Restart the loop: ramp from the measurement, integrator at ``integral``."""
        self.setpoint = measurement
        self.integral = integral
        self.derivative = 0.0
        self._measurement = measurement

    def _ramp(self, setpoint: float) -> float:
        if self.setpoint is None or math.isinf(self.gains.ramp_rate):
            return setpoint
        limit = self.gains.ramp_rate * self.dt
        step = max(-limit, min(limit, self._difference(setpoint, self.setpoint)))
        ramped = self.setpoint + step
        return wrap_angle(ramped) if self.gains.angular else ramped

    def _clamp(self, value: float) -> float:
        return max(self.gains.output_min, min(self.gains.output_max, value))

    def update(self, setpoint: float, measurement: float, feedforward: float = 0.0) -> float:
        """Return the loop output for one control step."""
        gains = self.gains
        self.setpoint = self._ramp(setpoint)
        error = self._difference(self.setpoint, measurement)
        if self._measurement is not None:
            rate = -self._difference(measurement, self._measurement) / self.dt
            self.derivative = self._filter * self.derivative + (1.0 - self._filter) * rate
        self._measurement = measurement

        proportional = feedforward + gains.kp * error + gains.kd * self.derivative
        candidate = self.integral + gains.ki * error * self.dt
        unsaturated = proportional + candidate
        winding_up = (unsaturated > gains.output_max and gains.ki * error > 0.0) or (
            unsaturated < gains.output_min and gains.ki * error < 0.0
        )
        if not winding_up:
            self.integral = candidate
        return self._clamp(proportional + self.integral)


@dataclass(frozen=True, kw_only=True)
class ControlGains:
    """Gains of every loop and the actuator limits (rad, throttle fraction)."""

    pitch: PidGains
    pressure_altitude: PidGains
    path_angle: PidGains
    airspeed: PidGains
    bank: PidGains
    bearing: PidGains
    sideslip: PidGains
    surface_limit: float = math.radians(25.0)
    throttle_min: float = 0.0
    throttle_max: float = 1.0


class Controller:
    """Autopilot of one run, initialized on a trim point."""

    def __init__(self, gains: ControlGains, trim: TrimResult, estimate: EstimatedState) -> None:
        """Initialize every loop so the trim controls come out at zero error."""
        self.gains = gains
        self.pitch = PidLoop(gains.pitch)
        self.pressure_altitude = PidLoop(gains.pressure_altitude)
        self.path_angle = PidLoop(gains.path_angle)
        self.airspeed = PidLoop(gains.airspeed)
        self.bank = PidLoop(gains.bank)
        self.bearing = PidLoop(gains.bearing)
        self.sideslip = PidLoop(gains.sideslip)
        yaw, pitch, roll = estimate.euler
        controls = trim.controls
        self.pitch.reset(pitch, controls.elevator)
        self.pressure_altitude.reset(estimate.pressure_altitude, pitch)
        self.path_angle.reset(estimate.path_angle)
        self.airspeed.reset(estimate.airspeed, controls.throttle)
        self.bank.reset(roll, controls.aileron)
        self.bearing.reset(estimate.bearing)
        self.sideslip.reset(estimate.beta, controls.rudder)
        self._elevator_mode: ElevatorMode | None = None
        self._aileron_mode: AileronMode | None = None
        self._throttle = controls.throttle
        self.pitch_setpoint = pitch
        self.bank_setpoint = roll

    def _activate(self, target: GuidanceTarget, estimate: EstimatedState) -> None:
        """Bumpless transfer when a channel changes setpoint kind."""
        _, pitch, roll = estimate.euler
        elevator = target.elevator.mode
        if elevator != self._elevator_mode:
            if elevator == ElevatorMode.PRESSURE_ALTITUDE:
                self.pressure_altitude.reset(
                    estimate.pressure_altitude, pitch - estimate.path_angle
                )
            elif elevator == ElevatorMode.PATH_ANGLE:
                self.path_angle.reset(estimate.path_angle)
            _LOGGER.debug("Elevator channel now tracks %s", elevator)
            self._elevator_mode = elevator
        aileron = target.aileron.mode
        if aileron != self._aileron_mode:
            if aileron == AileronMode.BEARING:
                self.bearing.reset(estimate.bearing)
            else:
                self.bank.setpoint = roll
            _LOGGER.debug("Aileron channel now tracks %s", aileron)
            self._aileron_mode = aileron

    def step(self, target: GuidanceTarget, estimate: EstimatedState) -> ControlInputs:
        """Return saturated controls for the active target."""
        self._activate(target, estimate)
        gains = self.gains
        _, pitch, roll = estimate.euler

        match target.elevator.mode:
            case ElevatorMode.PITCH:
                pitch_setpoint = target.elevator.value
            case ElevatorMode.PRESSURE_ALTITUDE:
                pitch_setpoint = self.pressure_altitude.update(
                    target.elevator.value, estimate.pressure_altitude
                )
            case ElevatorMode.PATH_ANGLE:
                pitch_setpoint = self.path_angle.update(
                    target.elevator.value,
                    estimate.path_angle,
                    feedforward=target.elevator.value + estimate.alpha,
                )
        self.pitch_setpoint = pitch_setpoint
        elevator = self.pitch.update(pitch_setpoint, pitch)

        if target.aileron.mode == AileronMode.BEARING:
            bank_setpoint = self.bearing.update(target.aileron.value, estimate.bearing)
        else:
            bank_setpoint = target.aileron.value
        self.bank_setpoint = bank_setpoint
        aileron = self.bank.update(bank_setpoint, roll)

        if target.throttle.mode == ThrottleMode.AIRSPEED:
            self._throttle = self.airspeed.update(target.throttle.value, estimate.airspeed)
        rudder = self.sideslip.update(target.rudder.value, estimate.beta)

        limit = gains.surface_limit
        return ControlInputs(
            throttle=max(gains.throttle_min, min(gains.throttle_max, self._throttle)),
            elevator=max(-limit, min(limit, elevator)),
            aileron=max(-limit, min(limit, aileron)),
            rudder=max(-limit, min(limit, rudder)),
        )
