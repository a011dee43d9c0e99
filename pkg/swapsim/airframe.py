"""Aircraft performance model.

Mass and inertia follow the fuel load, aerodynamic forces come from a
linear stability-derivative set, and the propeller shaft speed is resolved
each evaluation by balancing engine power against propeller power.

Body axes are x forward, y right, z down. The structural frame is parallel
to the body axes with its origin at the aerodynamic reference point; the
propeller thrust line passes through that point along +x.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
import math

import numpy as np
from scipy.optimize import brentq, root

from .atmosphere import AtmosphericState
from .const import G0, R_AIR, RHO0
from .exceptions import EnvelopeError
from .rotations import cross

_LOGGER = logging.getLogger(__name__)

_SHAFT_TOLERANCE = 1e-12
_SHAFT_NEWTON_ITERATIONS = 8
_TRIM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class MassProperties:
    """Mass (kg), centre of gravity in the structural frame (m) and inertia (kg·m²)."""

    mass: float
    cg: np.ndarray
    inertia: np.ndarray

    @property
    def inertia_inverse(self) -> np.ndarray:
        """Return the inverse inertia tensor.

        The airframe is symmetric about its x-z plane, so only the product of
        inertia Ixz couples the axes.
        """
        (ixx, _, coupling), (_, iyy, _), (_, _, izz) = self.inertia
        determinant = ixx * izz - coupling * coupling
        return np.array(
            [
                [izz / determinant, 0.0, -coupling / determinant],
                [0.0, 1.0 / iyy, 0.0],
                [-coupling / determinant, 0.0, ixx / determinant],
            ]
        )


@dataclass(frozen=True, kw_only=True)
class AeroCoefficients:
    """Nondimensional stability and control derivatives, per radian."""

    lift_0: float
    lift_alpha: float
    lift_q: float
    lift_elevator: float
    drag_0: float
    drag_k: float
    drag_beta: float
    side_beta: float
    side_p: float
    side_r: float
    side_rudder: float
    roll_beta: float
    roll_p: float
    roll_r: float
    roll_aileron: float
    roll_rudder: float
    pitch_0: float
    pitch_alpha: float
    pitch_q: float
    pitch_elevator: float
    yaw_beta: float
    yaw_p: float
    yaw_r: float
    yaw_aileron: float
    yaw_rudder: float


@dataclass(frozen=True, kw_only=True)
class AirframeDefinition:
    """Geometry, mass model, derivative set and powerplant of one airframe."""

    wing_area: float
    span: float
    chord: float
    dry_mass: float
    fuel_capacity: float
    cg_full: tuple[float, float, float]
    cg_empty: tuple[float, float, float]
    inertia_full: tuple[float, float, float, float]
    inertia_empty: tuple[float, float, float, float]
    aero: AeroCoefficients
    alpha_min: float
    alpha_max: float
    beta_max: float
    max_power: float
    specific_fuel_consumption: float
    propeller_diameter: float
    thrust_coefficients: tuple[float, ...]
    power_coefficients: tuple[float, ...]
    advance_ratio_max: float
    propeller_rotation: float = 1.0


@dataclass(frozen=True)
class Wrench:
    """Total force (N) and moment about the cg (N·m) in body axes, plus air data."""

    force: np.ndarray
    moment: np.ndarray
    fuel_flow: float
    airspeed: float
    alpha: float
    beta: float
    shaft_speed: float


@dataclass(frozen=True)
class ControlInputs:
    """Throttle fraction and surface deflections (rad)."""

    throttle: float = 0.0
    elevator: float = 0.0
    aileron: float = 0.0
    rudder: float = 0.0

    def as_tuple(self) -> tuple[float, float, float, float]:
        """Return (δT, δE, δA, δR)."""
        return self.throttle, self.elevator, self.aileron, self.rudder


@dataclass(frozen=True)
class TrimResult:
    """Wings-level trim solution."""

    airspeed: float
    alpha: float
    beta: float
    pitch: float
    controls: ControlInputs
    shaft_speed: float
    force_residual: np.ndarray
    moment_residual: np.ndarray


def air_angles(air_velocity: np.ndarray) -> tuple[float, float, float]:
    """Return (airspeed, α, β) of a body-axes air-relative velocity."""
    u, v, w = air_velocity
    airspeed = math.sqrt(u * u + v * v + w * w)
    if airspeed == 0.0:
        return 0.0, 0.0, 0.0
    return airspeed, math.atan2(w, u), math.asin(max(-1.0, min(1.0, v / airspeed)))


def _polynomial(coefficients: tuple[float, ...], x: float) -> float:
    result = 0.0
    for coefficient in reversed(coefficients):
        result = result * x + coefficient
    return result


def _polynomial_slope(coefficients: tuple[float, ...], x: float) -> float:
    result = 0.0
    for power in range(len(coefficients) - 1, 0, -1):
        result = result * x + power * coefficients[power]
    return result


def _wind_to_body(alpha: float, beta: float) -> np.ndarray:
    ca, sa = math.cos(alpha), math.sin(alpha)
    cb, sb = math.cos(beta), math.sin(beta)
    return np.array(
        [
            [ca * cb, -ca * sb, -sa],
            [sb, cb, 0.0],
            [sa * cb, -sa * sb, ca],
        ]
    )


class Airframe:
    """Deterministic performance model of one airframe."""

    def __init__(self, definition: AirframeDefinition) -> None:
        """Initialize from a definition."""
        self.definition = definition
        d = definition
        self._inertia_full = self._inertia_matrix(d.inertia_full)
        self._inertia_empty = self._inertia_matrix(d.inertia_empty)
        self._cg_full = np.asarray(d.cg_full, dtype=float)
        self._cg_empty = np.asarray(d.cg_empty, dtype=float)

    @staticmethod
    def _inertia_matrix(values: tuple[float, float, float, float]) -> np.ndarray:
        ixx, iyy, izz, ixz = values
        return np.array([[ixx, 0.0, -ixz], [0.0, iyy, 0.0], [-ixz, 0.0, izz]])

    @property
    def dry_mass(self) -> float:
        """Return the mass with empty tanks."""
        return self.definition.dry_mass

    @property
    def full_mass(self) -> float:
        """Return the mass with full tanks."""
        return self.definition.dry_mass + self.definition.fuel_capacity

    def mass_properties(self, fuel: float) -> MassProperties:
        """Return mass, cg and inertia for a fuel load, linear between empty and full."""
        d = self.definition
        fuel = min(max(fuel, 0.0), d.fuel_capacity)
        fraction = fuel / d.fuel_capacity
        return MassProperties(
            mass=d.dry_mass + fuel,
            cg=self._cg_empty + fraction * (self._cg_full - self._cg_empty),
            inertia=self._inertia_empty
            + fraction * (self._inertia_full - self._inertia_empty),
        )

    def aero_wrench(
        self,
        alpha: float,
        beta: float,
        controls: ControlInputs,
        rates: np.ndarray,
        dynamic_pressure: float,
        airspeed: float,
        mass: MassProperties,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Return the aerodynamic force and moment about the cg, body axes."""
        d = self.definition
        if dynamic_pressure == 0.0 or airspeed == 0.0:
            return np.zeros(3), np.zeros(3)
        if not d.alpha_min <= alpha <= d.alpha_max or abs(beta) > d.beta_max:
            raise EnvelopeError(
                f"Aerodynamic angles outside envelope: alpha={math.degrees(alpha):.2f} deg,"
                f" beta={math.degrees(beta):.2f} deg"
            )
        c = d.aero
        p_hat = rates[0] * d.span / (2.0 * airspeed)
        q_hat = rates[1] * d.chord / (2.0 * airspeed)
        r_hat = rates[2] * d.span / (2.0 * airspeed)

        lift = (
            c.lift_0 + c.lift_alpha * alpha + c.lift_q * q_hat + c.lift_elevator * controls.elevator
        )
        drag = c.drag_0 + c.drag_k * lift * lift + c.drag_beta * beta * beta
        side = (
            c.side_beta * beta
            + c.side_p * p_hat
            + c.side_r * r_hat
            + c.side_rudder * controls.rudder
        )
        roll = (
            c.roll_beta * beta
            + c.roll_p * p_hat
            + c.roll_r * r_hat
            + c.roll_aileron * controls.aileron
            + c.roll_rudder * controls.rudder
        )
        pitch = (
            c.pitch_0
            + c.pitch_alpha * alpha
            + c.pitch_q * q_hat
            + c.pitch_elevator * controls.elevator
        )
        yaw = (
            c.yaw_beta * beta
            + c.yaw_p * p_hat
            + c.yaw_r * r_hat
            + c.yaw_aileron * controls.aileron
            + c.yaw_rudder * controls.rudder
        )

        scale = dynamic_pressure * d.wing_area
        force = _wind_to_body(alpha, beta) @ np.array([-drag, side, -lift]) * scale
        moment = np.array([roll * d.span, pitch * d.chord, yaw * d.span]) * scale
        moment = moment + cross(-mass.cg, force)
        return force, moment

    def engine_power(self, throttle: float, pressure: float, temperature: float) -> float:
        """Return shaft power (W) from throttle and ambient conditions."""
        sigma = pressure / (R_AIR * temperature) / RHO0
        lapse = max(sigma - (1.0 - sigma) / 7.55, 0.0)
        return self.definition.max_power * min(max(throttle, 0.0), 1.0) * lapse

    def fuel_flow(self, power: float) -> float:
        """Return fuel flow (kg/s) at a shaft power."""
        return self.definition.specific_fuel_consumption * power

    def thrust_coefficient(self, advance_ratio: float) -> float:
        """Return CT(J)."""
        return _polynomial(self.definition.thrust_coefficients, advance_ratio)

    def power_coefficient(self, advance_ratio: float) -> float:
        """Return CP(J)."""
        return _polynomial(self.definition.power_coefficients, advance_ratio)

    def propeller_wrench(
        self, shaft_speed: float, airspeed: float, density: float
    ) -> tuple[float, float]:
        """Return propeller thrust (N) and torque (N·m) at a shaft speed (rev/s)."""
        if shaft_speed <= 0.0:
            return 0.0, 0.0
        d = self.definition
        diameter = d.propeller_diameter
        advance = min(max(airspeed, 0.0) / (shaft_speed * diameter), d.advance_ratio_max)
        thrust = self.thrust_coefficient(advance) * density * shaft_speed**2 * diameter**4
        power = self.power_coefficient(advance) * density * shaft_speed**3 * diameter**5
        return thrust, power / (2.0 * math.pi * shaft_speed)

    def propeller_power(self, shaft_speed: float, airspeed: float, density: float) -> float:
        """Return the power absorbed by the propeller (W)."""
        _, torque = self.propeller_wrench(shaft_speed, airspeed, density)
        return 2.0 * math.pi * shaft_speed * torque

    def shaft_speed(
        self, power: float, airspeed: float, density: float, guess: float | None = None
    ) -> float:
        """Return the shaft speed (rev/s) at which propeller power equals engine power.

        A guess, usually the previous evaluation's speed, starts Newton
        iterations; the bracketed solve is the fallback.
        """
        if power <= 0.0:
            return 0.0
        d = self.definition
        scale = density * d.propeller_diameter**5
        if airspeed <= 0.0:
            return (power / (self.power_coefficient(0.0) * scale)) ** (1.0 / 3.0)
        low = airspeed / (d.advance_ratio_max * d.propeller_diameter)
        if power <= self.power_coefficient(d.advance_ratio_max) * scale * low**3:
            return (power / (self.power_coefficient(d.advance_ratio_max) * scale)) ** (1.0 / 3.0)
        if guess is not None and guess > low:
            speed = self._newton_shaft_speed(power, airspeed, scale, guess, low)
            if speed is not None:
                return speed

        def _balance(speed: float) -> float:
            return self.propeller_power(speed, airspeed, density) - power

        high = max(2.0 * low, 50.0)
        while _balance(high) < 0.0:
            high *= 2.0
        return brentq(_balance, low, high, xtol=_SHAFT_TOLERANCE, rtol=4.0 * np.finfo(float).eps)

    def _newton_shaft_speed(
        self, power: float, airspeed: float, scale: float, speed: float, low: float
    ) -> float | None:
        # Above ``low`` the advance ratio is unclipped: P = CP(J)·ρD⁵n³, J = V/(nD).
        d = self.definition
        for _ in range(_SHAFT_NEWTON_ITERATIONS):
            advance = airspeed / (speed * d.propeller_diameter)
            coefficient = self.power_coefficient(advance)
            slope = (
                scale
                * speed
                * speed
                * (3.0 * coefficient - advance * _polynomial_slope(d.power_coefficients, advance))
            )
            if slope <= 0.0:
                return None
            step = (scale * coefficient * speed**3 - power) / slope
            speed -= step
            if speed <= low:
                return None
            if abs(step) <= _SHAFT_TOLERANCE:
                return speed
        return None

    def propulsion(
        self,
        throttle: float,
        axial_airspeed: float,
        atmosphere: AtmosphericState,
        fuel: float,
        shaft_speed_guess: float | None = None,
    ) -> tuple[np.ndarray, np.ndarray, float, float]:
        """Return propulsive force, moment, fuel flow and shaft speed."""
        if fuel <= 0.0:
            return np.zeros(3), np.zeros(3), 0.0, 0.0
        power = self.engine_power(throttle, atmosphere.pressure, atmosphere.temperature)
        density = atmosphere.density
        speed = self.shaft_speed(power, axial_airspeed, density, shaft_speed_guess)
        thrust, torque = self.propeller_wrench(speed, axial_airspeed, density)
        force = np.array([thrust, 0.0, 0.0])
        moment = np.array([-self.definition.propeller_rotation * torque, 0.0, 0.0])
        return force, moment, self.fuel_flow(power), speed

    def wrench(
        self,
        air_velocity: np.ndarray,
        rates: np.ndarray,
        controls: ControlInputs,
        atmosphere: AtmosphericState,
        fuel: float,
        mass: MassProperties,
        shaft_speed_guess: float | None = None,
    ) -> Wrench:
        """Return the total aerodynamic and propulsive wrench about the cg."""
        airspeed, alpha, beta = air_angles(air_velocity)
        dynamic_pressure = 0.5 * atmosphere.density * airspeed * airspeed
        aero_force, aero_moment = self.aero_wrench(
            alpha, beta, controls, rates, dynamic_pressure, airspeed, mass
        )
        prop_force, prop_moment, fuel_flow, shaft_speed = self.propulsion(
            controls.throttle, air_velocity[0], atmosphere, fuel, shaft_speed_guess
        )
        prop_moment = prop_moment + cross(-mass.cg, prop_force)
        return Wrench(
            force=aero_force + prop_force,
            moment=aero_moment + prop_moment,
            fuel_flow=fuel_flow,
            airspeed=airspeed,
            alpha=alpha,
            beta=beta,
            shaft_speed=shaft_speed,
        )

    def _trim_residual(
        self,
        unknowns: np.ndarray,
        airspeed: float,
        path_angle: float,
        atmosphere: AtmosphericState,
        fuel: float,
        gravity: float,
    ) -> tuple[np.ndarray, Wrench, float]:
        alpha, beta, elevator, aileron, rudder, throttle = unknowns
        pitch = alpha + math.asin(math.sin(path_angle) / math.cos(beta))
        air_velocity = airspeed * np.array(
            [math.cos(alpha) * math.cos(beta), math.sin(beta), math.sin(alpha) * math.cos(beta)]
        )
        mass = self.mass_properties(fuel)
        controls = ControlInputs(throttle, elevator, aileron, rudder)
        wrench = self.wrench(air_velocity, np.zeros(3), controls, atmosphere, fuel, mass)
        weight = mass.mass * gravity * np.array([-math.sin(pitch), 0.0, math.cos(pitch)])
        residual = np.concatenate([wrench.force + weight, wrench.moment])
        return residual, wrench, pitch

    def trim(
        self,
        airspeed: float,
        atmosphere: AtmosphericState,
        fuel: float,
        gravity: float = G0,
        path_angle: float = 0.0,
    ) -> TrimResult:
        """Solve wings-level steady flight for α, β, δE, δA, δR and δT."""
        initial = np.array([0.05, 0.0, 0.0, 0.0, 0.0, 0.3])
        solution = root(
            lambda x: self._trim_residual(x, airspeed, path_angle, atmosphere, fuel, gravity)[0],
            initial,
            method="hybr",
            options={"xtol": 1e-14},
        )
        residual, wrench, pitch = self._trim_residual(
            solution.x, airspeed, path_angle, atmosphere, fuel, gravity
        )
        alpha, beta, elevator, aileron, rudder, throttle = (float(v) for v in solution.x)
        if np.max(np.abs(residual)) > _TRIM_TOLERANCE or not 0.0 <= throttle <= 1.0:
            raise EnvelopeError(
                f"No trim at {airspeed:.2f} m/s (residual {np.max(np.abs(residual)):.3g},"
                f" throttle {throttle:.3f})"
            )
        _LOGGER.debug(
            "Trim at %.2f m/s: alpha %.3f deg, elevator %.3f deg, throttle %.3f",
            airspeed,
            math.degrees(alpha),
            math.degrees(elevator),
            throttle,
        )
        return TrimResult(
            airspeed=airspeed,
            alpha=alpha,
            beta=beta,
            pitch=pitch,
            controls=ControlInputs(throttle, elevator, aileron, rudder),
            shaft_speed=wrench.shaft_speed,
            force_residual=residual[:3],
            moment_residual=residual[3:],
        )

    def _longitudinal_derivative(
        self,
        state: np.ndarray,
        trim: TrimResult,
        atmosphere: AtmosphericState,
        fuel: float,
        gravity: float,
    ) -> np.ndarray:
        u, w, q, pitch = state
        v = trim.airspeed * math.sin(trim.beta)
        mass = self.mass_properties(fuel)
        rates = np.array([0.0, q, 0.0])
        wrench = self.wrench(np.array([u, v, w]), rates, trim.controls, atmosphere, fuel, mass)
        angular = mass.inertia_inverse @ (
            wrench.moment - cross(rates, mass.inertia @ rates)
        )
        return np.array(
            [
                wrench.force[0] / mass.mass - gravity * math.sin(pitch) - q * w,
                wrench.force[2] / mass.mass + gravity * math.cos(pitch) + q * u,
                angular[1],
                q,
            ]
        )

    def longitudinal_modes(
        self,
        trim: TrimResult,
        atmosphere: AtmosphericState,
        fuel: float,
        gravity: float = G0,
    ) -> np.ndarray:
        """Return the eigenvalues of the longitudinal linearization about a trim."""
        airspeed = trim.airspeed
        reference = np.array(
            [
                airspeed * math.cos(trim.alpha) * math.cos(trim.beta),
                airspeed * math.sin(trim.alpha) * math.cos(trim.beta),
                0.0,
                trim.pitch,
            ]
        )
        steps = np.array([1e-4, 1e-4, 1e-6, 1e-6])
        jacobian = np.zeros((4, 4))
        for column, step in enumerate(steps):
            delta = np.zeros(4)
            delta[column] = step
            forward = self._longitudinal_derivative(
                reference + delta, trim, atmosphere, fuel, gravity
            )
            backward = self._longitudinal_derivative(
                reference - delta, trim, atmosphere, fuel, gravity
            )
            jacobian[:, column] = (forward - backward) / (2.0 * step)
        return np.linalg.eigvals(jacobian)
