"""Offset standard atmosphere (troposphere only).

Pressure altitude is defined by pressure alone through the standard
relation. The temperature offset shifts the temperature profile and the
pressure offset shifts the mean sea level pressure, so geopotential altitude
follows from hydrostatic integration of the offset profile:

    H(Hp) = Hp - Hp0 + ΔT / βT · ln((T0 + βT·Hp) / (T0 + βT·Hp0))

where Hp0 is the pressure altitude of the sea level pressure p0 + Δp.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

from .const import BETA_T, G0, HP_MIN, HP_TROPOPAUSE, P0, R_AIR, RHO0, T0
from .exceptions import AtmosphereError

_PRESSURE_EXPONENT = -G0 / (BETA_T * R_AIR)
_NEWTON_TOLERANCE = 1e-9
_NEWTON_ITERATIONS = 30


@dataclass(frozen=True)
class AtmosphericState:
    """Atmospheric conditions at one point."""

    temperature: float
    pressure: float
    pressure_altitude: float
    geopotential_altitude: float
    temperature_offset: float = 0.0
    pressure_offset: float = 0.0

    @property
    def density(self) -> float:
        """Return the air density, kg/m³."""
        return self.pressure / (R_AIR * self.temperature)

    @property
    def density_ratio(self) -> float:
        """Return density relative to standard sea level."""
        return self.density / RHO0


def _check_layer(pressure_altitude: float) -> None:
    if not HP_MIN <= pressure_altitude <= HP_TROPOPAUSE:
        raise AtmosphereError(
            f"Pressure altitude {pressure_altitude:.1f} m outside modeled layer"
        )


def standard_pressure(pressure_altitude: float) -> float:
    """Return the standard pressure at a pressure altitude."""
    return P0 * (1.0 + BETA_T * pressure_altitude / T0) ** _PRESSURE_EXPONENT


def pressure_altitude_from_pressure(pressure: float) -> float:
    """Return the pressure altitude of a pressure."""
    return T0 / BETA_T * ((pressure / P0) ** (1.0 / _PRESSURE_EXPONENT) - 1.0)


def _sea_level_pressure_altitude(pressure_offset: float) -> float:
    return pressure_altitude_from_pressure(P0 + pressure_offset)


def geopotential_from_pressure_altitude(
    pressure_altitude: float, temperature_offset: float, pressure_offset: float
) -> float:
    """Return the geopotential altitude of a pressure altitude under offsets."""
    sea_level = _sea_level_pressure_altitude(pressure_offset)
    return (
        pressure_altitude
        - sea_level
        + temperature_offset
        / BETA_T
        * math.log((T0 + BETA_T * pressure_altitude) / (T0 + BETA_T * sea_level))
    )


def insa_state(
    pressure_altitude: float, temperature_offset: float = 0.0, pressure_offset: float = 0.0
) -> AtmosphericState:
    """Return the atmospheric state at a pressure altitude."""
    _check_layer(pressure_altitude)
    return AtmosphericState(
        temperature=T0 + temperature_offset + BETA_T * pressure_altitude,
        pressure=standard_pressure(pressure_altitude),
        pressure_altitude=pressure_altitude,
        geopotential_altitude=geopotential_from_pressure_altitude(
            pressure_altitude, temperature_offset, pressure_offset
        ),
        temperature_offset=temperature_offset,
        pressure_offset=pressure_offset,
    )


def pressure_altitude_from_geopotential(
    geopotential: float, temperature_offset: float, pressure_offset: float
) -> float:
    """Invert the offset hydrostatic relation by Newton iteration."""
    sea_level = _sea_level_pressure_altitude(pressure_offset)
    pressure_altitude = geopotential + sea_level
    for _ in range(_NEWTON_ITERATIONS):
        residual = (
            geopotential_from_pressure_altitude(
                pressure_altitude, temperature_offset, pressure_offset
            )
            - geopotential
        )
        slope = 1.0 + temperature_offset / (T0 + BETA_T * pressure_altitude)
        step = residual / slope
        pressure_altitude -= step
        if abs(step) < _NEWTON_TOLERANCE:
            break
    return pressure_altitude


def insa_state_at_geopotential(
    geopotential: float, temperature_offset: float = 0.0, pressure_offset: float = 0.0
) -> AtmosphericState:
    """Return the atmospheric state at a geopotential altitude."""
    return insa_state(
        pressure_altitude_from_geopotential(
            geopotential, temperature_offset, pressure_offset
        ),
        temperature_offset,
        pressure_offset,
    )
