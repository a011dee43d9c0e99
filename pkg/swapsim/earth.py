"""Ellipsoid geodesy, normal gravity and magnetic field models."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import logging
import math

import numpy as np

from .const import (
    EARTH_RADIUS_MEAN,
    GAMMA_EQUATOR,
    GAMMA_POLE,
    WGS84_A,
    WGS84_B,
    WGS84_E2,
    WGS84_F,
    WGS84_GM,
    WGS84_OMEGA,
)
from .seedtree import StochasticSampler

_LOGGER = logging.getLogger(__name__)

_SOMIGLIANA_K = WGS84_B * GAMMA_POLE / (WGS84_A * GAMMA_EQUATOR) - 1.0
_GRAVITY_M = WGS84_OMEGA**2 * WGS84_A**2 * WGS84_B / WGS84_GM

# Centred dipole approximation of the geomagnetic field.
DIPOLE_POLE_LATITUDE = math.radians(80.65)
DIPOLE_POLE_LONGITUDE = math.radians(-72.68)
DIPOLE_STRENGTH = 29805.0


@dataclass(frozen=True)
class GeodeticPosition:
    """Longitude and latitude in radians, geodetic altitude in meters."""

    longitude: float
    latitude: float
    altitude: float


def radii_of_curvature(latitude: float) -> tuple[float, float]:
    """Return the meridian and prime-vertical radii of curvature."""
    sin_lat = math.sin(latitude)
    denominator = 1.0 - WGS84_E2 * sin_lat * sin_lat
    prime_vertical = WGS84_A / math.sqrt(denominator)
    meridian = WGS84_A * (1.0 - WGS84_E2) / (denominator * math.sqrt(denominator))
    return meridian, prime_vertical


def normal_gravity(latitude: float, altitude: float) -> tuple[float, np.ndarray]:
    """Return the normal gravity magnitude and its NED vector.

    The surface value is the Somigliana closed form; the altitude correction
    is the second-order WGS84 series.
    """
    sin2 = math.sin(latitude) ** 2
    surface = (
        GAMMA_EQUATOR * (1.0 + _SOMIGLIANA_K * sin2) / math.sqrt(1.0 - WGS84_E2 * sin2)
    )
    correction = (
        1.0
        - 2.0 / WGS84_A * (1.0 + WGS84_F + _GRAVITY_M - 2.0 * WGS84_F * sin2) * altitude
        + 3.0 * altitude * altitude / (WGS84_A * WGS84_A)
    )
    magnitude = surface * correction
    return magnitude, np.array([0.0, 0.0, magnitude])


def geopotential_from_geodetic(altitude: float) -> float:
    """Return the geopotential altitude of a geodetic altitude."""
    return EARTH_RADIUS_MEAN * altitude / (EARTH_RADIUS_MEAN + altitude)


def geodetic_from_geopotential(geopotential: float) -> float:
    """Return the geodetic altitude of a geopotential altitude."""
    return EARTH_RADIUS_MEAN * geopotential / (EARTH_RADIUS_MEAN - geopotential)


def earth_rate_ned(latitude: float) -> np.ndarray:
    """Return the Earth rotation rate resolved in NED."""
    return np.array(
        [WGS84_OMEGA * math.cos(latitude), 0.0, -WGS84_OMEGA * math.sin(latitude)]
    )


def transport_rate_ned(latitude: float, altitude: float, velocity: np.ndarray) -> np.ndarray:
    """Return the rotation rate of NED relative to the Earth."""
    meridian, prime_vertical = radii_of_curvature(latitude)
    return np.array(
        [
            velocity[1] / (prime_vertical + altitude),
            -velocity[0] / (meridian + altitude),
            -velocity[1] * math.tan(latitude) / (prime_vertical + altitude),
        ]
    )


def geodetic_rates(
    latitude: float, altitude: float, velocity: np.ndarray
) -> tuple[float, float, float]:
    """Return (λ̇, φ̇, ḣ) for an Earth-relative NED velocity."""
    meridian, prime_vertical = radii_of_curvature(latitude)
    return (
        velocity[1] / ((prime_vertical + altitude) * math.cos(latitude)),
        velocity[0] / (meridian + altitude),
        -velocity[2],
    )


def geodetic_to_ecef(longitude: float, latitude: float, altitude: float) -> np.ndarray:
    """Return Earth-centred Earth-fixed coordinates."""
    _, prime_vertical = radii_of_curvature(latitude)
    cos_lat = math.cos(latitude)
    return np.array(
        [
            (prime_vertical + altitude) * cos_lat * math.cos(longitude),
            (prime_vertical + altitude) * cos_lat * math.sin(longitude),
            (prime_vertical * (1.0 - WGS84_E2) + altitude) * math.sin(latitude),
        ]
    )


def ecef_to_ned_matrix(longitude: float, latitude: float) -> np.ndarray:
    """Return the matrix taking ECEF vectors into local NED."""
    sin_lat, cos_lat = math.sin(latitude), math.cos(latitude)
    sin_lon, cos_lon = math.sin(longitude), math.cos(longitude)
    return np.array(
        [
            [-sin_lat * cos_lon, -sin_lat * sin_lon, cos_lat],
            [-sin_lon, cos_lon, 0.0],
            [-cos_lat * cos_lon, -cos_lat * sin_lon, -sin_lat],
        ]
    )


def local_offset(
    origin: GeodeticPosition, longitude: float, latitude: float
) -> tuple[float, float]:
    """Return the local north and east offsets of a point from an origin."""
    meridian, prime_vertical = radii_of_curvature(origin.latitude)
    delta_lon = math.remainder(longitude - origin.longitude, 2.0 * math.pi)
    north = (latitude - origin.latitude) * (meridian + origin.altitude)
    east = delta_lon * (prime_vertical + origin.altitude) * math.cos(origin.latitude)
    return north, east


def _dipole_field_ned(longitude: float, latitude: float, altitude: float) -> np.ndarray:
    """Return the centred-dipole field in NED, nT."""
    position = geodetic_to_ecef(longitude, latitude, altitude)
    radius = float(np.linalg.norm(position))
    unit = position / radius
    cos_pole = math.cos(DIPOLE_POLE_LATITUDE)
    moment = -np.array(
        [
            cos_pole * math.cos(DIPOLE_POLE_LONGITUDE),
            cos_pole * math.sin(DIPOLE_POLE_LONGITUDE),
            math.sin(DIPOLE_POLE_LATITUDE),
        ]
    )
    scale = DIPOLE_STRENGTH * (WGS84_A / radius) ** 3
    field_ecef = scale * (3.0 * float(moment @ unit) * unit - moment)
    return ecef_to_ned_matrix(longitude, latitude) @ field_ecef


class MagneticModel:
    """Tilted dipole with a constant declination correction.

    The correction rotates the horizontal field so that the declination at
    the reference point equals ``declination``.
    """

    def __init__(
        self, reference: GeodeticPosition | None = None, declination: float | None = None
    ) -> None:
        """Initialize the model, optionally anchored to a reference declination."""
        self.correction = 0.0
        if reference is not None and declination is not None:
            dipole = _dipole_field_ned(
                reference.longitude, reference.latitude, reference.altitude
            )
            self.correction = declination - math.atan2(dipole[1], dipole[0])
            _LOGGER.debug(
                "Declination correction %.3f deg", math.degrees(self.correction)
            )
        self._cos = math.cos(self.correction)
        self._sin = math.sin(self.correction)

    def field_ned(self, longitude: float, latitude: float, altitude: float) -> np.ndarray:
        """Return the magnetic field in NED, nT."""
        north, east, down = _dipole_field_ned(longitude, latitude, altitude)
        return np.array(
            [
                north * self._cos - east * self._sin,
                north * self._sin + east * self._cos,
                down,
            ]
        )


@dataclass(frozen=True)
class GeoPerturbation:
    """Truth-side additive biases on gravity (m/s²) and magnetic field (nT), NED."""

    gravity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    magnetic: np.ndarray = field(default_factory=lambda: np.zeros(3))


def apply_geo_perturbation(
    sampler: StochasticSampler,
    gravity_std_horizontal: float,
    gravity_std_vertical: float,
    magnetic_std: tuple[float, float, float],
) -> GeoPerturbation:
    """Draw the truth-versus-onboard gravity and magnetic biases."""
    gravity_std = np.array(
        [gravity_std_horizontal, gravity_std_horizontal, gravity_std_vertical]
    )
    gravity = gravity_std * sampler.standard_normal(3)
    magnetic = np.asarray(magnetic_std, dtype=float) * sampler.standard_normal(3)
    return GeoPerturbation(gravity=gravity, magnetic=magnetic)


@dataclass(frozen=True)
class EarthModel:
    """Gravity and magnetic models, optionally perturbed for the truth side."""

    magnetic_model: MagneticModel = field(default_factory=MagneticModel)
    perturbation: GeoPerturbation = field(default_factory=GeoPerturbation)

    def gravity(self, latitude: float, altitude: float) -> np.ndarray:
        """Return the gravity vector in NED, m/s²."""
        _, vector = normal_gravity(latitude, altitude)
        return vector + self.perturbation.gravity

    def magnetic_field(self, position: GeodeticPosition) -> np.ndarray:
        """Return the magnetic field in NED, nT."""
        return (
            self.magnetic_model.field_ned(
                position.longitude, position.latitude, position.altitude
            )
            + self.perturbation.magnetic
        )

    def onboard(self) -> EarthModel:
        """Return the unperturbed model used by the navigation side."""
        return replace(self, perturbation=GeoPerturbation())
