"""Scenario sampling and mission plans.

Scenario 1 is a long GNSS-denied flight to a recovery location with one
turn, one airspeed change and one altitude change under changing weather
and wind. Scenario 2 is a short sequence of eight turns under constant
weather and wind.

Draws within each sampler follow a fixed order; restricted parameters are
redrawn in place until their restriction holds. Turn and climb signs are
derived and consume no draws.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
import logging
import math

from .const import (
    CLIMB_PATH_DEG,
    GNSS_DENIED_TIME,
    SCENARIO_1,
    SCENARIO_1_END,
    SCENARIO_2,
    SCENARIO_2_END,
    TURN_BANK_DEG,
)
from .earth import GeodeticPosition
from .exceptions import PlanError
from .guidance import (
    AileronMode,
    ChannelSetpoint,
    ElevatorMode,
    GuidanceTarget,
    MissionPlan,
    RudderMode,
    ThrottleMode,
    Trigger,
    TriggerKind,
    validate_plan,
)
from .rotations import wrap_degrees
from .seedtree import StochasticSampler
from .wind import LinearRamp, WeatherProfile, WindProfile

_LOGGER = logging.getLogger(__name__)

AIRSPEED_MIN = 24.0
AIRSPEED_MAX = 34.0
SCENARIO_2_TURNS = 8


@dataclass(frozen=True)
class TerrainZone:
    """Initial coordinates (deg, deg, m) of a terrain zone and its declination (deg)."""

    code: str
    name: str
    longitude: float
    latitude: float
    ground_altitude: float
    declination: float

    def position(self, altitude: float) -> GeodeticPosition:
        """Return the zone origin at a geodetic altitude."""
        return GeodeticPosition(
            math.radians(wrap_degrees(self.longitude)), math.radians(self.latitude), altitude
        )


TERRAIN_ZONES: dict[str, TerrainZone] = {
    zone.code: zone
    for zone in (
        TerrainZone("DS", "desert", 248.001185, 32.157903, 661.0, 9.6),
        TerrainZone("FM", "farm", 272.122371, 38.865625, 144.0, -3.5),
        TerrainZone("FR", "forest", 287.490805, 43.354486, 200.0, -14.2),
        TerrainZone("MX", "mix", 270.984538, 34.720636, 133.0, -1.5),
        TerrainZone("PR", "prairie", 279.088834, 25.855172, 10.0, -7.0),
        TerrainZone("UR", "urban", 241.799731, 33.924426, 26.0, 11.8),
    )
}


@dataclass(frozen=True, kw_only=True)
class Scenario1Mission:
    """Mission parameters; speeds m/s, altitudes m, angles deg, times s."""

    airspeed_initial: float
    pressure_altitude_initial: float
    bearing_initial: float
    denied_time: float
    turn_time: float
    turn_bank: float
    bearing_final: float
    airspeed_interval: float
    airspeed_final: float
    altitude_interval: float
    climb_path_angle: float
    pressure_altitude_final: float
    end_time: float


@dataclass(frozen=True, kw_only=True)
class Scenario1Weather:
    """Weather and wind ramps; K, Pa, m/s, deg, s."""

    temperature_start: float
    temperature_end: float
    temperature_offset_initial: float
    temperature_offset_final: float
    pressure_start: float
    pressure_end: float
    pressure_offset_initial: float
    pressure_offset_final: float
    wind_start: float
    wind_end: float
    wind_speed_initial: float
    wind_speed_final: float
    wind_bearing_initial: float
    wind_bearing_final: float

    def weather_profile(self) -> WeatherProfile:
        """Return the temperature and pressure offset ramps."""
        return WeatherProfile(
            LinearRamp(
                self.temperature_start,
                self.temperature_end,
                self.temperature_offset_initial,
                self.temperature_offset_final,
            ),
            LinearRamp(
                self.pressure_start,
                self.pressure_end,
                self.pressure_offset_initial,
                self.pressure_offset_final,
            ),
        )

    def wind_profile(self) -> WindProfile:
        """Return the wind speed and bearing ramps."""
        return WindProfile(
            LinearRamp(
                self.wind_start, self.wind_end, self.wind_speed_initial, self.wind_speed_final
            ),
            LinearRamp(
                self.wind_start,
                self.wind_end,
                self.wind_bearing_initial,
                self.wind_bearing_final,
            ),
        )


@dataclass(frozen=True, kw_only=True)
class Scenario2Mission:
    """Mission parameters; bearings[0] is the initial bearing, bearings[8] the final one."""

    airspeed_initial: float
    pressure_altitude_initial: float
    bearings: tuple[float, ...]
    turn_banks: tuple[float, ...]
    denied_time: float
    turn_time: float
    turn_intervals: tuple[int, ...]
    end_time: float

    @property
    def bearing_initial(self) -> float:
        """Return the initial bearing."""
        return self.bearings[0]


@dataclass(frozen=True, kw_only=True)
class Scenario2Weather:
    """Constant temperature offset (K), pressure offset (Pa) and wind (m/s, deg)."""

    temperature_offset: float
    pressure_offset: float
    wind_speed: float
    wind_bearing: float

    def weather_profile(self) -> WeatherProfile:
        """Return constant offsets."""
        return WeatherProfile(
            LinearRamp.constant(self.temperature_offset),
            LinearRamp.constant(self.pressure_offset),
        )

    def wind_profile(self) -> WindProfile:
        """Return a constant wind."""
        return WindProfile(
            LinearRamp.constant(self.wind_speed), LinearRamp.constant(self.wind_bearing)
        )


@dataclass(frozen=True)
class Scenario:
    """Materialized scenario of one run."""

    number: int
    mission: Scenario1Mission | Scenario2Mission
    weather: Scenario1Weather | Scenario2Weather

    @property
    def end_time(self) -> float:
        """Return the final time."""
        return self.mission.end_time

    def as_dict(self) -> dict[str, float | int | str]:
        """Return a flat record for audit dumps."""
        record: dict[str, float | int | str] = {"scenario": self.number}
        for prefix, part in (("mission", self.mission), ("weather", self.weather)):
            for key, value in asdict(part).items():
                if isinstance(value, tuple):
                    value = " ".join(repr(item) for item in value)
                record[f"{prefix}.{key}"] = value
        return record


def _sign(value: float) -> float:
    return 1.0 if value >= 0.0 else -1.0


def _bearing_change(sampler: StochasticSampler, previous: float) -> int:
    return sampler.constrained(
        lambda s: s.discrete_uniform(-179, 180),
        lambda bearing: abs(wrap_degrees(bearing - previous)) > 10.0,
    )


def _initial_conditions(sampler: StochasticSampler) -> tuple[float, float, int]:
    airspeed = sampler.constrained(
        lambda s: s.normal(29.0, 1.5), lambda v: AIRSPEED_MIN < v < AIRSPEED_MAX
    )
    pressure_altitude = sampler.normal(2700.0, 200.0)
    bearing = sampler.discrete_uniform(-179, 180)
    return airspeed, pressure_altitude, bearing


def _turn_time(sampler: StochasticSampler, denied_time: float) -> float:
    return sampler.constrained(
        lambda s: denied_time + s.normal(30.0, 50.0), lambda t: t > denied_time + 15.0
    )


def sample_scenario1_mission(
    sampler: StochasticSampler, denied_time: float = GNSS_DENIED_TIME
) -> Scenario1Mission:
    """Draw the scenario 1 mission from the MISSION sampler."""
    airspeed, pressure_altitude, bearing = _initial_conditions(sampler)
    turn_time = _turn_time(sampler, denied_time)
    bearing_final = _bearing_change(sampler, bearing)
    airspeed_interval = sampler.constrained(
        lambda s: s.normal(500.0, 100.0), lambda dt: dt > 150.0
    )
    airspeed_final = sampler.constrained(
        lambda s: s.normal(airspeed, 1.5),
        lambda v: AIRSPEED_MIN < v < AIRSPEED_MAX and abs(v - airspeed) > 0.5,
    )
    altitude_interval = sampler.constrained(
        lambda s: s.normal(500.0, 100.0),
        lambda dt: dt > 150.0 and airspeed_interval + dt < 2500.0,
    )
    pressure_altitude_final = sampler.constrained(
        lambda s: s.normal(pressure_altitude, 300.0),
        lambda hp: abs(hp - pressure_altitude) > 100.0,
    )
    return Scenario1Mission(
        airspeed_initial=airspeed,
        pressure_altitude_initial=pressure_altitude,
        bearing_initial=float(bearing),
        denied_time=denied_time,
        turn_time=turn_time,
        turn_bank=_sign(wrap_degrees(bearing_final - bearing)) * TURN_BANK_DEG,
        bearing_final=float(bearing_final),
        airspeed_interval=airspeed_interval,
        airspeed_final=airspeed_final,
        altitude_interval=altitude_interval,
        climb_path_angle=_sign(pressure_altitude_final - pressure_altitude) * CLIMB_PATH_DEG,
        pressure_altitude_final=pressure_altitude_final,
        end_time=SCENARIO_1_END,
    )


def _ramp_times(sampler: StochasticSampler) -> tuple[float, float]:
    start = sampler.constrained(lambda s: s.normal(400.0, 600.0), lambda t: t > 50.0)
    end = sampler.constrained(
        lambda s: s.normal(start + 1200.0, 600.0), lambda t: t > start + 600.0
    )
    return start, end


def sample_scenario1_weather(
    weather: StochasticSampler,
    wind: StochasticSampler,
    wind_end_reference: str = "temperature",
) -> Scenario1Weather:
    """Draw the scenario 1 weather (WEATHER sampler) and wind (WIND sampler) ramps.

    The mean of the wind ramp end time is taken from the temperature ramp start
    by default; ``wind_end_reference="wind"`` takes it from the wind ramp start.
    """
    temperature_start, temperature_end = _ramp_times(weather)
    temperature_initial = weather.normal(0.0, 10.0)
    temperature_final = weather.normal(temperature_initial, 3.0)
    pressure_start, pressure_end = _ramp_times(weather)
    pressure_initial = weather.normal(0.0, 1500.0)
    pressure_final = weather.normal(pressure_initial, 300.0)

    wind_start = wind.constrained(lambda s: s.normal(400.0, 600.0), lambda t: t > 50.0)
    reference = temperature_start if wind_end_reference == "temperature" else wind_start
    wind_end = wind.constrained(
        lambda s: s.normal(reference + 1200.0, 600.0), lambda t: t > wind_start + 300.0
    )
    speed_initial = wind.normal(0.0, 7.0)
    speed_final = wind.normal(speed_initial, 3.0)
    bearing_initial = wind.discrete_uniform(-179, 180)
    bearing_final = wind.normal(bearing_initial, 15.0)
    return Scenario1Weather(
        temperature_start=temperature_start,
        temperature_end=temperature_end,
        temperature_offset_initial=temperature_initial,
        temperature_offset_final=temperature_final,
        pressure_start=pressure_start,
        pressure_end=pressure_end,
        pressure_offset_initial=pressure_initial,
        pressure_offset_final=pressure_final,
        wind_start=wind_start,
        wind_end=wind_end,
        wind_speed_initial=speed_initial,
        wind_speed_final=speed_final,
        wind_bearing_initial=float(bearing_initial),
        wind_bearing_final=bearing_final,
    )


def sample_scenario2_mission(
    sampler: StochasticSampler, denied_time: float = GNSS_DENIED_TIME
) -> Scenario2Mission:
    """Draw the scenario 2 mission; the first three draws match scenario 1."""
    airspeed, pressure_altitude, bearing = _initial_conditions(sampler)
    bearings = [bearing]
    for _ in range(SCENARIO_2_TURNS):
        bearings.append(_bearing_change(sampler, bearings[-1]))
    turn_time = _turn_time(sampler, denied_time)
    intervals = tuple(sampler.discrete_uniform(10, 50) for _ in range(SCENARIO_2_TURNS - 1))
    banks = tuple(
        _sign(wrap_degrees(bearings[i] - bearings[i - 1])) * TURN_BANK_DEG
        for i in range(1, SCENARIO_2_TURNS + 1)
    )
    return Scenario2Mission(
        airspeed_initial=airspeed,
        pressure_altitude_initial=pressure_altitude,
        bearings=tuple(float(b) for b in bearings),
        turn_banks=banks,
        denied_time=denied_time,
        turn_time=turn_time,
        turn_intervals=intervals,
        end_time=SCENARIO_2_END,
    )


def sample_scenario2_weather(
    weather: StochasticSampler, wind: StochasticSampler
) -> Scenario2Weather:
    """Return the constant weather and wind: the initial values of scenario 1."""
    full = sample_scenario1_weather(weather, wind)
    return Scenario2Weather(
        temperature_offset=full.temperature_offset_initial,
        pressure_offset=full.pressure_offset_initial,
        wind_speed=full.wind_speed_initial,
        wind_bearing=full.wind_bearing_initial,
    )


def sample_scenario(
    number: int,
    mission: StochasticSampler,
    weather: StochasticSampler,
    wind: StochasticSampler,
    wind_end_reference: str = "temperature",
    denied_time: float = GNSS_DENIED_TIME,
) -> Scenario:
    """Draw a complete scenario."""
    if number == SCENARIO_1:
        return Scenario(
            SCENARIO_1,
            sample_scenario1_mission(mission, denied_time),
            sample_scenario1_weather(weather, wind, wind_end_reference),
        )
    if number == SCENARIO_2:
        return Scenario(
            SCENARIO_2,
            sample_scenario2_mission(mission, denied_time),
            sample_scenario2_weather(weather, wind),
        )
    raise PlanError(f"Unknown scenario: {number}")


def _target(
    airspeed: float,
    elevator: ChannelSetpoint[ElevatorMode],
    aileron: ChannelSetpoint[AileronMode],
    trigger: Trigger,
) -> GuidanceTarget:
    return GuidanceTarget(
        throttle=ChannelSetpoint(ThrottleMode.AIRSPEED, airspeed),
        elevator=elevator,
        aileron=aileron,
        rudder=ChannelSetpoint(RudderMode.SIDESLIP, 0.0),
        trigger=trigger,
    )


def _altitude(value: float) -> ChannelSetpoint[ElevatorMode]:
    return ChannelSetpoint(ElevatorMode.PRESSURE_ALTITUDE, value)


def _bearing(degrees: float) -> ChannelSetpoint[AileronMode]:
    return ChannelSetpoint(AileronMode.BEARING, math.radians(degrees))


def _bank(degrees: float) -> ChannelSetpoint[AileronMode]:
    return ChannelSetpoint(AileronMode.BANK, math.radians(degrees))


def _capture(bearing: float, bank: float) -> Trigger:
    return Trigger(TriggerKind.BEARING_CAPTURE, math.radians(bearing), _sign(bank))


def _scenario1_plan(mission: Scenario1Mission) -> MissionPlan:
    m = mission
    return (
        _target(
            m.airspeed_initial,
            _altitude(m.pressure_altitude_initial),
            _bearing(m.bearing_initial),
            Trigger(TriggerKind.ABSOLUTE_TIME, m.turn_time),
        ),
        _target(
            m.airspeed_initial,
            _altitude(m.pressure_altitude_initial),
            _bank(m.turn_bank),
            _capture(m.bearing_final, m.turn_bank),
        ),
        _target(
            m.airspeed_initial,
            _altitude(m.pressure_altitude_initial),
            _bearing(m.bearing_final),
            Trigger(TriggerKind.ELAPSED_TIME, m.airspeed_interval),
        ),
        _target(
            m.airspeed_final,
            _altitude(m.pressure_altitude_initial),
            _bearing(m.bearing_final),
            Trigger(TriggerKind.ELAPSED_TIME, m.altitude_interval),
        ),
        _target(
            m.airspeed_final,
            ChannelSetpoint(ElevatorMode.PATH_ANGLE, math.radians(m.climb_path_angle)),
            _bearing(m.bearing_final),
            Trigger(
                TriggerKind.ALTITUDE_CAPTURE,
                m.pressure_altitude_final,
                _sign(m.climb_path_angle),
            ),
        ),
        _target(
            m.airspeed_final,
            _altitude(m.pressure_altitude_final),
            _bearing(m.bearing_final),
            Trigger(TriggerKind.ABSOLUTE_TIME, m.end_time),
        ),
    )


def _scenario2_plan(mission: Scenario2Mission) -> MissionPlan:
    m = mission
    altitude = _altitude(m.pressure_altitude_initial)
    targets = [
        _target(
            m.airspeed_initial,
            altitude,
            _bearing(m.bearings[0]),
            Trigger(TriggerKind.ABSOLUTE_TIME, m.turn_time),
        )
    ]
    for turn in range(1, SCENARIO_2_TURNS + 1):
        bank = m.turn_banks[turn - 1]
        targets.append(
            _target(
                m.airspeed_initial,
                altitude,
                _bank(bank),
                _capture(m.bearings[turn], bank),
            )
        )
        if turn < SCENARIO_2_TURNS:
            trigger = Trigger(TriggerKind.ELAPSED_TIME, float(m.turn_intervals[turn - 1]))
        else:
            trigger = Trigger(TriggerKind.ABSOLUTE_TIME, m.end_time)
        targets.append(
            _target(m.airspeed_initial, altitude, _bearing(m.bearings[turn]), trigger)
        )
    return tuple(targets)


def build_mission_plan(scenario: Scenario) -> MissionPlan:
    """Translate a materialized scenario into guidance targets."""
    if isinstance(scenario.mission, Scenario1Mission):
        plan = _scenario1_plan(scenario.mission)
    else:
        plan = _scenario2_plan(scenario.mission)
    _LOGGER.debug("Scenario %d plan has %d targets", scenario.number, len(plan))
    return validate_plan(plan)
