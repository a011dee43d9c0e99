"""Tests for scenario sampling and mission plans."""

import math

import numpy as np
import pytest

from swapsim.const import GNSS_DENIED_TIME, SCENARIO_1_END, SCENARIO_2_END
from swapsim.exceptions import PlanError
from swapsim.guidance import AileronMode, ElevatorMode, TriggerKind
from swapsim.rotations import wrap_degrees
from swapsim.scenarios import (
    AIRSPEED_MAX,
    AIRSPEED_MIN,
    TERRAIN_ZONES,
    build_mission_plan,
    sample_scenario,
    sample_scenario1_mission,
    sample_scenario1_weather,
    sample_scenario2_mission,
)
from swapsim.seedtree import StochasticSampler

DRAWS = 10_000
ORACLE_DRAWS = 1_000_000
MOMENT_DRAWS = 20_000


def _scenario(number: int, seed: int, **kwargs):
    return sample_scenario(
        number,
        StochasticSampler(seed),
        StochasticSampler(seed + 100_000),
        StochasticSampler(seed + 200_000),
        **kwargs,
    )


def test_scenario1_restrictions():
    """Test every restricted scenario 1 mission parameter stays in range."""
    for seed in range(DRAWS):
        m = sample_scenario1_mission(StochasticSampler(seed))

        assert AIRSPEED_MIN < m.airspeed_initial < AIRSPEED_MAX
        assert AIRSPEED_MIN < m.airspeed_final < AIRSPEED_MAX
        assert abs(m.airspeed_final - m.airspeed_initial) > 0.5
        assert m.turn_time > GNSS_DENIED_TIME + 15.0
        assert abs(wrap_degrees(m.bearing_final - m.bearing_initial)) > 10.0
        assert m.airspeed_interval > 150.0
        assert m.altitude_interval > 150.0
        assert m.airspeed_interval + m.altitude_interval < 2500.0
        assert abs(m.pressure_altitude_final - m.pressure_altitude_initial) > 100.0
        assert m.bearing_initial == int(m.bearing_initial)
        assert -179 <= m.bearing_initial <= 180
        assert math.copysign(1.0, m.turn_bank) == math.copysign(
            1.0, wrap_degrees(m.bearing_final - m.bearing_initial)
        )
        assert math.copysign(1.0, m.climb_path_angle) == math.copysign(
            1.0, m.pressure_altitude_final - m.pressure_altitude_initial
        )
        assert abs(m.turn_bank) == 10.0
        assert abs(m.climb_path_angle) == 2.0
        assert m.end_time == SCENARIO_1_END


def test_scenario1_weather_restrictions():
    """Test the weather and wind ramp times respect their restrictions."""
    for seed in range(DRAWS):
        w = sample_scenario1_weather(StochasticSampler(seed), StochasticSampler(seed + 1))

        assert w.temperature_start > 50.0
        assert w.temperature_end > w.temperature_start + 600.0
        assert w.pressure_start > 50.0
        assert w.pressure_end > w.pressure_start + 600.0
        assert w.wind_start > 50.0
        assert w.wind_end > w.wind_start + 300.0


def test_wind_end_reference():
    """Test the wind end reference changes only the wind end time."""
    by_temperature = sample_scenario1_weather(StochasticSampler(4), StochasticSampler(5))
    by_wind = sample_scenario1_weather(StochasticSampler(4), StochasticSampler(5), "wind")

    assert by_temperature.temperature_start == by_wind.temperature_start
    assert by_temperature.wind_start == by_wind.wind_start
    assert by_temperature.wind_end != by_wind.wind_end


def test_scenario2_restrictions():
    """Test every scenario 2 turn changes bearing and has a bounded interval."""
    for seed in range(DRAWS):
        m = sample_scenario2_mission(StochasticSampler(seed))

        assert len(m.bearings) == 9
        assert len(m.turn_banks) == 8
        assert len(m.turn_intervals) == 7
        assert all(10 <= interval <= 50 for interval in m.turn_intervals)
        for previous, bearing in zip(m.bearings, m.bearings[1:], strict=False):
            assert abs(wrap_degrees(bearing - previous)) > 10.0
        assert m.turn_time > GNSS_DENIED_TIME + 15.0
        assert m.end_time == SCENARIO_2_END


def test_scenarios_share_initial_conditions():
    """Test both scenarios draw the same initial conditions from one seed."""
    first = sample_scenario1_mission(StochasticSampler(77))
    second = sample_scenario2_mission(StochasticSampler(77))

    assert second.airspeed_initial == first.airspeed_initial
    assert second.pressure_altitude_initial == first.pressure_altitude_initial
    assert second.bearing_initial == first.bearing_initial


def test_scenario2_weather_is_scenario1_initial():
    """Test scenario 2 holds the initial scenario 1 weather and wind."""
    first = _scenario(1, 12)
    second = _scenario(2, 12)

    assert second.weather.temperature_offset == first.weather.temperature_offset_initial
    assert second.weather.pressure_offset == first.weather.pressure_offset_initial
    assert second.weather.wind_speed == first.weather.wind_speed_initial
    assert second.weather.wind_bearing == first.weather.wind_bearing_initial
    assert second.weather.wind_profile().velocity_ned(300.0)[2] == 0.0


def test_scenario_reproducible():
    """Test the same samplers produce the same scenario."""
    assert _scenario(1, 3) == _scenario(1, 3)
    assert _scenario(1, 3) != _scenario(1, 4)


def test_denied_time_moves_turn():
    """Test the first turn follows the GNSS denial time."""
    scenario = _scenario(1, 3, denied_time=250.0)

    assert scenario.mission.denied_time == 250.0
    assert scenario.mission.turn_time > 265.0


def test_unknown_scenario():
    """Test only scenarios 1 and 2 exist."""
    with pytest.raises(PlanError):
        _scenario(3, 1)


def test_scenario1_plan():
    """Test the scenario 1 plan: hold, turn, hold, speed change, climb, hold."""
    scenario = _scenario(1, 8)
    plan = build_mission_plan(scenario)
    m = scenario.mission

    assert len(plan) == 6
    assert [target.trigger.kind for target in plan] == [
        TriggerKind.ABSOLUTE_TIME,
        TriggerKind.BEARING_CAPTURE,
        TriggerKind.ELAPSED_TIME,
        TriggerKind.ELAPSED_TIME,
        TriggerKind.ALTITUDE_CAPTURE,
        TriggerKind.ABSOLUTE_TIME,
    ]
    assert plan[1].aileron.mode == AileronMode.BANK
    assert plan[1].aileron.value == pytest.approx(math.radians(m.turn_bank))
    assert plan[1].trigger.value == pytest.approx(math.radians(m.bearing_final))
    assert plan[3].throttle.value == m.airspeed_final
    assert plan[4].elevator.mode == ElevatorMode.PATH_ANGLE
    assert plan[4].trigger.value == m.pressure_altitude_final
    assert plan[5].trigger.value == SCENARIO_1_END


def test_scenario2_plan():
    """Test the scenario 2 plan alternates turns and straight legs."""
    scenario = _scenario(2, 8)
    plan = build_mission_plan(scenario)
    m = scenario.mission

    assert len(plan) == 17
    assert [target.aileron.mode for target in plan[1::2]] == [AileronMode.BANK] * 8
    assert [target.aileron.mode for target in plan[2::2]] == [AileronMode.BEARING] * 8
    assert [target.trigger.value for target in plan[2:-1:2]] == [
        float(interval) for interval in m.turn_intervals
    ]
    assert plan[-1].trigger.kind == TriggerKind.ABSOLUTE_TIME


def test_terrain_zones():
    """Test the six zones and their longitudes in the principal range."""
    assert sorted(TERRAIN_ZONES) == ["DS", "FM", "FR", "MX", "PR", "UR"]

    position = TERRAIN_ZONES["DS"].position(1000.0)
    assert math.degrees(position.longitude) == pytest.approx(248.001185 - 360.0)
    assert position.altitude == 1000.0


def test_scenario_record():
    """Test the audit record flattens the scenario parameters."""
    record = _scenario(2, 5).as_dict()

    assert record["scenario"] == 2
    assert len(record["mission.bearings"].split()) == 9
    assert "weather.wind_speed" in record


def _truncated_normal(rng, mean, std, lower=-math.inf, upper=math.inf):
    """Draw N(mean, std²) restricted to (lower, upper) by brute-force rejection."""
    mean = np.broadcast_to(np.asarray(mean, dtype=float), (ORACLE_DRAWS,))
    lower = np.broadcast_to(np.asarray(lower, dtype=float), (ORACLE_DRAWS,))
    values = np.empty(ORACLE_DRAWS)
    pending = np.arange(ORACLE_DRAWS)
    while pending.size:
        draws = rng.normal(mean[pending], std)
        accepted = (draws > lower[pending]) & (draws < upper)
        values[pending[accepted]] = draws[accepted]
        pending = pending[~accepted]
    return values


def _assert_moments(samples, oracle):
    samples = np.asarray(samples)
    assert samples.mean() == pytest.approx(oracle.mean(), rel=0.02)
    assert samples.std() == pytest.approx(oracle.std(), rel=0.02)


def test_truncated_mission_moments():
    """Test restricted mission draws match a brute-force truncated distribution."""
    rng = np.random.default_rng(2024)
    sampler = StochasticSampler(31)
    missions = [sample_scenario1_mission(sampler) for _ in range(MOMENT_DRAWS)]

    _assert_moments(
        [m.airspeed_initial for m in missions],
        _truncated_normal(rng, 29.0, 1.5, AIRSPEED_MIN, AIRSPEED_MAX),
    )
    _assert_moments(
        [m.turn_time - GNSS_DENIED_TIME for m in missions],
        _truncated_normal(rng, 30.0, 50.0, lower=15.0),
    )
    _assert_moments(
        [m.airspeed_interval for m in missions],
        _truncated_normal(rng, 500.0, 100.0, lower=150.0),
    )


def test_truncated_weather_moments():
    """Test restricted ramp times match a brute-force truncated distribution."""
    rng = np.random.default_rng(2025)
    weather, wind = StochasticSampler(41), StochasticSampler(42)
    draws = [sample_scenario1_weather(weather, wind) for _ in range(MOMENT_DRAWS)]
    start = _truncated_normal(rng, 400.0, 600.0, lower=50.0)

    _assert_moments([w.temperature_start for w in draws], start)
    _assert_moments([w.pressure_start for w in draws], start)
    _assert_moments([w.wind_start for w in draws], start)
    _assert_moments(
        [w.temperature_end - w.temperature_start for w in draws],
        _truncated_normal(rng, 1200.0, 600.0, lower=600.0),
    )
    end = _truncated_normal(rng, start + 1200.0, 600.0, lower=start + 600.0)
    _assert_moments([w.pressure_end for w in draws], end)
