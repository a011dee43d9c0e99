"""Tests for wind, weather ramps and Dryden turbulence."""

import numpy as np
import pytest

from swapsim.const import FT_TO_M
from swapsim.seedtree import StochasticSampler
from swapsim.wind import (
    DrydenTurbulence,
    LinearRamp,
    WeatherProfile,
    WindProfile,
    WindState,
    dryden_parameters,
    dryden_step,
    wind_lowfreq,
)


def test_linear_ramp():
    """Test a ramp holds its end values and interpolates in between."""
    ramp = LinearRamp(10.0, 20.0, 1.0, 3.0)

    assert ramp.value(0.0) == 1.0
    assert ramp.value(15.0) == pytest.approx(2.0)
    assert ramp.value(25.0) == 3.0
    assert LinearRamp.constant(4.0).value(100.0) == 4.0


def test_wind_bearing_is_direction_of_motion():
    """Test the wind bearing points where the air mass goes."""
    east = WindProfile(LinearRamp.constant(10.0), LinearRamp.constant(90.0))
    reversed_north = WindProfile(LinearRamp.constant(-5.0), LinearRamp.constant(0.0))

    np.testing.assert_allclose(wind_lowfreq(0.0, east), [0.0, 10.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(reversed_north.velocity_ned(0.0), [-5.0, 0.0, 0.0])
    np.testing.assert_array_equal(WindProfile.calm().velocity_ned(3.0), np.zeros(3))


def test_weather_offsets():
    """Test weather offsets follow their ramps."""
    weather = WeatherProfile(LinearRamp(0.0, 100.0, 0.0, 10.0), LinearRamp.constant(-200.0))

    assert weather.offsets(50.0) == pytest.approx((5.0, -200.0))
    assert WeatherProfile.standard().offsets(10.0) == (0.0, 0.0)


def test_dryden_high_altitude_parameters():
    """Test the medium/high-altitude parameters above 2000 ft."""
    parameters = dryden_parameters(1000.0, "moderate")

    assert parameters.sigma == (2.0, 2.0, 2.0)
    assert parameters.scale_length == pytest.approx((1750.0 * FT_TO_M,) * 3)


def test_dryden_low_altitude_parameters():
    """Test the low-altitude vertical intensity and scale length."""
    parameters = dryden_parameters(500.0 * FT_TO_M, "light")

    assert parameters.sigma[2] == pytest.approx(0.772)
    assert parameters.scale_length[2] == pytest.approx(500.0 * FT_TO_M)
    assert parameters.sigma[0] > parameters.sigma[2]


def test_dryden_blend_is_continuous():
    """Test the blended region joins both forms."""
    low = dryden_parameters(1000.0 * FT_TO_M, "severe")
    blended = dryden_parameters(1000.0 * FT_TO_M + 1e-6, "severe")
    high = dryden_parameters(2000.0 * FT_TO_M, "severe")

    assert blended.sigma == pytest.approx(low.sigma, rel=1e-6)
    assert high.sigma == (3.5, 3.5, 3.5)


def test_no_turbulence_keeps_draw_count():
    """Test the driving sequence does not depend on severity."""
    calm = StochasticSampler(8)
    rough = StochasticSampler(8)
    calm_state = WindState()
    rough_state = WindState()
    for _ in range(10):
        calm_state = dryden_step(calm_state, 0.01, 30.0, 800.0, calm, "none")
        rough_state = dryden_step(rough_state, 0.01, 30.0, 800.0, rough, "severe")

    np.testing.assert_array_equal(calm_state.turbulence, np.zeros(3))
    assert np.any(rough_state.turbulence != 0.0)
    assert calm.normal(0.0, 1.0) == rough.normal(0.0, 1.0)


def test_dryden_stationary_variance():
    """Test the filters reproduce the specified intensities."""
    turbulence = DrydenTurbulence(StochasticSampler(21), "light")
    samples = np.array([turbulence.step(0.1, 200.0, 2000.0).copy() for _ in range(20000)])

    np.testing.assert_allclose(samples[2000:].std(axis=0), [1.0, 1.0, 1.0], rtol=0.2)
    assert abs(samples[2000:].mean()) < 0.2


def test_turbulence_state_copy():
    """Test copying a filter state decouples it."""
    state = WindState()
    copy = state.copy()
    copy.lateral[0] = 1.0

    assert state.lateral[0] == 0.0
