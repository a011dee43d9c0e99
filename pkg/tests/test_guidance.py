"""Tests for guidance triggers and the target pipeline."""

import math

import numpy as np
import pytest

from swapsim.earth import GeodeticPosition
from swapsim.exceptions import PlanError
from swapsim.guidance import (
    AileronMode,
    ChannelSetpoint,
    ElevatorMode,
    Guidance,
    GuidanceTarget,
    RudderMode,
    ThrottleMode,
    Trigger,
    TriggerKind,
    evaluate_trigger,
    validate_plan,
)
from swapsim.navigation import EstimatedState
from swapsim.rotations import euler_to_quat


def _estimate(bearing_deg: float = 0.0, pressure_altitude: float = 1000.0) -> EstimatedState:
    bearing = math.radians(bearing_deg)
    return EstimatedState(
        t=0.0,
        position=GeodeticPosition(0.0, 0.0, 1000.0),
        velocity_ned=np.array([28.0 * math.cos(bearing), 28.0 * math.sin(bearing), 0.0]),
        attitude=euler_to_quat(bearing, 0.0, 0.0),
        angular_rate=np.zeros(3),
        airspeed=28.0,
        alpha=0.0,
        beta=0.0,
        pressure_altitude=pressure_altitude,
        temperature=280.0,
    )


def _target(trigger: Trigger) -> GuidanceTarget:
    return GuidanceTarget(
        ChannelSetpoint(ThrottleMode.AIRSPEED, 28.0),
        ChannelSetpoint(ElevatorMode.PRESSURE_ALTITUDE, 1000.0),
        ChannelSetpoint(AileronMode.BEARING, 0.0),
        ChannelSetpoint(RudderMode.SIDESLIP, 0.0),
        trigger,
    )


def test_time_triggers():
    """Test absolute and elapsed time triggers."""
    absolute = Trigger(TriggerKind.ABSOLUTE_TIME, 100.0)
    elapsed = Trigger(TriggerKind.ELAPSED_TIME, 30.0)

    assert evaluate_trigger(absolute, _estimate(), 99.0, 0.0) < 0.0
    assert evaluate_trigger(absolute, _estimate(), 100.0, 0.0) == 0.0
    assert evaluate_trigger(elapsed, _estimate(), 140.0, 100.0) > 0.0
    assert evaluate_trigger(elapsed, _estimate(), 120.0, 100.0) < 0.0


@pytest.mark.parametrize(
    ("target", "direction", "before", "after"),
    [
        (90.0, 1.0, 80.0, 90.5),
        (0.0, -1.0, 10.0, -1.0),
        (180.0, 1.0, 179.0, -179.0),
        (-170.0, -1.0, -160.0, 175.0),
    ],
)
def test_bearing_capture(target, direction, before, after):
    """Test bearing capture in the turn direction, across the ±180 seam too."""
    trigger = Trigger(TriggerKind.BEARING_CAPTURE, math.radians(target), direction)

    assert evaluate_trigger(trigger, _estimate(before), 0.0, 0.0) < 0.0
    assert evaluate_trigger(trigger, _estimate(after), 0.0, 0.0) > 0.0


def test_altitude_capture():
    """Test altitude capture on climb and descent."""
    climb = Trigger(TriggerKind.ALTITUDE_CAPTURE, 1200.0, 1.0)
    descent = Trigger(TriggerKind.ALTITUDE_CAPTURE, 800.0, -1.0)

    assert evaluate_trigger(climb, _estimate(pressure_altitude=1100.0), 0.0, 0.0) < 0.0
    assert evaluate_trigger(climb, _estimate(pressure_altitude=1200.0), 0.0, 0.0) == 0.0
    assert evaluate_trigger(descent, _estimate(pressure_altitude=900.0), 0.0, 0.0) < 0.0
    assert evaluate_trigger(descent, _estimate(pressure_altitude=790.0), 0.0, 0.0) > 0.0


def test_pipeline_skips_satisfied_targets_and_holds_last():
    """Test one step passes every satisfied trigger and the last target is held."""
    plan = (
        _target(Trigger(TriggerKind.ABSOLUTE_TIME, 10.0)),
        _target(Trigger(TriggerKind.ELAPSED_TIME, 0.0)),
        _target(Trigger(TriggerKind.ABSOLUTE_TIME, 50.0)),
        _target(Trigger(TriggerKind.ABSOLUTE_TIME, 60.0)),
    )
    guidance = Guidance(plan)

    assert guidance.step(_estimate(), 5.0) is plan[0]
    assert guidance.step(_estimate(), 10.0) is plan[2]
    assert guidance.activation_time == 10.0
    assert guidance.step(_estimate(), 100.0) is plan[3]
    assert guidance.finished
    assert guidance.step(_estimate(), 1000.0) is plan[3]


def test_empty_plan():
    """Test a plan without targets is rejected."""
    with pytest.raises(PlanError):
        Guidance(())


def test_malformed_trigger():
    """Test bad trigger directions and values are rejected."""
    with pytest.raises(PlanError):
        validate_plan((_target(Trigger(TriggerKind.BEARING_CAPTURE, 0.0, 0.5)),))
    with pytest.raises(PlanError):
        validate_plan((_target(Trigger(TriggerKind.ABSOLUTE_TIME, math.nan)),))
