"""Guidance targets, triggers and the target pipeline.

A mission plan is an ordered list of targets. Each target holds one setpoint
per control channel and a trigger; when the trigger evaluates to a
non-negative value the next target becomes active. Triggers only ever see the
estimated trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
import logging
import math

import voluptuous as vol

from .exceptions import PlanError
from .navigation import EstimatedState
from .rotations import wrap_angle

_LOGGER = logging.getLogger(__name__)


class TriggerKind(StrEnum):
    """Trigger kinds."""

    ABSOLUTE_TIME = "absolute_time"
    ELAPSED_TIME = "elapsed_time"
    BEARING_CAPTURE = "bearing_capture"
    ALTITUDE_CAPTURE = "altitude_capture"


class ThrottleMode(StrEnum):
    """Setpoint kinds of the throttle channel."""

    AIRSPEED = "airspeed"
    NONE = "none"


class ElevatorMode(StrEnum):
    """Setpoint kinds of the elevator channel."""

    PITCH = "pitch"
    PRESSURE_ALTITUDE = "pressure_altitude"
    PATH_ANGLE = "path_angle"


class AileronMode(StrEnum):
    """Setpoint kinds of the aileron channel."""

    BANK = "bank"
    BEARING = "bearing"


class RudderMode(StrEnum):
    """Setpoint kinds of the rudder channel."""

    SIDESLIP = "sideslip"


TRIGGER_SCHEMA = vol.Schema(
    {
        vol.Required("kind"): vol.In([kind.value for kind in TriggerKind]),
        vol.Required("value"): vol.Coerce(float),
        vol.Optional("direction", default=1.0): vol.In([1.0, -1.0]),
    }
)

TARGET_SCHEMA = vol.Schema(
    {
        vol.Required("throttle"): vol.In([mode.value for mode in ThrottleMode]),
        vol.Required("elevator"): vol.In([mode.value for mode in ElevatorMode]),
        vol.Required("aileron"): vol.In([mode.value for mode in AileronMode]),
        vol.Required("rudder"): vol.In([mode.value for mode in RudderMode]),
    },
    extra=vol.ALLOW_EXTRA,
)


@dataclass(frozen=True)
class Trigger:
    """Switch condition of a target.

    ``value`` is seconds for time triggers, radians for bearing capture and
    meters for altitude capture. ``direction`` is the sign of the approach:
    the turn direction for bearing capture, climb (+1) or descent (-1) for
    altitude capture.
    """

    kind: TriggerKind
    value: float
    direction: float = 1.0


@dataclass(frozen=True)
class ChannelSetpoint[_M: StrEnum]:
    """Setpoint of one channel; angles in radians, speeds in m/s, altitudes in m."""

    mode: _M
    value: float = 0.0


@dataclass(frozen=True)
class GuidanceTarget:
    """Four channel setpoints plus the trigger that ends the target."""

    throttle: ChannelSetpoint[ThrottleMode]
    elevator: ChannelSetpoint[ElevatorMode]
    aileron: ChannelSetpoint[AileronMode]
    rudder: ChannelSetpoint[RudderMode]
    trigger: Trigger


type MissionPlan = tuple[GuidanceTarget, ...]


def validate_plan(plan: MissionPlan) -> MissionPlan:
    """Check every target of a plan, raising a plan error on the first bad one."""
    if not plan:
        raise PlanError("Mission plan has no targets")
    for index, target in enumerate(plan, start=1):
        try:
            TARGET_SCHEMA(
                {
                    "throttle": target.throttle.mode,
                    "elevator": target.elevator.mode,
                    "aileron": target.aileron.mode,
                    "rudder": target.rudder.mode,
                }
            )
            TRIGGER_SCHEMA(
                {
                    "kind": target.trigger.kind,
                    "value": target.trigger.value,
                    "direction": target.trigger.direction,
                }
            )
        except vol.Invalid as exception:
            raise PlanError(f"Target {index} is malformed: {exception}") from exception
        if not math.isfinite(target.trigger.value):
            raise PlanError(f"Target {index} has a non-finite trigger value")
    return plan


def evaluate_trigger(
    trigger: Trigger, estimate: EstimatedState, t: float, activation_time: float
) -> float:
    """Return the signed trigger value; it becomes non-negative when the condition is met."""
    match trigger.kind:
        case TriggerKind.ABSOLUTE_TIME:
            return t - trigger.value
        case TriggerKind.ELAPSED_TIME:
            return (t - activation_time) - trigger.value
        case TriggerKind.BEARING_CAPTURE:
            return trigger.direction * wrap_angle(estimate.bearing - trigger.value)
        case TriggerKind.ALTITUDE_CAPTURE:
            return trigger.direction * (estimate.pressure_altitude - trigger.value)
    raise PlanError(f"Unknown trigger kind: {trigger.kind}")


class Guidance:
    """Target pipeline of one run."""

    def __init__(self, plan: MissionPlan) -> None:
        """Initialize with the first target active at t=0."""
        self.plan = validate_plan(plan)
        self.index = 0
        self.activation_time = 0.0

    @property
    def target(self) -> GuidanceTarget:
        """Return the active target."""
        return self.plan[self.index]

    @property
    def finished(self) -> bool:
        """Return whether the last target is active."""
        return self.index == len(self.plan) - 1

    def step(self, estimate: EstimatedState, t: float) -> GuidanceTarget:
        """Advance past every satisfied trigger and return the active target.

        The last target is held once reached, whatever its trigger says.
        """
        while not self.finished and (
            evaluate_trigger(self.target.trigger, estimate, t, self.activation_time) >= 0.0
        ):
            self.index += 1
            self.activation_time = t
            _LOGGER.debug("Target %d active at t=%.2f s", self.index + 1, t)
        return self.target
