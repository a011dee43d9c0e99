"""Camera pose stream for an external image renderer.

The camera location on the airframe is fixed; its mounting attitude is the
nominal mounting composed with a small misalignment drawn from the CAM seed.
Camera axes: x along the optical axis, y to the right of the image, z down
the image. Images are not synthesized here.

Each pose carries the camera attitude twice: as yaw, pitch and roll of the
camera axes relative to NED, and as the camera-to-NED quaternion q0..q3
(scalar first). At the nadir mounting the pitch sits at -90 deg, where yaw
and roll are not separable; the quaternion is unambiguous everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .const import TRUTH_PER_CAMERA
from .earth import GeodeticPosition
from .flight import TruthRecord, TruthState
from .rotations import euler_to_quat, quat_multiply, quat_plus, quat_to_euler
from .seedtree import StochasticSampler
from .sensors import CameraSpec, offset_position

POSE_COLUMNS = (
    "t",
    "longitude",
    "latitude",
    "altitude",
    "yaw",
    "pitch",
    "roll",
    "q0",
    "q1",
    "q2",
    "q3",
)


@dataclass(frozen=True)
class CameraIntrinsics:
    """Distortion-free pinhole model, pixels."""

    focal_length: float
    width: int
    height: int

    @property
    def principal_point(self) -> tuple[float, float]:
        """Return the image centre."""
        return 0.5 * self.width, 0.5 * self.height

    def project(self, direction: np.ndarray) -> tuple[float, float] | None:
        """Project a camera-frame direction to pixel coordinates, None behind the camera."""
        if direction[0] <= 0.0:
            return None
        cx, cy = self.principal_point
        return (
            cx + self.focal_length * direction[1] / direction[0],
            cy + self.focal_length * direction[2] / direction[0],
        )


@dataclass(frozen=True)
class CameraPose:
    """One pose record: time (s), position (deg, deg, m), attitude (deg) and its quaternion."""

    t: float
    longitude: float
    latitude: float
    altitude: float
    yaw: float
    pitch: float
    roll: float
    attitude: np.ndarray

    def as_row(self) -> tuple[float, ...]:
        """Return the record in column order."""
        return (
            self.t,
            self.longitude,
            self.latitude,
            self.altitude,
            self.yaw,
            self.pitch,
            self.roll,
            *(float(value) for value in self.attitude),
        )


class CameraRig:
    """Camera mounting on the airframe and its navigation-side estimate."""

    def __init__(self, spec: CameraSpec, sampler: StochasticSampler) -> None:
        """Draw the mounting misalignment, then the error of its estimate."""
        yaw, pitch, roll = (math.radians(angle) for angle in spec.mounting)
        nominal = euler_to_quat(yaw, pitch, roll)
        self.position = np.asarray(spec.position, dtype=float)
        self.intrinsics = CameraIntrinsics(spec.focal_length, spec.width, spec.height)
        self.mounting = quat_plus(nominal, spec.misalignment * sampler.standard_normal(3))
        self.mounting_estimate = quat_plus(
            self.mounting, spec.mounting_knowledge * sampler.standard_normal(3)
        )

    def pose(self, t: float, state: TruthState) -> CameraPose:
        """Return the camera pose for a truth state."""
        position: GeodeticPosition = offset_position(
            state.position, state.body_to_ned @ self.position
        )
        attitude = quat_multiply(state.attitude, self.mounting)
        yaw, pitch, roll = quat_to_euler(attitude)
        return CameraPose(
            t=t,
            longitude=math.degrees(position.longitude),
            latitude=math.degrees(position.latitude),
            altitude=position.altitude,
            yaw=math.degrees(yaw),
            pitch=math.degrees(pitch),
            roll=math.degrees(roll),
            attitude=attitude,
        )


def camera_pose_stream(
    record: TruthRecord, rig: CameraRig, stride: int = TRUTH_PER_CAMERA
) -> list[CameraPose]:
    """Return the pose records at camera epochs of a full-rate truth record."""
    return [
        rig.pose(float(record.times[index]), record.state(index))
        for index in range(0, len(record), stride)
    ]
