"""Tests for the camera pose stream."""

import math

import numpy as np
import pytest

from swapsim.camera import CameraIntrinsics, CameraRig, camera_pose_stream
from swapsim.earth import GeodeticPosition, local_offset
from swapsim.flight import TruthRecord, TruthState
from swapsim.rotations import euler_to_quat, quat_minus, quat_to_dcm
from swapsim.seedtree import StochasticSampler
from swapsim.sensors import CameraSpec

ORIGIN = GeodeticPosition(math.radians(-88.0), math.radians(38.9), 900.0)


def _state(yaw: float) -> TruthState:
    return TruthState(
        ORIGIN.longitude,
        ORIGIN.latitude,
        ORIGIN.altitude,
        np.array([28.0, 0.0, 0.0]),
        euler_to_quat(yaw, 0.0, 0.0),
        np.zeros(3),
        19.0,
    )


def test_nadir_camera_on_level_aircraft():
    """Test a downward camera on a level aircraft looks straight down."""
    rig = CameraRig(CameraSpec(), StochasticSampler(1))
    pose = rig.pose(3.0, _state(0.0))

    assert pose.t == 3.0
    assert pose.pitch == pytest.approx(-90.0, abs=1e-6)
    assert pose.altitude == pytest.approx(ORIGIN.altitude)


def test_forward_camera_follows_heading():
    """Test a forward camera shares the aircraft heading."""
    rig = CameraRig(CameraSpec(mounting=(0.0, 0.0, 0.0)), StochasticSampler(1))
    pose = rig.pose(0.0, _state(math.radians(60.0)))

    assert pose.yaw == pytest.approx(60.0)
    assert pose.pitch == pytest.approx(0.0, abs=1e-9)
    assert pose.roll == pytest.approx(0.0, abs=1e-9)


def test_camera_location_offset():
    """Test the camera position is displaced along the body axes."""
    rig = CameraRig(CameraSpec(position=(2.0, 0.0, 0.5)), StochasticSampler(1))
    pose = rig.pose(0.0, _state(math.pi / 2))
    north, east = local_offset(ORIGIN, math.radians(pose.longitude), math.radians(pose.latitude))

    assert north == pytest.approx(0.0, abs=1e-6)
    assert east == pytest.approx(2.0)
    assert pose.altitude == pytest.approx(ORIGIN.altitude - 0.5)


def test_mounting_misalignment_draws():
    """Test the mounting and its estimate differ by the configured errors."""
    spec = CameraSpec(misalignment=0.01, mounting_knowledge=0.001)
    rig = CameraRig(spec, StochasticSampler(9))
    nominal = euler_to_quat(0.0, -math.pi / 2, 0.0)

    assert 0.0 < np.linalg.norm(quat_minus(rig.mounting, nominal)) < 0.06
    assert 0.0 < np.linalg.norm(quat_minus(rig.mounting_estimate, rig.mounting)) < 0.006


def test_projection():
    """Test the optical axis lands on the principal point."""
    intrinsics = CameraIntrinsics(800.0, 1024, 768)

    assert intrinsics.project(np.array([1.0, 0.0, 0.0])) == (512.0, 384.0)
    assert intrinsics.project(np.array([1.0, 0.1, -0.05])) == pytest.approx((592.0, 344.0))
    assert intrinsics.project(np.array([-1.0, 0.0, 0.0])) is None


def test_pose_stream_stride():
    """Test poses are produced every fiftieth truth epoch."""
    states = np.array([_state(0.0).as_vector()] * 101)
    record = TruthRecord(np.arange(101) * 0.002, states)
    poses = camera_pose_stream(record, CameraRig(CameraSpec(), StochasticSampler(1)))

    assert [pose.t for pose in poses] == pytest.approx([0.0, 0.1, 0.2])
    assert len(poses[0].as_row()) == 11


def test_nadir_pose_quaternion():
    """Test the pose quaternion keeps the heading that the nadir Euler angles lose."""
    rig = CameraRig(CameraSpec(), StochasticSampler(1))
    camera_to_ned = quat_to_dcm(rig.pose(0.0, _state(math.radians(60.0))).attitude)

    np.testing.assert_allclose(camera_to_ned @ [1.0, 0.0, 0.0], [0.0, 0.0, 1.0], atol=1e-9)
    np.testing.assert_allclose(
        camera_to_ned @ [0.0, 0.0, -1.0],
        [math.cos(math.radians(60.0)), math.sin(math.radians(60.0)), 0.0],
        atol=1e-9,
    )
    row = rig.pose(0.0, _state(0.0)).as_row()
    assert np.linalg.norm(row[-4:]) == pytest.approx(1.0)
