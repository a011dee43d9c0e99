"""Quaternion and rotation helpers.

Quaternions are Hamilton, scalar first ``[w, x, y, z]``. The attitude
quaternion ``q_nb`` describes the body frame relative to the local NED frame:
``quat_to_dcm(q_nb)`` maps body-frame vectors into NED.
"""

from __future__ import annotations

import math

import numpy as np

_SMALL_ANGLE = 1e-8


def cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return the cross product of two 3-vectors."""
    a0, a1, a2 = a
    b0, b1, b2 = b
    return np.array([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])


def quat_multiply(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Return the Hamilton product p ⊗ q."""
    pw, px, py, pz = p
    qw, qx, qy, qz = q
    return np.array(
        [
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
        ]
    )


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    """Return the conjugate quaternion."""
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_normalize(q: np.ndarray) -> np.ndarray:
    """Return q scaled to unit norm."""
    return q / math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])


def quat_derivative(q: np.ndarray, rate: np.ndarray) -> np.ndarray:
    """Return q̇ = ½ q ⊗ [0, rate] for a body-frame angular rate."""
    w, x, y, z = q
    p, r_q, r = rate
    return 0.5 * np.array(
        [
            -x * p - y * r_q - z * r,
            w * p + y * r - z * r_q,
            w * r_q - x * r + z * p,
            w * r + x * r_q - y * p,
        ]
    )


def quat_exp(theta: np.ndarray) -> np.ndarray:
    """Map a rotation vector to a unit quaternion."""
    angle = math.sqrt(theta[0] * theta[0] + theta[1] * theta[1] + theta[2] * theta[2])
    if angle < _SMALL_ANGLE:
        scale = 0.5 - angle * angle / 48.0
        return np.array(
            [1.0 - angle * angle / 8.0, scale * theta[0], scale * theta[1], scale * theta[2]]
        )
    scale = math.sin(0.5 * angle) / angle
    return np.array(
        [math.cos(0.5 * angle), scale * theta[0], scale * theta[1], scale * theta[2]]
    )


def quat_log(q: np.ndarray) -> np.ndarray:
    """Map a unit quaternion to its rotation vector, angle in [0, π]."""
    w, x, y, z = q
    if w < 0.0:
        w, x, y, z = -w, -x, -y, -z
    norm_v = math.sqrt(x * x + y * y + z * z)
    if norm_v < _SMALL_ANGLE:
        return np.array([2.0 * x, 2.0 * y, 2.0 * z]) / w
    scale = 2.0 * math.atan2(norm_v, w) / norm_v
    return np.array([scale * x, scale * y, scale * z])


def quat_plus(q: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Return q ⊕ theta, a local (body-side) increment."""
    return quat_multiply(q, quat_exp(theta))


def quat_minus(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Return q1 ⊖ q2, the local rotation vector taking q2 to q1."""
    return quat_log(quat_multiply(quat_conjugate(q2), q1))


def quat_to_dcm(q: np.ndarray) -> np.ndarray:
    """Return the rotation matrix of a unit quaternion."""
    w, x, y, z = q
    return np.array(
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    )


def euler_to_quat(yaw: float, pitch: float, roll: float) -> np.ndarray:
    """Return the quaternion of a yaw-pitch-roll (z-y-x) sequence."""
    cy, sy = math.cos(0.5 * yaw), math.sin(0.5 * yaw)
    cp, sp = math.cos(0.5 * pitch), math.sin(0.5 * pitch)
    cr, sr = math.cos(0.5 * roll), math.sin(0.5 * roll)
    return np.array(
        [
            cr * cp * cy + sr * sp * sy,
            sr * cp * cy - cr * sp * sy,
            cr * sp * cy + sr * cp * sy,
            cr * cp * sy - sr * sp * cy,
        ]
    )


def quat_to_euler(q: np.ndarray) -> tuple[float, float, float]:
    """Return (yaw, pitch, roll) of a unit quaternion."""
    w, x, y, z = q
    yaw = math.atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z))
    sin_pitch = max(-1.0, min(1.0, 2.0 * (w * y - z * x)))
    pitch = math.asin(sin_pitch)
    roll = math.atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y))
    return yaw, pitch, roll


def right_jacobian_inverse_times(theta: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Return J_r⁻¹(theta) v for the SO(3) right Jacobian, in closed form."""
    angle = math.sqrt(theta[0] * theta[0] + theta[1] * theta[1] + theta[2] * theta[2])
    if angle < 1e-4:
        coefficient = 1.0 / 12.0 + angle * angle / 720.0
    else:
        coefficient = 1.0 / (angle * angle) - (1.0 + math.cos(angle)) / (
            2.0 * angle * math.sin(angle)
        )
    theta_v = cross(theta, v)
    return v + 0.5 * theta_v + coefficient * cross(theta, theta_v)


def wrap_angle(angle: float) -> float:
    """Wrap an angle in radians to (-π, π]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def wrap_degrees(angle: float) -> float:
    """Wrap an angle in degrees to (-180, 180]."""
    wrapped = math.remainder(angle, 360.0)
    if wrapped <= -180.0:
        wrapped += 360.0
    return wrapped
