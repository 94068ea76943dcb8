"""Rotations, rigid transforms, and the neck-angle head-pose parameterization.

Frame convention: x points to the user's right, y forward (facing
direction), z up. A head pose is three neck angles applied in a fixed
order about those axes. Signs: positive flexion pitches the face down
(extension is negative flexion), positive rotation turns the face toward
the user's right, positive lateral flexion tilts toward the right shoulder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def rot_x(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def axis_angle_rotation(axis, angle: float) -> np.ndarray:
    """Rodrigues formula for a unit axis."""
    axis = np.asarray(axis, dtype=float)
    k = axis / np.linalg.norm(axis)
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(angle) * kx + (1.0 - math.cos(angle)) * (kx @ kx)


def rotation_angle(r: np.ndarray) -> float:
    """Geodesic angle of a rotation matrix, in [0, pi]."""
    return math.acos(min(1.0, max(-1.0, (np.trace(r) - 1.0) / 2.0)))


def rotation_vector(r: np.ndarray) -> np.ndarray:
    """Log map: axis * angle. Near-pi angles are not needed by the solver."""
    angle = rotation_angle(r)
    if angle < 1e-12:
        return np.zeros(3)
    axis = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
    n = np.linalg.norm(axis)
    if n < 1e-12:
        # angle ~ pi: diagonal dominates
        i = int(np.argmax(np.diag(r)))
        axis = np.sqrt(np.maximum((np.diag(r) + 1.0) / 2.0, 0.0))
        axis[i] = max(axis[i], 1e-9)
        for j in range(3):
            if j != i and r[i, j] + r[j, i] < 0:
                axis[j] = -axis[j]
        return angle * axis / np.linalg.norm(axis)
    return angle * axis / n


def make_tf(r: np.ndarray, t) -> np.ndarray:
    tf = np.eye(4)
    tf[:3, :3] = r
    tf[:3, 3] = np.asarray(t, dtype=float)
    return tf


def tf_from_xyz_rpy(xyz, rpy=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Translation + extrinsic x,y,z Euler rotation (roll, pitch, yaw)."""
    roll, pitch, yaw = rpy
    return make_tf(rot_z(yaw) @ rot_y(pitch) @ rot_x(roll), xyz)


@dataclass(frozen=True)
class HeadPose:
    """Neck angles in radians: (flexion, rotation, lateral)."""

    flexion: float
    rotation: float
    lateral: float

    def __post_init__(self):
        for a in (self.flexion, self.rotation, self.lateral):
            if not math.isfinite(a):
                raise ValueError("head pose angles must be finite")

    @classmethod
    def neutral(cls) -> "HeadPose":
        return cls(0.0, 0.0, 0.0)

    @classmethod
    def from_tuple(cls, angles) -> "HeadPose":
        return cls(float(angles[0]), float(angles[1]), float(angles[2]))

    def as_tuple(self) -> tuple:
        return (self.flexion, self.rotation, self.lateral)

    def rotation_matrix(self) -> np.ndarray:
        # Fixed-axis composition: flexion first, then lateral, then rotation.
        return rot_z(-self.rotation) @ rot_y(self.lateral) @ rot_x(-self.flexion)


def relative_angle(a: HeadPose, b: HeadPose) -> float:
    """Geodesic rotation angle between two head poses, in [0, pi]."""
    if a == b:
        return 0.0
    return rotation_angle(a.rotation_matrix().T @ b.rotation_matrix())


@dataclass(frozen=True)
class HeadGeometry:
    """Where the head sits in the world and where the mouth sits on the head."""

    pivot: tuple
    mouth_offset: tuple
    keepout_radius: float = 0.12

    def mouth_frame(self, pose: HeadPose) -> np.ndarray:
        r = pose.rotation_matrix()
        return make_tf(r, np.asarray(self.pivot) + r @ np.asarray(self.mouth_offset))

    @classmethod
    def from_config(cls, cfg: dict) -> "HeadGeometry":
        return cls(
            pivot=tuple(cfg["pivot"]),
            mouth_offset=tuple(cfg["mouth_offset"]),
            keepout_radius=float(cfg.get("keepout_radius", 0.12)),
        )
