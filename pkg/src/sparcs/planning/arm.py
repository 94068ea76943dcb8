"""Serial-chain arm model: forward kinematics, geometric Jacobian, and
damped-least-squares inverse kinematics with seeded random restarts.

A chain is a base pose followed by revolute joints, each a fixed
translation from the previous frame plus a rotation about a fixed local
axis, ending in a fixed tool transform (fork tip frame). Collision
capsules are attached to joint frames and swept through configurations by
the batched FK used by the planner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import SparcsError
from .geometry import axis_angle_rotation, make_tf, rotation_angle, rotation_vector, tf_from_xyz_rpy


class IkFailure(SparcsError):
    """No joint solution reached the goal within tolerance."""


@dataclass(frozen=True)
class Joint:
    offset: tuple          # translation from previous frame, meters
    axis: tuple            # unit rotation axis in the local frame
    limits: tuple          # (lo, hi) radians


@dataclass(frozen=True)
class Capsule:
    frame: int             # 0 = base frame, i = frame after joint i
    p0: tuple
    p1: tuple
    radius: float


@dataclass(frozen=True)
class ArmModel:
    name: str
    base: np.ndarray                       # 4x4 world pose of the chain root
    joints: tuple
    tool: np.ndarray                       # 4x4 from last joint frame to fork tip
    capsules: tuple = field(default=())

    @property
    def n_joints(self) -> int:
        return len(self.joints)

    @property
    def limits(self) -> np.ndarray:
        return np.array([j.limits for j in self.joints])

    def __post_init__(self):
        if self.n_joints < 3:
            raise SparcsError("arm needs at least 3 joints")
        for j in self.joints:
            if not j.limits[0] < j.limits[1]:
                raise SparcsError(f"joint limits {j.limits} must satisfy lo < hi")

    @classmethod
    def from_config(cls, cfg: dict) -> "ArmModel":
        joints = tuple(
            Joint(tuple(j["offset"]), tuple(j["axis"]), tuple(j["limits"]))
            for j in cfg["joints"]
        )
        capsules = tuple(
            Capsule(int(c["frame"]), tuple(c["p0"]), tuple(c["p1"]), float(c["radius"]))
            for c in cfg.get("capsules", ())
        )
        return cls(
            name=cfg.get("name", "arm"),
            base=tf_from_xyz_rpy(cfg.get("base_xyz", (0, 0, 0)), cfg.get("base_rpy", (0, 0, 0))),
            joints=joints,
            tool=tf_from_xyz_rpy(cfg.get("tool_xyz", (0, 0, 0)), cfg.get("tool_rpy", (0, 0, 0))),
            capsules=capsules,
        )

    def clamp(self, q: np.ndarray) -> np.ndarray:
        lim = self.limits
        return np.clip(q, lim[:, 0], lim[:, 1])

    def within_limits(self, q: np.ndarray, tol: float = 1e-9) -> bool:
        lim = self.limits
        return bool(np.all(q >= lim[:, 0] - tol) and np.all(q <= lim[:, 1] + tol))


def chain_frames(arm: ArmModel, q: np.ndarray) -> list:
    """World frames [base, after joint 1, ..., after joint n, tool]."""
    frames = [arm.base]
    t = arm.base
    for joint, qi in zip(arm.joints, q):
        t = t @ make_tf(axis_angle_rotation(joint.axis, qi), joint.offset)
        frames.append(t)
    frames.append(t @ arm.tool)
    return frames


def forward_kinematics(arm: ArmModel, q) -> np.ndarray:
    """World pose of the fork tip frame."""
    return chain_frames(arm, np.asarray(q, dtype=float))[-1]


def batch_frames(arm: ArmModel, qs: np.ndarray) -> np.ndarray:
    """Frames for a batch of configurations, shape (B, n_joints + 2, 4, 4)."""
    qs = np.asarray(qs, dtype=float)
    b = qs.shape[0]
    out = np.empty((b, arm.n_joints + 2, 4, 4))
    t = np.broadcast_to(arm.base, (b, 4, 4)).copy()
    out[:, 0] = t
    for i, joint in enumerate(arm.joints):
        k = np.asarray(joint.axis, dtype=float)
        k = k / np.linalg.norm(k)
        kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
        ang = qs[:, i]
        r = (
            np.eye(3)[None, :, :]
            + np.sin(ang)[:, None, None] * kx
            + (1.0 - np.cos(ang))[:, None, None] * (kx @ kx)
        )
        step = np.zeros((b, 4, 4))
        step[:, :3, :3] = r
        step[:, :3, 3] = joint.offset
        step[:, 3, 3] = 1.0
        t = t @ step
        out[:, i + 1] = t
    out[:, -1] = t @ arm.tool
    return out


def capsule_segments(arm: ArmModel, frames) -> tuple:
    """World capsule endpoints for one config's frame list: (P0, P1, radii)."""
    p0 = np.empty((len(arm.capsules), 3))
    p1 = np.empty((len(arm.capsules), 3))
    radii = np.empty(len(arm.capsules))
    for i, cap in enumerate(arm.capsules):
        f = frames[cap.frame]
        p0[i] = f[:3, :3] @ cap.p0 + f[:3, 3]
        p1[i] = f[:3, :3] @ cap.p1 + f[:3, 3]
        radii[i] = cap.radius
    return p0, p1, radii


def batch_capsule_segments(arm: ArmModel, qs: np.ndarray) -> tuple:
    """Capsule endpoints for a batch of configs: (B, ncaps, 3) x2 plus radii."""
    frames = batch_frames(arm, qs)
    ncaps = len(arm.capsules)
    p0 = np.empty((qs.shape[0], ncaps, 3))
    p1 = np.empty((qs.shape[0], ncaps, 3))
    radii = np.empty(ncaps)
    for i, cap in enumerate(arm.capsules):
        f = frames[:, cap.frame]
        p0[:, i] = np.einsum("bij,j->bi", f[:, :3, :3], cap.p0) + f[:, :3, 3]
        p1[:, i] = np.einsum("bij,j->bi", f[:, :3, :3], cap.p1) + f[:, :3, 3]
        radii[i] = cap.radius
    return p0, p1, radii


def jacobian(arm: ArmModel, q: np.ndarray, frames=None) -> np.ndarray:
    """Geometric Jacobian (6 x n): linear rows then angular rows."""
    if frames is None:
        frames = chain_frames(arm, q)
    p_ee = frames[-1][:3, 3]
    jac = np.zeros((6, arm.n_joints))
    for i, joint in enumerate(arm.joints):
        # Joint i rotates about its axis expressed in the pre-rotation frame;
        # that frame's rotation equals the previous frame's rotation.
        z = frames[i][:3, :3] @ np.asarray(joint.axis, dtype=float)
        p = frames[i][:3, :3] @ np.asarray(joint.offset) + frames[i][:3, 3]
        jac[:3, i] = np.cross(z, p_ee - p)
        jac[3:, i] = z
    return jac


def pose_error(current: np.ndarray, goal: np.ndarray) -> tuple:
    """(position error vector, orientation log-map vector, geodesic angle)."""
    e_p = goal[:3, 3] - current[:3, 3]
    r_err = goal[:3, :3] @ current[:3, :3].T
    return e_p, rotation_vector(r_err), rotation_angle(r_err)


def inverse_kinematics(
    arm: ArmModel,
    x_goal: np.ndarray,
    q_init,
    tol: float = 0.005,
    max_iter: int = 160,
    ang_tol: float = 0.05,
    restarts: int = 20,
    damping: float = 0.08,
    step_scale: float = 1.0,
    rng=None,
):
    """Damped-least-squares IK. Returns a joint vector or raises IkFailure.

    Restarts perturb q_init with growing amplitude; every iterate stays
    inside joint limits, so a returned solution always respects them.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    q_init = arm.clamp(np.asarray(q_init, dtype=float))
    lam2 = damping * damping
    eye6 = np.eye(6)

    for attempt in range(restarts + 1):
        if attempt == 0:
            q = q_init.copy()
        else:
            spread = 0.4 + 0.6 * attempt
            q = arm.clamp(q_init + rng.uniform(-spread, spread, arm.n_joints))
        best_err = np.inf
        stall = 0
        for _ in range(max_iter):
            frames = chain_frames(arm, q)
            e_p, e_r, ang = pose_error(frames[-1], x_goal)
            pos_err = float(np.linalg.norm(e_p))
            if pos_err <= tol and ang <= ang_tol:
                return q
            err = pos_err + 0.1 * ang
            if err < best_err - 1e-7:
                best_err = err
                stall = 0
            else:
                stall += 1
                if stall > 15:
                    break
            # clamp the error twist so distant goals cannot swamp the update
            if pos_err > 0.15:
                e_p = e_p * (0.15 / pos_err)
            if ang > 0.5:
                e_r = e_r * (0.5 / ang)
            jac = jacobian(arm, q, frames)
            twist = np.concatenate([e_p, e_r])
            dq = jac.T @ np.linalg.solve(jac @ jac.T + lam2 * eye6, twist)
            q = arm.clamp(q + step_scale * dq)
    raise IkFailure(
        f"no IK solution within {tol * 1000:.1f} mm / {ang_tol:.3f} rad "
        f"after {restarts} restarts"
    )


def ik_success(arm: ArmModel, q, x_goal, tol: float = 0.005, ang_tol: float = 0.05) -> bool:
    """Independent endpoint check used by tests and the trajectory oracle."""
    e_p, _, ang = pose_error(forward_kinematics(arm, q), x_goal)
    return float(np.linalg.norm(e_p)) <= tol and ang <= ang_tol and arm.within_limits(q)


def interpolate(q_a, q_b, max_step: float) -> np.ndarray:
    """Straight joint-space segment sampled at <= max_step rad per joint."""
    q_a = np.asarray(q_a, dtype=float)
    q_b = np.asarray(q_b, dtype=float)
    span = float(np.max(np.abs(q_b - q_a)))
    steps = max(1, int(math.ceil(span / max_step)))
    ts = np.linspace(0.0, 1.0, steps + 1)
    return q_a[None, :] + ts[:, None] * (q_b - q_a)[None, :]
