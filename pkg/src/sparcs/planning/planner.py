"""Bite-transfer planning policies.

All three policies try to deliver the fork to a pose at a fixed transform
from some head pose. They differ in which head poses they consider:
Fixed plans to one assumed pose; the informed policy samples candidates
from the user's attainable-pose manifold; the baseline samples from the
full-mobility manifold instead. Candidates are ordered by how far the user
would have to move their neck, and the first plannable one wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..blocks import HeadPoseManifold
from ..errors import SparcsError
from .arm import (
    ArmModel,
    IkFailure,
    batch_capsule_segments,
    capsule_segments,
    inverse_kinematics,
    interpolate,
)
from .collision import Scene
from .geometry import HeadGeometry, HeadPose, relative_angle


class PoseOutsideManifold(SparcsError):
    """The user's current pose is not inside the manifold it should span."""


class PlanFailure(SparcsError):
    """No collision-free trajectory to the goal pose."""


@dataclass(frozen=True)
class PlannerParams:
    ik_tol: float = 0.005
    ik_ang_tol: float = 0.05
    ik_max_iter: int = 120
    ik_restarts: int = 6
    ik_solution_attempts: int = 4
    collision_step: float = 0.02
    rrt_step: float = 0.1
    rrt_goal_bias: float = 0.2
    rrt_max_iters: int = 5000
    candidate_count: int = 64

    @classmethod
    def from_config(cls, cfg: dict) -> "PlannerParams":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in cfg.items() if k in known})


@dataclass(frozen=True)
class PlanResult:
    policy: str
    success: bool
    chosen_pose: HeadPose | None = None
    relative_angle: float | None = None
    trajectory: list | None = None


@dataclass(frozen=True)
class TransferScenario:
    """Everything one transfer-planning call needs."""

    arm: ArmModel
    scene: Scene
    head: HeadGeometry
    transfer: np.ndarray                  # mouth frame -> fork tip goal frame
    manifold_muf: HeadPoseManifold
    manifold_all: HeadPoseManifold
    h_fixed: HeadPose
    h_user: HeadPose
    q_start: np.ndarray
    params: PlannerParams = field(default_factory=PlannerParams)

    def with_user(self, h_user: HeadPose) -> "TransferScenario":
        return replace(self, h_user=h_user)


def goal_pose(h_cand: HeadPose, transfer_transform: np.ndarray, head: HeadGeometry) -> np.ndarray:
    """Fork-tip goal: the mouth frame composed with the fixed transfer transform."""
    return head.mouth_frame(h_cand) @ transfer_transform


def sample_candidates(
    manifold: HeadPoseManifold,
    h_user: HeadPose,
    h_fixed: HeadPose | None,
    n: int,
    rng_seed,
) -> list:
    """Candidate head poses sorted by relative angle from the user's pose.

    The user's own pose is always element 0 (angle zero); ties keep
    insertion order, so h_fixed precedes random samples at equal angle.
    """
    if not manifold.contains(h_user.as_tuple()):
        raise PoseOutsideManifold(f"h_user {h_user.as_tuple()} outside manifold")
    if n < 0:
        raise SparcsError("candidate count must be >= 0")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    poses = [h_user]
    if h_fixed is not None:
        poses.append(h_fixed)
    poses.extend(HeadPose.from_tuple(manifold.sample(rng)) for _ in range(n))
    return sorted(poses, key=lambda p: relative_angle(h_user, p))


def config_collides(arm: ArmModel, scene: Scene, q: np.ndarray) -> bool:
    from .arm import chain_frames

    p0, p1, radii = capsule_segments(arm, chain_frames(arm, q))
    return scene.min_clearance(p0, p1, radii) <= 0.0


def goal_capsules_collide(arm: ArmModel, x_goal: np.ndarray, scene: Scene) -> bool:
    """Check the capsules rigidly attached to the tool flange at the goal.

    Their world placement follows from x_goal alone, so hopeless goals are
    rejected before any IK work.
    """
    last = arm.n_joints
    flange = x_goal @ np.linalg.inv(arm.tool)
    p0s, p1s, radii = [], [], []
    for cap in arm.capsules:
        if cap.frame != last:
            continue
        p0s.append(flange[:3, :3] @ cap.p0 + flange[:3, 3])
        p1s.append(flange[:3, :3] @ cap.p1 + flange[:3, 3])
        radii.append(cap.radius)
    if not p0s:
        return False
    return scene.min_clearance(np.array(p0s), np.array(p1s), np.array(radii)) <= 0.0


def _segment_clear(arm: ArmModel, scene: Scene, q_a, q_b, step: float) -> bool:
    qs = interpolate(q_a, q_b, step)
    p0, p1, radii = batch_capsule_segments(arm, qs)
    return scene.min_clearance(p0, p1, radii) > 0.0


def path_collision_free(arm: ArmModel, scene: Scene, path, step: float) -> bool:
    """Re-check a waypoint path at the given joint resolution."""
    for q_a, q_b in zip(path[:-1], path[1:]):
        if not _segment_clear(arm, scene, q_a, q_b, step):
            return False
    return True


def _rrt(arm: ArmModel, scene: Scene, q_start, q_goal, params: PlannerParams, rng) -> list | None:
    """Goal-biased tree search in joint space. Returns waypoints or None."""
    lim = arm.limits
    nodes = [np.asarray(q_start, dtype=float)]
    parents = [-1]
    node_arr = np.empty((params.rrt_max_iters + 1, arm.n_joints))
    node_arr[0] = nodes[0]
    for _ in range(params.rrt_max_iters):
        if rng.random() < params.rrt_goal_bias:
            target = q_goal
        else:
            target = rng.uniform(lim[:, 0], lim[:, 1])
        count = len(nodes)
        dists = np.max(np.abs(node_arr[:count] - target), axis=1)
        nearest = int(np.argmin(dists))
        d = dists[nearest]
        if d < 1e-12:
            continue
        frac = min(1.0, params.rrt_step / d)
        q_new = nodes[nearest] + frac * (target - nodes[nearest])
        if not _segment_clear(arm, scene, nodes[nearest], q_new, params.collision_step):
            continue
        nodes.append(q_new)
        parents.append(nearest)
        node_arr[count] = q_new
        if np.max(np.abs(q_new - q_goal)) <= params.rrt_step and _segment_clear(
            arm, scene, q_new, q_goal, params.collision_step
        ):
            path = [np.asarray(q_goal, dtype=float)]
            i = len(nodes) - 1
            while i >= 0:
                path.append(nodes[i])
                i = parents[i]
            path.reverse()
            return path
    return None


def plan_trajectory(
    arm: ArmModel,
    q_start,
    x_goal: np.ndarray,
    scene: Scene,
    params: PlannerParams = PlannerParams(),
    rng=None,
) -> list:
    """Collision-free joint path from q_start to an IK solution for x_goal.

    Straight-line interpolation is tried first; a goal-biased sampling tree
    is the fallback. Raises PlanFailure when neither works.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    q_start = np.asarray(q_start, dtype=float)
    if config_collides(arm, scene, q_start):
        raise SparcsError("q_start must be collision-free")
    if goal_capsules_collide(arm, x_goal, scene):
        raise PlanFailure("goal pose places the tool in collision")

    q_goal = None
    for attempt in range(params.ik_solution_attempts):
        seed_q = q_start if attempt == 0 else arm.clamp(
            q_start + rng.uniform(-0.6, 0.6, arm.n_joints)
        )
        try:
            q = inverse_kinematics(
                arm,
                x_goal,
                seed_q,
                tol=params.ik_tol,
                ang_tol=params.ik_ang_tol,
                max_iter=params.ik_max_iter,
                restarts=params.ik_restarts,
                rng=rng,
            )
        except IkFailure:
            continue
        if not config_collides(arm, scene, q):
            q_goal = q
            break
    if q_goal is None:
        raise PlanFailure("no collision-free IK solution for the goal pose")

    if _segment_clear(arm, scene, q_start, q_goal, params.collision_step):
        return [q_start, q_goal]
    path = _rrt(arm, scene, q_start, q_goal, params, rng)
    if path is None:
        raise PlanFailure("sampling tree exhausted without reaching the goal")
    return path


def _attempt(scenario: TransferScenario, policy: str, pose: HeadPose, rng) -> PlanResult | None:
    x_goal = goal_pose(pose, scenario.transfer, scenario.head)
    try:
        path = plan_trajectory(
            scenario.arm, scenario.q_start, x_goal, scenario.scene, scenario.params, rng
        )
    except PlanFailure:
        return None
    return PlanResult(
        policy=policy,
        success=True,
        chosen_pose=pose,
        relative_angle=relative_angle(scenario.h_user, pose),
        trajectory=path,
    )


def policy_fixed(scenario: TransferScenario, rng=None) -> PlanResult:
    """Plan straight to the assumed fixed head pose; never re-plans."""
    if not scenario.manifold_muf.contains(scenario.h_fixed.as_tuple()):
        raise PoseOutsideManifold("h_fixed must lie inside the user's manifold")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    result = _attempt(scenario, "Fixed", scenario.h_fixed, rng)
    if result is None:
        return PlanResult(policy="Fixed", success=False)
    return result


def _iterate_candidates(scenario, policy, manifold, include_fixed, rng) -> PlanResult:
    candidates = sample_candidates(
        manifold,
        scenario.h_user,
        scenario.h_fixed if include_fixed else None,
        scenario.params.candidate_count,
        rng,
    )
    for pose in candidates:
        result = _attempt(scenario, policy, pose, rng)
        if result is not None:
            return result
    return PlanResult(policy=policy, success=False)


def policy_muf_informed(scenario: TransferScenario, rng=None) -> PlanResult:
    """Candidates from the user's attainable manifold, plus h_user and h_fixed."""
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    return _iterate_candidates(scenario, "MufInformed", scenario.manifold_muf, True, rng)


def policy_baseline(scenario: TransferScenario, rng=None) -> PlanResult:
    """Candidates from the full-mobility manifold; knows h_user but not h_fixed."""
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    return _iterate_candidates(scenario, "Baseline", scenario.manifold_all, False, rng)


POLICIES = {
    "Fixed": policy_fixed,
    "Baseline": policy_baseline,
    "MufInformed": policy_muf_informed,
}


def grid_and_random_poses(manifold: HeadPoseManifold, n: int, rng) -> list:
    """Deterministic 3x3x3 grid filled out with uniform random draws."""
    axes = [manifold.flexion_range, manifold.rotation_range, manifold.lateral_range]
    grid_axes = [(lo, (lo + hi) / 2.0, hi) for lo, hi in axes]
    poses = []
    for f in grid_axes[0]:
        for r in grid_axes[1]:
            for l in grid_axes[2]:
                poses.append(HeadPose(f, r, l))
    poses = poses[:n]
    while len(poses) < n:
        poses.append(HeadPose.from_tuple(manifold.sample(rng)))
    return poses


def is_valid_success(result: PlanResult, manifold_muf: HeadPoseManifold) -> bool:
    """A planner success only counts if the user can attain the chosen pose."""
    return bool(
        result.success
        and result.chosen_pose is not None
        and manifold_muf.contains(result.chosen_pose.as_tuple())
    )


def evaluate_policies(
    scenario: TransferScenario,
    n_user_poses: int,
    seeds,
    policies=("Fixed", "Baseline", "MufInformed"),
) -> list:
    """Success rate and relative-angle stats per (policy, seed).

    Per seed, one shared set of user poses is drawn from the attainable
    manifold; each policy runs on every pose with its own derived stream.
    The success rate counts only attainable successes (chosen pose inside
    the user's manifold); the relative-angle statistics cover every planner
    success, since the angle measures the neck movement the policy demands
    whether or not the user can perform it.
    Returns rows as dicts matching the metrics CSV schema.
    """
    if n_user_poses < 1:
        raise SparcsError("n_user_poses must be >= 1")
    rows = []
    for seed in seeds:
        pose_rng = np.random.default_rng([int(seed), 982_451_653])
        users = grid_and_random_poses(scenario.manifold_muf, n_user_poses, pose_rng)
        for p_idx, name in enumerate(policies):
            angles = []
            wins = 0
            for u_idx, h_user in enumerate(users):
                rng = np.random.default_rng([int(seed), p_idx, u_idx])
                result = POLICIES[name](scenario.with_user(h_user), rng)
                if result.success:
                    angles.append(result.relative_angle)
                if is_valid_success(result, scenario.manifold_muf):
                    wins += 1
            rows.append(
                {
                    "policy": name,
                    "seed": int(seed),
                    "success_rate": wins / len(users),
                    "mean_rel_angle_rad": float(np.mean(angles)) if angles else math.nan,
                    "sd_rel_angle_rad": float(np.std(angles, ddof=0)) if angles else math.nan,
                }
            )
    return rows
