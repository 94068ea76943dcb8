"""Bite-transfer planning: head-pose geometry, arm kinematics, collision
checking, and the three comparable transfer policies."""

from .geometry import HeadPose, HeadGeometry, relative_angle, tf_from_xyz_rpy
from .arm import ArmModel, IkFailure, forward_kinematics, inverse_kinematics
from .collision import Scene
from .planner import (
    PlanFailure,
    PlanResult,
    PoseOutsideManifold,
    TransferScenario,
    evaluate_policies,
    goal_pose,
    plan_trajectory,
    policy_baseline,
    policy_fixed,
    policy_muf_informed,
    sample_candidates,
)

__all__ = [
    "ArmModel",
    "HeadGeometry",
    "HeadPose",
    "IkFailure",
    "PlanFailure",
    "PlanResult",
    "PoseOutsideManifold",
    "Scene",
    "TransferScenario",
    "evaluate_policies",
    "forward_kinematics",
    "goal_pose",
    "inverse_kinematics",
    "plan_trajectory",
    "policy_baseline",
    "policy_fixed",
    "policy_muf_informed",
    "relative_angle",
    "sample_candidates",
    "tf_from_xyz_rpy",
]
