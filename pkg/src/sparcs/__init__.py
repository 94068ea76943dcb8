"""SPARCS workbench: caregiving-scenario building blocks, structured
workflows, bite-transfer planning, and bite-sequencing preference models."""

from .blocks import (
    BlockKind,
    BuildingBlock,
    BuildingBlockSet,
    HeadPoseManifold,
    Quantity,
    full_mobility_manifold,
    get_attribute,
    head_pose_manifold,
    parse_building_blocks,
    serialize_building_blocks,
    set_attribute,
)
from .hmm import (
    DiscreteHmm,
    EatingPreference,
    MealSpec,
    UserPrefProfile,
    baum_welch,
    evaluate_accuracy,
    forward_loglik,
    online_update,
    predict_next,
    random_policy,
    simulate_sequences,
    train_preference_model,
)
from .scenario import Scenario, list_scenarios, load_scenario
from .stats import kruskal_wallis
from .workflow import (
    Workflow,
    WorkflowInstance,
    WorkflowNode,
    diff_workflows,
    parse_workflow,
    run,
    serialize_workflow,
    step,
    substitute_subtree,
    validate_hierarchy,
)

__version__ = "0.1.0"

__all__ = [
    "BlockKind",
    "BuildingBlock",
    "BuildingBlockSet",
    "DiscreteHmm",
    "EatingPreference",
    "HeadPoseManifold",
    "MealSpec",
    "Quantity",
    "Scenario",
    "UserPrefProfile",
    "Workflow",
    "WorkflowInstance",
    "WorkflowNode",
    "baum_welch",
    "diff_workflows",
    "evaluate_accuracy",
    "forward_loglik",
    "full_mobility_manifold",
    "get_attribute",
    "head_pose_manifold",
    "kruskal_wallis",
    "list_scenarios",
    "load_scenario",
    "online_update",
    "parse_building_blocks",
    "parse_workflow",
    "predict_next",
    "random_policy",
    "run",
    "serialize_building_blocks",
    "serialize_workflow",
    "set_attribute",
    "simulate_sequences",
    "step",
    "substitute_subtree",
    "train_preference_model",
    "validate_hierarchy",
]
