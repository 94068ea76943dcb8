"""Loading bundled or user-provided scenario directories.

A scenario directory holds canonical JSON documents: ``blocks.json`` and
``config.json`` always, plus ``workflow_human.json`` and/or
``workflow_robot.json``. The bundled root ships inside the package and can
be overridden with the SPARCS_DATA_DIR environment variable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import canon
from .blocks import (
    BuildingBlockSet,
    full_mobility_manifold,
    head_pose_manifold,
    parse_building_blocks,
)
from .errors import SparcsError
from .hmm import EatingPreference, MealSpec, UserPrefProfile
from .planning import ArmModel, HeadGeometry, HeadPose, Scene, TransferScenario
from .planning.geometry import tf_from_xyz_rpy
from .planning.planner import PlannerParams
from .workflow import Workflow, parse_workflow


class ScenarioLoadError(SparcsError):
    """A scenario document is missing or invalid; message names the file."""


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    path: Path
    blocks: BuildingBlockSet
    workflow_human: Workflow | None
    workflow_robot: Workflow | None
    config: dict

    @property
    def is_feeding(self) -> bool:
        return "planner" in self.config and "meal" in self.config

    def meal_spec(self) -> MealSpec:
        meal = self._require("meal")
        return MealSpec(tuple(meal["items"]), int(meal["bites_per_item"]))

    def pref_profile(self) -> UserPrefProfile:
        pref = self._require("preference")
        return UserPrefProfile(
            dict(pref["affinity"]), EatingPreference(pref["eating_preference"])
        )

    def _require(self, key: str):
        if key not in self.config:
            raise ScenarioLoadError(
                f"{self.path / 'config.json'}: missing {key!r} section"
            )
        return self.config[key]

    def transfer_scenario(self, arm_name: str | None = None) -> TransferScenario:
        """Planner inputs for this scenario; h_user starts at neutral."""
        cfg = self._require("planner")
        arm_name = arm_name or cfg["active_arm"]
        if arm_name not in cfg["arms"]:
            raise ScenarioLoadError(f"unknown arm {arm_name!r} in planner config")
        arm_cfg = cfg["arms"][arm_name]
        arm = ArmModel.from_config(arm_cfg)
        return TransferScenario(
            arm=arm,
            scene=Scene.from_config(cfg["obstacles"]),
            head=HeadGeometry.from_config(cfg["head"]),
            transfer=tf_from_xyz_rpy(cfg["transfer"]["xyz"], cfg["transfer"]["rpy"]),
            manifold_muf=head_pose_manifold(self.blocks.user_functionality),
            manifold_all=full_mobility_manifold(),
            h_fixed=HeadPose.from_tuple(cfg["h_fixed"]),
            h_user=HeadPose.neutral(),
            q_start=np.asarray(arm_cfg["q_start"], dtype=float),
            params=PlannerParams.from_config(cfg.get("params", {})),
        )

    def present_transform(self):
        cfg = self._require("planner")
        if "transfer_present" not in cfg:
            return None
        t = cfg["transfer_present"]
        return tf_from_xyz_rpy(t["xyz"], t["rpy"])


def bundled_data_dir() -> Path:
    override = os.environ.get("SPARCS_DATA_DIR")
    if override:
        return Path(override)
    return Path(__file__).parent / "data"


def scenario_root() -> Path:
    return bundled_data_dir() / "scenarios"


def list_scenarios(root: Path | None = None) -> list:
    root = root or scenario_root()
    if not root.is_dir():
        return []
    return sorted(d.name for d in root.iterdir() if d.is_dir())


def _read(path: Path) -> str:
    if not path.is_file():
        raise ScenarioLoadError(f"missing scenario document: {path}")
    return path.read_text(encoding="utf-8")


def load_scenario(path: str | Path) -> Scenario:
    """Load and validate one scenario directory."""
    path = Path(path)
    if not path.is_dir():
        candidate = scenario_root() / str(path)
        if candidate.is_dir():
            path = candidate
        else:
            raise ScenarioLoadError(f"scenario directory not found: {path}")

    try:
        blocks = parse_building_blocks(_read(path / "blocks.json"))
    except SparcsError as exc:
        raise ScenarioLoadError(f"{path / 'blocks.json'}: {exc}") from exc

    workflows = {}
    for which, target in (("workflow_human.json", "human"), ("workflow_robot.json", "robot")):
        doc_path = path / which
        if not doc_path.is_file():
            workflows[target] = None
            continue
        try:
            wf = parse_workflow(_read(doc_path))
        except SparcsError as exc:
            raise ScenarioLoadError(f"{doc_path}: {exc}") from exc
        if wf.target != target:
            raise ScenarioLoadError(f"{doc_path}: expected target {target!r}, got {wf.target!r}")
        workflows[target] = wf
    if workflows["human"] is None and workflows["robot"] is None:
        raise ScenarioLoadError(f"missing scenario document: {path / 'workflow_human.json'}")

    try:
        config = canon.loads(_read(path / "config.json"))
    except ValueError as exc:
        raise ScenarioLoadError(f"{path / 'config.json'}: {exc}") from exc

    return Scenario(
        scenario_id=blocks.scenario_id,
        path=path,
        blocks=blocks,
        workflow_human=workflows["human"],
        workflow_robot=workflows["robot"],
        config=config,
    )
