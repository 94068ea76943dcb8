"""End-to-end feeding demo: drives the robot workflow for a full meal with
stub skills, a seeded simulated user, the transfer planner, and the online
preference model.

Everything derives from (scenario, meal_seed), so a rerun reproduces the
trace byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .blocks import get_attribute
from .errors import SparcsError
from .hmm import (
    evaluate_accuracy,
    online_update,
    predict_next,
    simulate_sequences,
    train_preference_model,
)
from .planning import PlanResult, policy_fixed, policy_muf_informed
from .planning.geometry import HeadPose
from .scenario import Scenario
from .workflow import Status, WorkflowInstance, step


class DemoError(SparcsError):
    """Demo could not complete; carries the failing node id."""


@dataclass
class BiteOutcome:
    index: int
    item: str
    predicted: str
    intended: str
    policy: str
    relative_angle: float
    steps: int


@dataclass
class DemoResult:
    scenario_id: str
    meal_seed: int
    bites: list
    trace_lines: list
    ho_accuracy: float
    completed: bool
    failed_node: str | None = None

    @property
    def text(self) -> str:
        return "\n".join(self.trace_lines) + "\n"

    def summary(self) -> dict:
        return {
            "scenario": self.scenario_id,
            "meal_seed": self.meal_seed,
            "bites_completed": len(self.bites),
            "ho_accuracy": self.ho_accuracy,
            "mean_relative_angle_rad": float(
                np.mean([b.relative_angle for b in self.bites])
            ) if self.bites else float("nan"),
            "completed": self.completed,
            "failed_node": self.failed_node,
        }


class _SimulatedUser:
    """Seeded intent signals: flips blackboard facts after short delays."""

    def __init__(self, intent_signal: str, delay_range, rng):
        self.intent_signal = intent_signal
        self.rng = rng
        lo, hi = delay_range
        self.turn_delay = int(rng.integers(lo, hi + 1))
        self.mouth_delay = int(rng.integers(lo, hi + 1))

    def update(self, bb: dict) -> None:
        if self.intent_signal == "turn_toward_robot":
            if bb.get("robot.at_staging") and not bb.get("user.turned_toward_robot"):
                self.turn_delay -= 1
                if self.turn_delay <= 0:
                    bb["user.turned_toward_robot"] = True
            if bb.get("robot.at_mouth") and not bb.get("user.mouth_open"):
                self.mouth_delay -= 1
                if self.mouth_delay <= 0:
                    bb["user.mouth_open"] = True
        else:
            if bb.get("robot.at_staging") and not bb.get("user.mouth_open"):
                self.mouth_delay -= 1
                if self.mouth_delay <= 0:
                    bb["user.mouth_open"] = True


def _train_models(scenario: Scenario, meal_seed: int):
    demo_cfg = scenario.config["demo"]["hmm"]
    spec = scenario.meal_spec()
    profile = scenario.pref_profile()
    temperature = float(demo_cfg.get("sim_temperature", 0.5))

    sim_corpus = simulate_sequences(
        profile, spec, int(demo_cfg.get("n_sim_meals", 30)), temperature,
        np.random.default_rng([meal_seed, 23]),
    )
    hs = train_preference_model(
        sim_corpus,
        n_symbols=len(spec.items),
        symbols=spec.items,
        n_states=int(demo_cfg.get("n_states", 4)),
        restarts=int(demo_cfg.get("restarts", 3)),
        rng_seed=np.random.default_rng([meal_seed, 29]),
    )
    user_rng = np.random.default_rng([meal_seed, 11])
    user_meals = simulate_sequences(
        profile, spec, int(demo_cfg.get("n_user_meals", 6)) + 1, temperature, user_rng
    )
    observed, intended = user_meals[:-1], user_meals[-1]
    ho = online_update(hs, observed, float(demo_cfg.get("user_weight", 10.0)), sim_corpus)
    return spec, ho, intended


def run_feeding_demo(scenario: Scenario, meal_seed: int) -> DemoResult:
    """Run a full meal (items x bites) through the robot workflow."""
    if scenario.workflow_robot is None:
        raise DemoError(f"{scenario.scenario_id}: no robot workflow")
    if not scenario.is_feeding:
        raise DemoError(f"{scenario.scenario_id}: not a feeding scenario")

    spec, ho_model, intended_meal = _train_models(scenario, meal_seed)
    base = scenario.transfer_scenario()
    present_tf = scenario.present_transform()
    demo_cfg = scenario.config["demo"]
    delay_range = demo_cfg.get("intent_delay_steps", [1, 3])
    max_steps = int(demo_cfg.get("max_steps_per_bite", 60))
    use_fixed_side = demo_cfg.get("transfer_policy") == "fixed_side"
    intent_signal = get_attribute(scenario.blocks.user_behavior, "Bite Intent Signal") or "mouth_open"

    remaining = {i: spec.bites_per_item for i in range(len(spec.items))}
    eaten = []
    bites = []
    lines = [f"demo {scenario.scenario_id} seed {meal_seed}"]
    root = scenario.workflow_robot.root

    for bite_index in range(spec.length):
        h_user = HeadPose.from_tuple(
            base.manifold_muf.sample(np.random.default_rng([meal_seed, 31, bite_index]))
        )
        bite_scn = base.with_user(h_user)
        plan_rng = np.random.default_rng([meal_seed, 51, bite_index])
        user = _SimulatedUser(
            intent_signal, delay_range, np.random.default_rng([meal_seed, 41, bite_index])
        )
        state = {"item": None, "result": None, "q_now": None}

        def pick_item(bb, _state=state):
            idx = predict_next(ho_model, list(eaten), dict(remaining))
            _state["item"] = idx
            bb["food.item"] = spec.items[idx]
            bb["food.on_fork"] = True
            return bb, True

        def transfer(bb, _state=state, _scn=bite_scn, _rng=plan_rng):
            result = (
                policy_fixed(_scn, _rng) if use_fixed_side else policy_muf_informed(_scn, _rng)
            )
            _state["result"] = result
            if result.success:
                _state["q_now"] = result.trajectory[-1]
                bb["transfer.success"] = True
            return bb, result.success

        def present(bb, _state=state, _scn=bite_scn, _rng=plan_rng):
            scn = _scn if present_tf is None else replace(_scn, transfer=present_tf)
            result = policy_muf_informed(scn, _rng)
            _state["result"] = result
            if result.success:
                _state["q_now"] = result.trajectory[-1]
                bb["robot.at_mouth"] = True
            return bb, result.success

        def insert(bb, _state=state, _scn=bite_scn, _rng=plan_rng):
            from .planning.planner import PlanFailure, goal_pose, plan_trajectory

            prior = _state["result"]
            if prior is None or not prior.success:
                return bb, False
            x_goal = goal_pose(prior.chosen_pose, _scn.transfer, _scn.head)
            try:
                path = plan_trajectory(
                    _scn.arm, _state["q_now"], x_goal, _scn.scene, _scn.params, _rng
                )
            except PlanFailure:
                return bb, False
            _state["result"] = PlanResult(
                policy="MufInformed",
                success=True,
                chosen_pose=prior.chosen_pose,
                relative_angle=prior.relative_angle,
                trajectory=path,
            )
            bb["transfer.success"] = True
            return bb, True

        handlers = {
            "detect_plate_items": lambda bb: ({**bb, "plate.visible": True}, True),
            "move_above_plate": lambda bb: ({**bb, "robot.above_plate": True}, True),
            "skewer_item": pick_item,
            "move_to_staging": lambda bb: ({**bb, "robot.at_staging": True}, True),
            "detect_mouth_open": lambda bb: (bb, True),
            "detect_turn_toward_robot": lambda bb: (bb, True),
            "estimate_head_pose": lambda bb: ({**bb, "user.head_pose_known": True}, True),
            "transfer_bite": transfer,
            "transfer_bite_fixed": transfer,
            "present_bite": present,
            "insert_bite": insert,
            "confirm_bite_taken": lambda bb: ({**bb, "bite.taken": True}, True),
            "retract_arm": lambda bb: ({**bb, "bite.complete": True, "robot.retracted": True}, True),
        }

        bb = {
            "bite.index": bite_index,
            "plate.visible": False,
            "food.on_fork": False,
            "robot.at_staging": False,
            "robot.at_mouth": False,
            "user.mouth_open": False,
            "user.turned_toward_robot": False,
            "user.head_pose_known": False,
            "transfer.success": False,
            "bite.taken": False,
            "bite.complete": False,
        }
        instance = WorkflowInstance.fresh(root)
        while not instance.terminal and instance.step_count < max_steps:
            instance, bb = step(instance, bb, handlers)
            user.update(bb)

        for ev in instance.trace:
            lines.append(f"bite {bite_index} step {ev.step} {ev.node_id} {ev.event}")

        if instance.statuses[root.id] is not Status.DONE:
            failed_leaves = [
                node.id for _, node in root.walk()
                if instance.statuses[node.id] is Status.FAILED
                and not any(instance.statuses[c.id] is Status.FAILED for c in node.children)
            ]
            failed = failed_leaves[0] if failed_leaves else root.id
            lines.append(f"bite {bite_index} FAILED at {failed}")
            return DemoResult(
                scenario.scenario_id, meal_seed, bites, lines,
                ho_accuracy=float("nan"), completed=False, failed_node=failed,
            )

        item_idx = state["item"]
        result = state["result"]
        eaten.append(item_idx)
        remaining[item_idx] -= 1
        outcome = BiteOutcome(
            index=bite_index,
            item=spec.items[item_idx],
            predicted=spec.items[item_idx],
            intended=spec.items[intended_meal[bite_index]],
            policy=result.policy,
            relative_angle=float(result.relative_angle),
            steps=instance.step_count,
        )
        bites.append(outcome)
        lines.append(
            f"bite {bite_index} done item={outcome.item} intended={outcome.intended} "
            f"policy={outcome.policy} angle={outcome.relative_angle:.4f} steps={outcome.steps}"
        )

    accuracy = evaluate_accuracy(
        lambda prefix, rem: predict_next(ho_model, prefix, rem), intended_meal
    )
    lines.append(f"meal complete bites={len(bites)} ho_accuracy={accuracy:.4f}")
    return DemoResult(scenario.scenario_id, meal_seed, bites, lines, accuracy, True)
