"""Programmatic definitions of every bundled scenario.

The shipped scenario files under ``sparcs/data/scenarios`` are generated
from these builders with the canonical serializers, which is what makes
the parse/serialize fixpoint trivially hold for the bundle. Six care
recipients and their assistance needs give 19 catalogue scenarios; the
three robot-feeding scenarios additionally carry robot workflows and
planner configs, and one social-dining variant ships as a robot-only
extra.

Numeric ROM values are workbench defaults chosen to match each
recipient's described mobility, not clinical measurements.
"""

from __future__ import annotations

import math
from pathlib import Path

from . import canon
from .blocks import BlockKind, BuildingBlock, BuildingBlockSet, Quantity, serialize_building_blocks
from .workflow import Workflow, WorkflowNode, Level, serialize_workflow
from .conditions import parse_condition

DEG = math.pi / 180.0

FOOD_ITEMS = ("banana", "kiwi", "grape", "carrot")
BITES_PER_ITEM = 3

# recipient -> (cause of disability, ADL need flags)
RECIPIENTS = {
    "morgan": ("Brainstem Stroke", "FDBT"),
    "jose": ("Spinal Cord Injury (C1-C3)", "FDBT"),
    "natalia": ("Spinal Cord Injury (C4-C5)", "FDBT"),
    "daniel": ("Spinal Cord Injury (C6-C7)", "DT"),
    "kim": ("Cerebral Palsy", "DBT"),
    "karan": ("Left-side Hemiplegia", "DT"),
}

ADL_NAMES = {"F": "feeding", "D": "dressing", "B": "bathing", "T": "transferring"}

# active/passive neck ROM per recipient, degrees:
# (flexion, extension, rot left, rot right, lat left, lat right)
NECK_ROM = {
    "morgan": ((35, 30, 45, 45, 25, 25), (45, 40, 55, 55, 35, 35)),
    "jose": ((8, 5, 15, 15, 5, 5), (15, 12, 25, 25, 12, 12)),
    "natalia": ((20, 15, 30, 30, 15, 15), (30, 25, 40, 40, 25, 25)),
    "daniel": ((45, 50, 70, 70, 40, 40), (55, 60, 80, 80, 45, 45)),
    "kim": ((30, 25, 40, 35, 20, 20), (45, 40, 55, 50, 35, 35)),
    "karan": ((40, 45, 60, 70, 35, 40), (50, 55, 70, 80, 45, 45)),
}

MMT_GRADES = {
    "morgan": {"Neck Flexors": 2, "Shoulder Abductors": 1, "Elbow Flexors": 1, "Grip": 0},
    "jose": {"Neck Flexors": 1, "Shoulder Abductors": 0, "Elbow Flexors": 0, "Grip": 0},
    "natalia": {"Neck Flexors": 3, "Shoulder Abductors": 1, "Elbow Flexors": 0, "Grip": 0},
    "daniel": {"Neck Flexors": 5, "Shoulder Abductors": 4, "Elbow Flexors": 4, "Grip": 2},
    "kim": {"Neck Flexors": 3, "Shoulder Abductors": 3, "Elbow Flexors": 2, "Grip": 2},
    "karan": {"Neck Flexors": 4, "Shoulder Abductors": 2, "Elbow Flexors": 1, "Grip": 4},
}

BODY = {
    "morgan": (188, 92, 28),
    "jose": (175, 64, 29),
    "natalia": (164, 58, 30),
    "daniel": (180, 76, 30),
    "kim": (158, 52, 27),
    "karan": (172, 80, 29),
}


def _q(value, unit="unitless"):
    return Quantity(value, unit)


def _rom_entries(rom6, mode):
    flex, ext, rot_l, rot_r, lat_l, lat_r = rom6
    return {
        f"{mode} ROM Neck Flexion": _q(flex, "deg"),
        f"{mode} ROM Neck Extension": _q(ext, "deg"),
        f"{mode} ROM Neck RotationLeft": _q(rot_l, "deg"),
        f"{mode} ROM Neck RotationRight": _q(rot_r, "deg"),
        f"{mode} ROM Neck LateralFlexionLeft": _q(lat_l, "deg"),
        f"{mode} ROM Neck LateralFlexionRight": _q(lat_r, "deg"),
    }


def user_functionality_entries(recipient: str) -> dict:
    cause, _ = RECIPIENTS[recipient]
    height, weight, mmse = BODY[recipient]
    active, passive = NECK_ROM[recipient]
    entries = {
        "Cause Of Disability": cause,
        "Height": _q(height, "cm"),
        "Weight": _q(weight, "kg"),
    }
    entries.update(_rom_entries(active, "Active"))
    entries.update(_rom_entries(passive, "Passive"))
    for group, grade in MMT_GRADES[recipient].items():
        entries[f"MMT {group}"] = _q(grade, "grade")
    entries["MMSE"] = _q(mmse)
    return entries


def user_behavior_entries(recipient: str, adl: str, variant: str | None = None) -> dict:
    entries = {"Communication": "verbal" if recipient != "morgan" else "nonverbal"}
    if adl != "feeding":
        entries["Prefers Slow Movements"] = True
        return entries
    if recipient == "natalia":
        entries.update(
            {
                "Bite Intent Signal": "mouth_open",
                "Autonomy Preference": "full_autonomy",
                "Attention Focus": "television" if variant != "social" else "conversation",
                "Prefers Minimal Neck Movement": True,
                "Expects Learned Bite Ordering": True,
            }
        )
        if variant == "social":
            entries["Preferred Transfer Side"] = "right"
    elif recipient == "jose":
        entries.update(
            {
                "Bite Intent Signal": "turn_toward_robot",
                "Consent Signal": "mouth_open",
                "Bite Placement": "inside_mouth_cavity",
                "Placement Depth Fraction": _q(0.33),
                "Expects Learned Bite Ordering": True,
            }
        )
    else:
        entries.update(
            {
                "Bite Intent Signal": "turn_toward_caregiver",
                "Solid Food Placement": "lower left molar" if recipient == "morgan" else "center",
            }
        )
    return entries


def environment_entries(adl: str, variant: str | None = None) -> dict:
    if adl == "feeding":
        entries = {
            "Setting": "social_dining" if variant == "social" else "living_room_tv",
            "Seating": "wheelchair at dining table",
            "Plate Contents": "solid bite-sized food items",
            "Table Height": _q(72, "cm"),
        }
        return entries
    if adl == "dressing":
        return {"Setting": "bedroom", "Surface": "bed"}
    if adl == "bathing":
        return {"Setting": "bathroom", "Surface": "shower chair", "Space": "small"}
    return {"Setting": "bedroom", "Transfer Between": "bed and wheelchair"}


def robot_entries(dof: int = 6) -> dict:
    return {
        "Arm": f"Kinova Gen3 {dof}-DoF",
        "DoF": _q(dof),
        "Gripper": "Robotiq 2F-85",
        "End Effector Tool": "custom fork with force-torque sensor",
        "Mount": "wheelchair right armrest",
    }


def caregiver_blocks() -> dict:
    return {
        BlockKind.CAREGIVER_FUNCTIONALITY: {
            "Height": _q(163, "cm"),
            "Lifting Capacity": "limited",
        },
        BlockKind.CAREGIVER_BEHAVIOR: {
            "Assistance Style": "verbal prompts before contact",
        },
    }


def build_blocks(scenario_id: str, recipient: str, adl: str, variant: str | None = None) -> BuildingBlockSet:
    blocks = {
        BlockKind.USER_FUNCTIONALITY: BuildingBlock(
            BlockKind.USER_FUNCTIONALITY, user_functionality_entries(recipient)
        ),
        BlockKind.USER_BEHAVIOR: BuildingBlock(
            BlockKind.USER_BEHAVIOR, user_behavior_entries(recipient, adl, variant)
        ),
        BlockKind.ENVIRONMENT: BuildingBlock(
            BlockKind.ENVIRONMENT, environment_entries(adl, variant)
        ),
        BlockKind.ROBOT: BuildingBlock(BlockKind.ROBOT, robot_entries()),
    }
    if recipient == "morgan":
        for kind, entries in caregiver_blocks().items():
            blocks[kind] = BuildingBlock(kind, entries)
    return BuildingBlockSet(scenario_id, blocks)


# --------------------------------------------------------------------------
# workflows


def _node(nid, name, level, pre=None, post=None, children=(), concurrent=False, handler=None):
    return WorkflowNode(
        id=nid,
        name=name,
        level=level,
        pre=parse_condition(pre) if pre else parse_condition("true"),
        post=parse_condition(post) if post else parse_condition("true"),
        children=tuple(children),
        concurrent=concurrent,
        handler_ref=handler,
    )


def _task(nid, name, pre=None, post=None):
    return _node(nid, name, Level.TASK, pre, post)


def human_feeding_workflow(recipient: str, prefix: str) -> Workflow:
    transfer_tasks = [_task(f"{prefix}_bt_ready", "Check User Readiness")]
    if recipient == "jose":
        transfer_tasks.append(_task(f"{prefix}_bt_turn", "Wait For Turn Toward Caregiver"))
    if recipient == "morgan":
        transfer_tasks.append(_task(f"{prefix}_bt_molar", "Place Food At Lower Left Molar"))
    else:
        transfer_tasks.append(_task(f"{prefix}_bt_bring", "Bring Food To Mouth"))
    transfer_tasks.append(_task(f"{prefix}_bt_wait", "Wait For Bite Off Fork"))
    root = _node(
        f"{prefix}_feeding",
        "Feeding",
        Level.ACTIVITY,
        children=[
            _node(
                f"{prefix}_prep",
                "Meal Preparation",
                Level.COMPOSITE_TASK,
                children=[
                    _task(f"{prefix}_prep_seat", "Position User At Table"),
                    _task(f"{prefix}_prep_food", "Prepare Bite Sized Food"),
                ],
            ),
            _node(
                f"{prefix}_acq",
                "Bite Acquisition",
                Level.COMPOSITE_TASK,
                children=[
                    _task(f"{prefix}_acq_select", "Select Food Item"),
                    _task(f"{prefix}_acq_load", "Load Fork"),
                ],
            ),
            _node(
                f"{prefix}_bt",
                "Bite Transfer",
                Level.COMPOSITE_TASK,
                children=transfer_tasks,
            ),
        ],
    )
    return Workflow("human", root)


def human_dressing_workflow(recipient: str, prefix: str) -> Workflow:
    prepare = [_task(f"{prefix}_prep_select", "Select Garments"),
               _task(f"{prefix}_prep_lay", "Lay Out Clothing")]
    if recipient == "kim":
        prepare.append(_task(f"{prefix}_prep_tone", "Manage Tone And Positioning"))
    upper = []
    if recipient == "karan":
        upper.append(_task(f"{prefix}_up_affected", "Dress Affected Side First"))
    upper += [_task(f"{prefix}_up_sleeves", "Thread Arms Through Sleeves"),
              _task(f"{prefix}_up_pull", "Pull Shirt Down")]
    lower = [_task(f"{prefix}_low_lift", "Lift User Leg"),
             _task(f"{prefix}_low_slide", "Slide Pant Leg On"),
             _task(f"{prefix}_low_fasten", "Fasten Waistband")]
    if recipient == "morgan":
        lower.insert(0, _task(f"{prefix}_low_weight", "Support Full Limb Weight"))
    root = _node(
        f"{prefix}_dressing",
        "Dressing",
        Level.ACTIVITY,
        children=[
            _node(f"{prefix}_prep", "Prepare Clothing", Level.COMPOSITE_TASK, children=prepare),
            _node(f"{prefix}_upper", "Dress Upper Body", Level.COMPOSITE_TASK, children=upper),
            _node(f"{prefix}_lower", "Dress Lower Body", Level.COMPOSITE_TASK, children=lower),
        ],
    )
    return Workflow("human", root)


def human_bathing_workflow(recipient: str, prefix: str) -> Workflow:
    wash = [_task(f"{prefix}_wash_up", "Wash Upper Body"),
            _task(f"{prefix}_wash_lift", "Lift User Leg"),
            _task(f"{prefix}_wash_low", "Wash Lower Body"),
            _task(f"{prefix}_wash_dry", "Dry And Moisturize")]
    if recipient == "morgan":
        wash.insert(0, _task(f"{prefix}_wash_spasm", "Monitor For Spasms"))
    if recipient == "kim":
        wash.insert(0, _task(f"{prefix}_wash_posture", "Maintain Stable Seating Posture"))
    root = _node(
        f"{prefix}_bathing",
        "Bathing",
        Level.ACTIVITY,
        children=[
            _node(
                f"{prefix}_prep",
                "Prepare Bath",
                Level.COMPOSITE_TASK,
                children=[
                    _task(f"{prefix}_prep_temp", "Check Water Temperature"),
                    _task(f"{prefix}_prep_seat", "Position User In Shower Chair"),
                ],
            ),
            # two hands at once: shampoo while shielding the eyes
            _node(
                f"{prefix}_hair",
                "Hair Care",
                Level.COMPOSITE_TASK,
                concurrent=True,
                children=[
                    _task(f"{prefix}_hair_shampoo", "Apply Shampoo"),
                    _task(f"{prefix}_hair_shield", "Shield Eyes From Water"),
                ],
            ),
            _node(f"{prefix}_wash", "Wash And Dry", Level.COMPOSITE_TASK, children=wash),
        ],
    )
    return Workflow("human", root)


def human_transferring_workflow(recipient: str, prefix: str) -> Workflow:
    prep = [_task(f"{prefix}_prep_chair", "Position Wheelchair And Lock Brakes")]
    if recipient == "daniel":
        prep.append(_task(f"{prefix}_prep_board", "Set Up Sliding Board"))
    else:
        prep.append(_task(f"{prefix}_prep_sling", "Attach Sling To Lift"))
    execute = [_task(f"{prefix}_ex_raise", "Raise User With Lift"),
               _task(f"{prefix}_ex_pivot", "Pivot To Target"),
               _task(f"{prefix}_ex_lower", "Lower And Position")]
    if recipient == "daniel":
        execute = [_task(f"{prefix}_ex_scoot", "Assist Scoot Across Board"),
                   _task(f"{prefix}_ex_lower", "Lower And Position")]
    if recipient == "karan":
        execute.insert(1, _task(f"{prefix}_ex_guard", "Guard Weak Side During Pivot"))
    root = _node(
        f"{prefix}_transferring",
        "Transferring",
        Level.ACTIVITY,
        children=[
            _node(f"{prefix}_prep", "Prepare Transfer", Level.COMPOSITE_TASK, children=prep),
            _node(f"{prefix}_ex", "Execute Transfer", Level.COMPOSITE_TASK, children=execute),
        ],
    )
    return Workflow("human", root)


HUMAN_BUILDERS = {
    "feeding": human_feeding_workflow,
    "dressing": human_dressing_workflow,
    "bathing": human_bathing_workflow,
    "transferring": human_transferring_workflow,
}


def _ms(nid, name, handler, pre=None, post=None):
    return _node(nid, name, Level.MOTOR_SKILL, pre, post, handler=handler)


def _ps(nid, name, handler, pre=None, post=None):
    return _node(nid, name, Level.PERCEPTUAL_SKILL, pre, post, handler=handler)


def _acquisition_subtree(prefix: str) -> WorkflowNode:
    return _node(
        f"{prefix}_acq",
        "Bite Acquisition",
        Level.COMPOSITE_TASK,
        post="food.on_fork == true",
        children=[
            _node(
                f"{prefix}_acq_locate",
                "Locate Food",
                Level.TASK,
                post="plate.visible == true",
                children=[
                    _node(
                        f"{prefix}_acq_percv",
                        "Perceive Plate",
                        Level.COMPOSITE_SKILL,
                        children=[
                            _ps(f"{prefix}_acq_detect", "Detect Plate Items",
                                "detect_plate_items", post="plate.visible == true"),
                        ],
                    ),
                ],
            ),
            _node(
                f"{prefix}_acq_skewer",
                "Skewer Item",
                Level.TASK,
                pre="plate.visible == true",
                post="food.on_fork == true",
                children=[
                    _node(
                        f"{prefix}_acq_cs",
                        "Acquire Item",
                        Level.COMPOSITE_SKILL,
                        children=[
                            _ms(f"{prefix}_acq_move", "Move Above Plate",
                                "move_above_plate", post="robot.above_plate == true"),
                            _ms(f"{prefix}_acq_skw", "Skewer Food Item", "skewer_item",
                                pre="robot.above_plate == true", post="food.on_fork == true"),
                        ],
                    ),
                ],
            ),
        ],
    )


def _staging_task(prefix: str) -> WorkflowNode:
    return _node(
        f"{prefix}_bt_stage",
        "Move To Staging",
        Level.TASK,
        post="robot.at_staging == true",
        children=[
            _node(
                f"{prefix}_bt_stage_cs",
                "Approach User",
                Level.COMPOSITE_SKILL,
                children=[
                    _ms(f"{prefix}_bt_stage_ms", "Move To Staging Pose",
                        "move_to_staging", post="robot.at_staging == true"),
                ],
            ),
        ],
    )


def _await_intent_task(prefix: str) -> WorkflowNode:
    return _node(
        f"{prefix}_bt_intent",
        "Await Intent",
        Level.TASK,
        pre="robot.at_staging == true",
        post="user.mouth_open == true",
        children=[
            _node(
                f"{prefix}_bt_intent_cs",
                "Watch For Intent",
                Level.COMPOSITE_SKILL,
                children=[
                    _ps(f"{prefix}_bt_intent_ps", "Detect Mouth Open", "detect_mouth_open",
                        pre="user.mouth_open == true", post="user.mouth_open == true"),
                ],
            ),
        ],
    )


def _complete_bite_task(prefix: str) -> WorkflowNode:
    return _node(
        f"{prefix}_bt_done",
        "Complete Bite",
        Level.TASK,
        pre="transfer.success == true",
        post="bite.complete == true",
        children=[
            _node(
                f"{prefix}_bt_done_cs",
                "Finish Bite",
                Level.COMPOSITE_SKILL,
                children=[
                    _ps(f"{prefix}_bt_conf", "Confirm Bite Taken", "confirm_bite_taken",
                        post="bite.taken == true"),
                    _ms(f"{prefix}_bt_retract", "Retract Arm", "retract_arm",
                        pre="bite.taken == true", post="bite.complete == true"),
                ],
            ),
        ],
    )


def robot_feeding_workflow_natalia(prefix: str = "nat") -> Workflow:
    transfer = _node(
        f"{prefix}_bt",
        "Bite Transfer",
        Level.COMPOSITE_TASK,
        pre="food.on_fork == true",
        post="bite.complete == true",
        children=[
            _staging_task(prefix),
            _await_intent_task(prefix),
            _node(
                f"{prefix}_bt_move",
                "Transfer To Mouth",
                Level.TASK,
                pre="user.mouth_open == true",
                post="transfer.success == true",
                children=[
                    _node(
                        f"{prefix}_bt_move_cs",
                        "Plan And Move",
                        Level.COMPOSITE_SKILL,
                        children=[
                            _ps(f"{prefix}_bt_move_head", "Estimate Head Pose",
                                "estimate_head_pose", post="user.head_pose_known == true"),
                            _ms(f"{prefix}_bt_move_ms", "Move Fork To Mouth", "transfer_bite",
                                pre="user.head_pose_known == true",
                                post="transfer.success == true"),
                        ],
                    ),
                ],
            ),
            _complete_bite_task(prefix),
        ],
    )
    root = _node(
        f"{prefix}_feeding",
        "Feeding",
        Level.ACTIVITY,
        children=[_acquisition_subtree(prefix), transfer],
    )
    return Workflow("robot", root)


def robot_feeding_workflow_jose(prefix: str = "jos") -> Workflow:
    transfer = _node(
        f"{prefix}_bt",
        "Bite Transfer",
        Level.COMPOSITE_TASK,
        pre="food.on_fork == true",
        post="bite.complete == true",
        children=[
            _staging_task(prefix),
            _node(
                f"{prefix}_bt_turn",
                "Await Turn Toward Robot",
                Level.TASK,
                pre="robot.at_staging == true",
                post="user.turned_toward_robot == true",
                children=[
                    _node(
                        f"{prefix}_bt_turn_cs",
                        "Watch For Intent",
                        Level.COMPOSITE_SKILL,
                        children=[
                            _ps(f"{prefix}_bt_turn_ps", "Detect Turn Toward Robot",
                                "detect_turn_toward_robot",
                                pre="user.turned_toward_robot == true",
                                post="user.turned_toward_robot == true"),
                        ],
                    ),
                ],
            ),
            _node(
                f"{prefix}_bt_present",
                "Present Food At Mouth",
                Level.TASK,
                pre="user.turned_toward_robot == true",
                post="robot.at_mouth == true",
                children=[
                    _node(
                        f"{prefix}_bt_present_cs",
                        "Plan And Move",
                        Level.COMPOSITE_SKILL,
                        children=[
                            _ps(f"{prefix}_bt_present_head", "Estimate Head Pose",
                                "estimate_head_pose", post="user.head_pose_known == true"),
                            _ms(f"{prefix}_bt_present_ms", "Move Fork To Mouth Front",
                                "present_bite", pre="user.head_pose_known == true",
                                post="robot.at_mouth == true"),
                        ],
                    ),
                ],
            ),
            _node(
                f"{prefix}_bt_consent",
                "Await Consent",
                Level.TASK,
                pre="robot.at_mouth == true",
                post="user.mouth_open == true",
                children=[
                    _node(
                        f"{prefix}_bt_consent_cs",
                        "Watch For Consent",
                        Level.COMPOSITE_SKILL,
                        children=[
                            _ps(f"{prefix}_bt_consent_ps", "Detect Mouth Open",
                                "detect_mouth_open", pre="user.mouth_open == true",
                                post="user.mouth_open == true"),
                        ],
                    ),
                ],
            ),
            _node(
                f"{prefix}_bt_insert",
                "Insert Bite",
                Level.TASK,
                pre="user.mouth_open == true",
                post="transfer.success == true",
                children=[
                    _node(
                        f"{prefix}_bt_insert_cs",
                        "Place Inside Mouth",
                        Level.COMPOSITE_SKILL,
                        children=[
                            _ms(f"{prefix}_bt_insert_ms", "Place Food In Mouth", "insert_bite",
                                post="transfer.success == true"),
                        ],
                    ),
                ],
            ),
            _node(
                f"{prefix}_bt_leave",
                "Retract Leaving Food",
                Level.TASK,
                pre="transfer.success == true",
                post="bite.complete == true",
                children=[
                    _node(
                        f"{prefix}_bt_leave_cs",
                        "Finish Bite",
                        Level.COMPOSITE_SKILL,
                        children=[
                            _ms(f"{prefix}_bt_leave_ms", "Retract Arm", "retract_arm",
                                post="bite.complete == true"),
                        ],
                    ),
                ],
            ),
        ],
    )
    root = _node(
        f"{prefix}_feeding",
        "Feeding",
        Level.ACTIVITY,
        children=[_acquisition_subtree(prefix), transfer],
    )
    return Workflow("robot", root)


def robot_feeding_workflow_social(prefix: str = "soc") -> Workflow:
    transfer = _node(
        f"{prefix}_bt",
        "Bite Transfer",
        Level.COMPOSITE_TASK,
        pre="food.on_fork == true",
        post="bite.complete == true",
        children=[
            _staging_task(prefix),
            _await_intent_task(prefix),
            _node(
                f"{prefix}_bt_side",
                "Transfer To Side Position",
                Level.TASK,
                pre="user.mouth_open == true",
                post="transfer.success == true",
                children=[
                    _node(
                        f"{prefix}_bt_side_cs",
                        "Plan And Move",
                        Level.COMPOSITE_SKILL,
                        children=[
                            _ms(f"{prefix}_bt_side_ms", "Move Fork To Side Pose",
                                "transfer_bite_fixed", post="transfer.success == true"),
                        ],
                    ),
                ],
            ),
            _complete_bite_task(prefix),
        ],
    )
    root = _node(
        f"{prefix}_feeding",
        "Feeding",
        Level.ACTIVITY,
        children=[_acquisition_subtree(prefix), transfer],
    )
    return Workflow("robot", root)


# --------------------------------------------------------------------------
# planner configs


def arm_6dof_config() -> dict:
    return {
        "name": "gen3_6dof",
        "display_name": "Kinova Gen3 6-DoF",
        "base_xyz": [0.34, 0.0, 0.76],
        "joints": [
            {"offset": [0, 0, 0.12], "axis": [0, 0, 1], "limits": [-3.1, 3.1]},
            {"offset": [0, 0, 0.06], "axis": [0, 1, 0], "limits": [-2.4, 2.4]},
            {"offset": [0, 0, 0.36], "axis": [0, 1, 0], "limits": [-2.8, 2.8]},
            {"offset": [0, 0, 0.32], "axis": [0, 0, 1], "limits": [-3.1, 3.1]},
            {"offset": [0, 0, 0.06], "axis": [0, 1, 0], "limits": [-2.8, 2.8]},
            {"offset": [0, 0, 0.05], "axis": [0, 0, 1], "limits": [-3.1, 3.1]},
        ],
        "tool_xyz": [0, 0, 0.14],
        "capsules": [
            {"frame": 1, "p0": [0, 0, -0.06], "p1": [0, 0, 0.05], "radius": 0.055},
            {"frame": 2, "p0": [0, 0, 0.02], "p1": [0, 0, 0.34], "radius": 0.055},
            {"frame": 3, "p0": [0, 0, 0.02], "p1": [0, 0, 0.30], "radius": 0.05},
            {"frame": 4, "p0": [0, 0, 0.0], "p1": [0, 0, 0.05], "radius": 0.045},
            {"frame": 5, "p0": [0, 0, 0.0], "p1": [0, 0, 0.04], "radius": 0.045},
            {"frame": 6, "p0": [0, 0, 0.0], "p1": [0, 0, 0.07], "radius": 0.04},
            {"frame": 6, "p0": [0, 0, 0.07], "p1": [0, 0, 0.14], "radius": 0.01},
        ],
        "q_start": [1.6303, 0.5026, 1.672, 0.8307, 2.3396, -0.9155],
    }


def arm_7dof_config() -> dict:
    return {
        "name": "gen3_7dof",
        "display_name": "Kinova Gen3 7-DoF",
        "base_xyz": [0.34, 0.0, 0.76],
        "joints": [
            {"offset": [0, 0, 0.12], "axis": [0, 0, 1], "limits": [-3.1, 3.1]},
            {"offset": [0, 0, 0.06], "axis": [0, 1, 0], "limits": [-2.4, 2.4]},
            {"offset": [0, 0, 0.18], "axis": [0, 0, 1], "limits": [-3.1, 3.1]},
            {"offset": [0, 0, 0.18], "axis": [0, 1, 0], "limits": [-2.6, 2.6]},
            {"offset": [0, 0, 0.32], "axis": [0, 0, 1], "limits": [-3.1, 3.1]},
            {"offset": [0, 0, 0.06], "axis": [0, 1, 0], "limits": [-2.8, 2.8]},
            {"offset": [0, 0, 0.05], "axis": [0, 0, 1], "limits": [-3.1, 3.1]},
        ],
        "tool_xyz": [0, 0, 0.14],
        "capsules": [
            {"frame": 1, "p0": [0, 0, -0.06], "p1": [0, 0, 0.05], "radius": 0.055},
            {"frame": 2, "p0": [0, 0, 0.02], "p1": [0, 0, 0.18], "radius": 0.055},
            {"frame": 3, "p0": [0, 0, 0.0], "p1": [0, 0, 0.16], "radius": 0.055},
            {"frame": 4, "p0": [0, 0, 0.02], "p1": [0, 0, 0.30], "radius": 0.05},
            {"frame": 5, "p0": [0, 0, 0.0], "p1": [0, 0, 0.05], "radius": 0.045},
            {"frame": 6, "p0": [0, 0, 0.0], "p1": [0, 0, 0.04], "radius": 0.045},
            {"frame": 7, "p0": [0, 0, 0.0], "p1": [0, 0, 0.07], "radius": 0.04},
            {"frame": 7, "p0": [0, 0, 0.07], "p1": [0, 0, 0.14], "radius": 0.01},
        ],
        "q_start": [0.7686, 1.1359, 1.4505, 1.6617, 0.3918, 1.8595, -0.1827],
    }


def default_obstacles(keepout_radius: float = 0.12, include_cup: bool = True) -> list:
    obstacles = [
        {"kind": "box", "lo": [-0.8, 0.35, 0.64], "hi": [0.8, 1.2, 0.72]},
        {"kind": "box", "lo": [-0.26, -0.40, 0.0], "hi": [0.26, 0.02, 0.92]},
        {"kind": "sphere", "center": [0.0, 0.0, 1.05], "radius": keepout_radius},
    ]
    if include_cup:
        # sip cup mounted to the user's left; blocks leftward transfer poses
        obstacles.append({"kind": "sphere", "center": [-0.14, 0.20, 1.01], "radius": 0.07})
    return obstacles


HALF_PI = 1.5707963267948966


def planner_config(
    standoff: float = 0.08,
    keepout_radius: float = 0.12,
    h_fixed=(0.0872664625997165, 0.2617993877991494, 0.0),
    present_standoff: float | None = None,
    include_cup: bool = True,
) -> dict:
    cfg = {
        "arms": {"gen3_6dof": arm_6dof_config(), "gen3_7dof": arm_7dof_config()},
        "active_arm": "gen3_6dof",
        "obstacles": default_obstacles(keepout_radius, include_cup),
        "head": {
            "pivot": [0.0, 0.0, 1.05],
            "mouth_offset": [0.0, 0.15, -0.03],
            "keepout_radius": keepout_radius,
        },
        "transfer": {"xyz": [0.0, standoff, 0.0], "rpy": [HALF_PI, 0.0, 0.0]},
        "h_fixed": list(h_fixed),
        "params": {
            "ik_tol": 0.005,
            "ik_ang_tol": 0.05,
            "ik_max_iter": 160,
            "ik_restarts": 6,
            "ik_solution_attempts": 4,
            "collision_step": 0.02,
            "rrt_step": 0.1,
            "rrt_goal_bias": 0.2,
            "rrt_max_iters": 5000,
            "candidate_count": 64,
        },
        "seeds": list(range(10)),
    }
    if present_standoff is not None:
        cfg["transfer_present"] = {"xyz": [0.0, present_standoff, 0.0], "rpy": [HALF_PI, 0.0, 0.0]}
    return cfg


def feeding_demo_config() -> dict:
    return {
        "intent_delay_steps": [1, 3],
        "hmm": {
            "n_states": 4,
            "n_sim_meals": 30,
            "sim_temperature": 0.5,
            "user_weight": 10.0,
            "restarts": 3,
            "n_user_meals": 6,
        },
        "max_steps_per_bite": 60,
    }


PREF_PROFILES = {
    "natalia": {
        "affinity": {"banana": 5, "kiwi": 4, "grape": 2, "carrot": 1},
        "eating_preference": "SaveFavoriteForLast",
    },
    "jose": {
        "affinity": {"banana": 2, "kiwi": 5, "grape": 4, "carrot": 1},
        "eating_preference": "FavoriteFirst",
    },
}


def feeding_config(recipient: str, variant: str | None = None) -> dict:
    if recipient == "jose":
        planner = planner_config(standoff=-0.02, keepout_radius=0.10,
                                 h_fixed=(0.0349065850398866, 0.1396263401595464, 0.0),
                                 present_standoff=0.06, include_cup=False)
    elif variant == "social":
        # fixed position on the user's right side (rotation 25 degrees)
        planner = planner_config(h_fixed=(0.0, 0.4363323129985824, 0.0))
    else:
        planner = planner_config()
    cfg = {
        "meal": {"items": list(FOOD_ITEMS), "bites_per_item": BITES_PER_ITEM},
        "preference": PREF_PROFILES[recipient],
        "planner": planner,
        "demo": feeding_demo_config(),
    }
    if variant == "social":
        # fixed right-side pose from the behavior model attribute
        cfg["demo"]["transfer_policy"] = "fixed_side"
    return cfg


# --------------------------------------------------------------------------
# the bundle


def catalogue_scenarios() -> list:
    """The 19 catalogue scenarios as (scenario_id, recipient, adl)."""
    out = []
    for recipient, (_, flags) in RECIPIENTS.items():
        for flag in flags:
            adl = ADL_NAMES[flag]
            if recipient == "natalia" and adl == "feeding":
                sid = "natalia_tv_feeding"
            else:
                sid = f"{recipient}_{adl}"
            out.append((sid, recipient, adl))
    return out


ROBOT_FEEDING = {
    "natalia_tv_feeding": ("natalia", None, robot_feeding_workflow_natalia),
    "jose_feeding": ("jose", None, robot_feeding_workflow_jose),
    "natalia_social_feeding": ("natalia", "social", robot_feeding_workflow_social),
}


def build_scenario_documents() -> dict:
    """scenario_id -> {filename: document text} for the whole bundle."""
    bundle = {}
    for sid, recipient, adl in catalogue_scenarios():
        prefix = sid.replace("_", "")[:3] + "_" + adl[:4]
        docs = {
            "blocks.json": serialize_building_blocks(build_blocks(sid, recipient, adl)),
            "workflow_human.json": serialize_workflow(HUMAN_BUILDERS[adl](recipient, prefix)),
            "config.json": canon.dumps(
                feeding_config(recipient) if sid in ROBOT_FEEDING else {}
            ),
        }
        if sid in ROBOT_FEEDING:
            _, variant, builder = ROBOT_FEEDING[sid]
            docs["workflow_robot.json"] = serialize_workflow(builder())
        bundle[sid] = docs
    # robot-only social variant: human workflow is Natalia's catalogue one
    sid = "natalia_social_feeding"
    recipient, variant, builder = ROBOT_FEEDING[sid]
    bundle[sid] = {
        "blocks.json": serialize_building_blocks(build_blocks(sid, recipient, "feeding", variant)),
        "workflow_robot.json": serialize_workflow(builder()),
        "config.json": canon.dumps(feeding_config(recipient, variant)),
    }
    return bundle


def defaults_document() -> dict:
    return {
        "full_mobility_rom_deg": {
            "Flexion": 50,
            "Extension": 60,
            "RotationLeft": 80,
            "RotationRight": 80,
            "LateralFlexionLeft": 45,
            "LateralFlexionRight": 45,
        },
        "transfer_experiment": {
            "scenario": "natalia_tv_feeding",
            "n_user_poses": 100,
            "seeds": list(range(10)),
        },
        "sequencing_experiment": {
            "n_users": 20,
            "seed": 0,
            "temperature": 0.5,
            "affinity_noise": 1.0,
            "n_sim_meals": 50,
            "n_user_meals": 6,
            "user_weight": 10.0,
            "n_states": 4,
            "restarts": 5,
            "n_random_reps": 50,
            "meal": {"items": list(FOOD_ITEMS), "bites_per_item": BITES_PER_ITEM},
        },
        "robots_experiment": {
            "scenario": "natalia_tv_feeding",
            "arms": ["gen3_6dof", "gen3_7dof"],
            "seeds": [0, 1, 2],
            "n_user_poses": 30,
            "reference_annotations": {
                "note": "hardware study reference values, reported for context only",
                "Kinova Gen3 6-DoF": {"success_rate": "1.0", "relative_angle_rad": "0.3996 -+ 0.0018"},
                "Kinova Gen3 7-DoF": {"success_rate": "1.0", "relative_angle_rad": "0.3496 -+ 0.0008"},
            },
        },
    }


def write_bundled_data(root: str | Path) -> None:
    """Regenerate the shipped data tree (defaults + scenario documents)."""
    root = Path(root)
    (root / "scenarios").mkdir(parents=True, exist_ok=True)
    canon.write_file(root / "defaults.json", defaults_document())
    for sid, docs in build_scenario_documents().items():
        d = root / "scenarios" / sid
        d.mkdir(parents=True, exist_ok=True)
        for filename, text in docs.items():
            (d / filename).write_bytes(text.encode("utf-8"))


def verify_bundle(root: str | Path) -> list:
    """Names of bundled files that differ from the catalogue definitions."""
    root = Path(root)
    stale = []
    expected = {("defaults.json",): canon.dumps(defaults_document())}
    for sid, docs in build_scenario_documents().items():
        for filename, text in docs.items():
            expected[("scenarios", sid, filename)] = text
    for parts, text in expected.items():
        path = root.joinpath(*parts)
        if not path.exists() or path.read_bytes() != text.encode("utf-8"):
            stale.append("/".join(parts))
    return stale
