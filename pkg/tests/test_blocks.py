import math

import numpy as np
import pytest

from sparcs import canon
from sparcs.blocks import (
    BlockKind,
    BuildingBlock,
    BuildingBlockSet,
    InvariantError,
    MissingRomError,
    Quantity,
    SchemaError,
    full_mobility_manifold,
    get_attribute,
    head_pose_manifold,
    parse_building_blocks,
    serialize_building_blocks,
    set_attribute,
)

DEG = math.pi / 180.0


def minimal_blocks_doc(neck_active=30, neck_passive=40):
    entries = {}
    for motion in ("Flexion", "Extension", "RotationLeft", "RotationRight",
                   "LateralFlexionLeft", "LateralFlexionRight"):
        entries[f"Active ROM Neck {motion}"] = {"value": neck_active, "unit": "deg"}
        entries[f"Passive ROM Neck {motion}"] = {"value": neck_passive, "unit": "deg"}
    return {
        "scenario_id": "test",
        "blocks": [
            {"kind": "UserFunctionality", "entries": entries},
            {"kind": "UserBehavior", "entries": {"Bite Intent Signal": "mouth_open"}},
            {"kind": "Environment", "entries": {}},
            {"kind": "Robot", "entries": {"DoF": {"value": 6, "unit": "unitless"}}},
        ],
    }


def test_parse_and_lookup():
    bbs = parse_building_blocks(minimal_blocks_doc())
    muf = bbs.user_functionality
    value = get_attribute(muf, "Active ROM Neck Flexion")
    assert value == Quantity(30, "deg")
    assert get_attribute(muf, "Nonexistent Key") is None


def test_empty_environment_block_is_valid():
    bbs = parse_building_blocks(minimal_blocks_doc())
    assert bbs.environment.entries == {}


def test_active_above_passive_rejected():
    doc = minimal_blocks_doc()
    doc["blocks"][0]["entries"]["Active ROM Neck Flexion"] = {"value": 50, "unit": "deg"}
    doc["blocks"][0]["entries"]["Passive ROM Neck Flexion"] = {"value": 40, "unit": "deg"}
    with pytest.raises(InvariantError):
        parse_building_blocks(doc)


def test_bare_number_needs_unit_tag():
    doc = minimal_blocks_doc()
    doc["blocks"][3]["entries"]["DoF"] = 6
    with pytest.raises(SchemaError):
        parse_building_blocks(doc)


def test_unknown_kind_rejected():
    doc = minimal_blocks_doc()
    doc["blocks"][0]["kind"] = "Pet"
    with pytest.raises(SchemaError):
        parse_building_blocks(doc)


def test_rom_limit_bounds():
    doc = minimal_blocks_doc()
    doc["blocks"][0]["entries"]["Active ROM Neck Flexion"] = {"value": 181, "unit": "deg"}
    with pytest.raises(InvariantError):
        parse_building_blocks(doc)


def test_mmt_grade_out_of_range():
    bbs = parse_building_blocks(minimal_blocks_doc())
    with pytest.raises(InvariantError):
        set_attribute(bbs.user_functionality, "MMT Grip", Quantity(7, "grade"))


def test_set_attribute_read_after_write_and_order():
    bbs = parse_building_blocks(minimal_blocks_doc())
    block = bbs.user_behavior
    updated = set_attribute(block, "Bite Intent Signal", "turn_toward_robot")
    assert get_attribute(updated, "Bite Intent Signal") == "turn_toward_robot"
    # original untouched (copy-on-write)
    assert get_attribute(block, "Bite Intent Signal") == "mouth_open"
    # replacing keeps key position, inserting appends
    updated = set_attribute(updated, "New Key", True)
    assert list(updated.entries) == ["Bite Intent Signal", "New Key"]


def test_serialize_parse_fixpoint():
    text = serialize_building_blocks(parse_building_blocks(minimal_blocks_doc()))
    again = serialize_building_blocks(parse_building_blocks(text))
    assert again == text


def test_manifold_from_rom_degrees():
    # oracle: plain degree-to-radian conversion of the document values
    bbs = parse_building_blocks(minimal_blocks_doc(neck_active=30))
    manifold = head_pose_manifold(bbs.user_functionality)
    assert manifold.rotation_range == pytest.approx((-30 * DEG, 30 * DEG), abs=1e-12)
    assert manifold.flexion_range == pytest.approx((-30 * DEG, 30 * DEG), abs=1e-12)


def test_zero_mobility_collapses_to_neutral():
    bbs = parse_building_blocks(minimal_blocks_doc(neck_active=0, neck_passive=0))
    manifold = head_pose_manifold(bbs.user_functionality)
    assert manifold.contains((0.0, 0.0, 0.0))
    assert not manifold.contains((0.01, 0.0, 0.0))


def test_missing_rom_entry_raises():
    doc = minimal_blocks_doc()
    del doc["blocks"][0]["entries"]["Active ROM Neck Flexion"]
    bbs = parse_building_blocks(doc)
    with pytest.raises(MissingRomError):
        head_pose_manifold(bbs.user_functionality)


def test_manifold_update_after_set_attribute():
    bbs = parse_building_blocks(minimal_blocks_doc())
    muf = set_attribute(bbs.user_functionality, "Active ROM Neck RotationLeft",
                        Quantity(40, "deg"))
    manifold = head_pose_manifold(muf)
    assert manifold.rotation_range[0] == pytest.approx(-40 * DEG, abs=1e-12)


def test_manifold_monotone_in_rom_limits():
    # enlarging any active limit never shrinks any range
    rng = np.random.default_rng(0)
    motions = ("Flexion", "Extension", "RotationLeft", "RotationRight",
               "LateralFlexionLeft", "LateralFlexionRight")
    for _ in range(50):
        base_limits = {m: float(rng.uniform(0, 60)) for m in motions}
        doc = minimal_blocks_doc(neck_passive=180)
        for m, v in base_limits.items():
            doc["blocks"][0]["entries"][f"Active ROM Neck {m}"] = {"value": v, "unit": "deg"}
        small = head_pose_manifold(parse_building_blocks(doc).user_functionality)
        grow = str(rng.choice(motions))
        doc["blocks"][0]["entries"][f"Active ROM Neck {grow}"] = {
            "value": base_limits[grow] + float(rng.uniform(0, 30)), "unit": "deg",
        }
        big = head_pose_manifold(parse_building_blocks(doc).user_functionality)
        assert big.contains_manifold(small)


def test_full_mobility_defaults_match_shipped_config():
    # oracle: the shipped defaults file itself
    from sparcs.blocks import load_defaults

    rom = load_defaults()["full_mobility_rom_deg"]
    manifold = full_mobility_manifold()
    assert manifold.flexion_range == pytest.approx((-rom["Extension"] * DEG, rom["Flexion"] * DEG))
    assert manifold.rotation_range[1] == pytest.approx(rom["RotationRight"] * DEG)


def test_full_mobility_override():
    manifold = full_mobility_manifold({"Flexion": 10})
    assert manifold.flexion_range[1] == pytest.approx(10 * DEG)


def test_duplicate_kind_rejected():
    doc = minimal_blocks_doc()
    doc["blocks"].append({"kind": "Robot", "entries": {}})
    with pytest.raises(SchemaError):
        parse_building_blocks(doc)


def test_missing_required_kind_rejected():
    doc = minimal_blocks_doc()
    doc["blocks"] = doc["blocks"][:3]
    with pytest.raises(SchemaError):
        parse_building_blocks(doc)


def test_nested_map_and_list_values():
    doc = minimal_blocks_doc()
    doc["blocks"][2]["entries"]["Obstacle Sizes"] = [
        {"value": 1.0, "unit": "cm"}, {"value": 2.5, "unit": "cm"},
    ]
    doc["blocks"][2]["entries"]["Camera"] = {"model": "rgbd", "fps": {"value": 30, "unit": "unitless"}}
    bbs = parse_building_blocks(doc)
    env = bbs.environment
    assert get_attribute(env, "Obstacle Sizes")[1] == Quantity(2.5, "cm")
    assert get_attribute(env, "Camera")["model"] == "rgbd"
    text = serialize_building_blocks(bbs)
    assert serialize_building_blocks(parse_building_blocks(text)) == text
