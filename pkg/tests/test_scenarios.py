import math

import pytest

from sparcs import catalog
from sparcs.blocks import (
    full_mobility_manifold,
    get_attribute,
    head_pose_manifold,
    parse_building_blocks,
    serialize_building_blocks,
)
from sparcs.scenario import ScenarioLoadError, bundled_data_dir, list_scenarios, load_scenario, scenario_root
from sparcs.workflow import parse_workflow, serialize_workflow, validate_hierarchy

DEG = math.pi / 180.0


def test_bundle_matches_catalogue_definitions():
    assert catalog.verify_bundle(bundled_data_dir()) == []


def test_bundle_counts():
    scenarios = list_scenarios()
    assert len(scenarios) == 20
    humans = [s for s in scenarios if (scenario_root() / s / "workflow_human.json").is_file()]
    robots = [s for s in scenarios if (scenario_root() / s / "workflow_robot.json").is_file()]
    assert len(humans) == 19
    assert sorted(robots) == ["jose_feeding", "natalia_social_feeding", "natalia_tv_feeding"]


def test_every_bundled_workflow_validates_and_roundtrips():
    for sid in list_scenarios():
        for name in ("workflow_human.json", "workflow_robot.json"):
            path = scenario_root() / sid / name
            if not path.is_file():
                continue
            text = path.read_text(encoding="utf-8")
            wf = parse_workflow(text)
            assert validate_hierarchy(wf) == [], f"{sid}/{name}"
            assert serialize_workflow(wf) == text, f"{sid}/{name} not canonical"


def test_every_bundled_blocks_document_roundtrips():
    for sid in list_scenarios():
        text = (scenario_root() / sid / "blocks.json").read_text(encoding="utf-8")
        bbs = parse_building_blocks(text)
        assert serialize_building_blocks(bbs) == text, f"{sid}/blocks.json not canonical"


def test_all_scenarios_load():
    for sid in list_scenarios():
        scenario = load_scenario(sid)
        assert scenario.scenario_id == sid


def test_natalia_manifold_value():
    # oracle: degree-to-radian conversion of the bundled scenario file
    scenario = load_scenario("natalia_tv_feeding")
    manifold = head_pose_manifold(scenario.blocks.user_functionality)
    assert manifold.rotation_range == pytest.approx((-math.pi / 6, math.pi / 6), abs=1e-12)


def test_natalia_attribute_readback():
    scenario = load_scenario("natalia_tv_feeding")
    value = get_attribute(scenario.blocks.user_functionality, "Active ROM Neck Flexion")
    assert value.value == 20 and value.unit == "deg"
    assert get_attribute(scenario.blocks.user_behavior, "Bite Intent Signal") == "mouth_open"


def test_social_dining_transfer_side():
    scenario = load_scenario("natalia_social_feeding")
    assert get_attribute(scenario.blocks.user_behavior, "Preferred Transfer Side") == "right"


def test_every_scenario_manifold_within_full_mobility():
    h_all = full_mobility_manifold()
    for sid in list_scenarios():
        scenario = load_scenario(sid)
        manifold = head_pose_manifold(scenario.blocks.user_functionality)
        assert h_all.contains_manifold(manifold), sid


def test_robot_scenarios_have_feeding_composites():
    scenario = load_scenario("natalia_tv_feeding")
    names = [c.name for c in scenario.workflow_robot.root.children]
    assert names == ["Bite Acquisition", "Bite Transfer"]
    assert scenario.workflow_robot.root.name == "Feeding"
    assert scenario.workflow_robot.root.level.value == "Activity"


def test_jose_differs_only_in_bite_transfer():
    from sparcs.workflow import diff_workflows

    nat = load_scenario("natalia_tv_feeding").workflow_robot
    jose = load_scenario("jose_feeding").workflow_robot
    edits = diff_workflows(nat, jose)
    assert edits
    for edit in edits:
        assert edit.path[:2] == ("Feeding", "Bite Transfer")


def test_missing_config_is_reported_with_filename(tmp_path):
    src = scenario_root() / "natalia_tv_feeding"
    dst = tmp_path / "broken"
    dst.mkdir()
    for name in ("blocks.json", "workflow_human.json", "workflow_robot.json"):
        (dst / name).write_bytes((src / name).read_bytes())
    with pytest.raises(ScenarioLoadError, match="config.json"):
        load_scenario(dst)


def test_data_dir_override(tmp_path, monkeypatch):
    monkeypatch.setenv("SPARCS_DATA_DIR", str(tmp_path))
    assert list_scenarios() == []
    monkeypatch.delenv("SPARCS_DATA_DIR")
    assert len(list_scenarios()) == 20


def test_human_workflows_reuse_lift_leg_task():
    # the same named Task appears in dressing and bathing documents
    from sparcs.workflow import find_node

    dressing = load_scenario("natalia_dressing").workflow_human
    bathing = load_scenario("natalia_bathing").workflow_human
    a = find_node(dressing.root, ("Dressing", "Dress Lower Body", "Lift User Leg"))
    b = find_node(bathing.root, ("Bathing", "Wash And Dry", "Lift User Leg"))
    assert a.name == b.name and a.level is b.level


def test_bathing_has_concurrent_region():
    wf = load_scenario("morgan_bathing").workflow_human
    from sparcs.workflow import find_node

    hair = find_node(wf.root, ("Bathing", "Hair Care"))
    assert hair.concurrent
    assert [c.name for c in hair.children] == ["Apply Shampoo", "Shield Eyes From Water"]
