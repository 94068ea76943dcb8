"""Structured workflows: execute a small robot workflow step by step, then
compare and graft the bundled feeding workflows."""

from sparcs import load_scenario, run, diff_workflows, substitute_subtree
from sparcs.workflow import find_node, validate_hierarchy

natalia = load_scenario("natalia_tv_feeding").workflow_robot
jose = load_scenario("jose_feeding").workflow_robot

print("robot workflow:", natalia.root.name)
for path, node in natalia.root.walk():
    print(f"  {'  ' * (len(path) - 1)}{node.level.value:<16} {node.name}")

# run one bite with stub handlers; the mouth-open gate holds the transfer
# leaf pending until the fact appears on the blackboard
handlers = {
    "detect_plate_items": lambda bb: ({**bb, "plate.visible": True}, True),
    "move_above_plate": lambda bb: ({**bb, "robot.above_plate": True}, True),
    "skewer_item": lambda bb: ({**bb, "food.on_fork": True}, True),
    "move_to_staging": lambda bb: ({**bb, "robot.at_staging": True, "user.mouth_open": True}, True),
    "detect_mouth_open": lambda bb: (bb, True),
    "estimate_head_pose": lambda bb: ({**bb, "user.head_pose_known": True}, True),
    "transfer_bite": lambda bb: ({**bb, "transfer.success": True}, True),
    "confirm_bite_taken": lambda bb: ({**bb, "bite.taken": True}, True),
    "retract_arm": lambda bb: ({**bb, "bite.complete": True}, True),
}
result = run(natalia, {"food.on_fork": False, "user.mouth_open": False}, handlers, max_steps=40)
print("\none bite with stub skills ->", result.status, f"({len(result.trace)} trace events)")

# the two recipients share acquisition; only the transfer breakdown differs
print("\nedits from Natalia's workflow to Jose's:")
for edit in diff_workflows(natalia, jose):
    print(f"  {edit.kind:<8} {'/'.join(edit.path)}")

# grafting Jose's transfer subtree onto Natalia's tree reproduces Jose's
# workflow (ids aside), and the result still validates
grafted = substitute_subtree(
    natalia.root, ("Feeding", "Bite Transfer"),
    find_node(jose.root, ("Feeding", "Bite Transfer")),
)
print("\ngraft validates:", validate_hierarchy(grafted, target="robot") == [])
print("graft equals Jose's workflow:", diff_workflows(grafted, jose.root) == [])
