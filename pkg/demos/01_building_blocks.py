"""Building blocks: load a bundled scenario, read clinical attributes, and
derive the head-pose manifold the transfer planner consumes."""

import math

from sparcs import load_scenario, get_attribute, head_pose_manifold, set_attribute
from sparcs.blocks import Quantity, full_mobility_manifold

scenario = load_scenario("natalia_tv_feeding")
muf = scenario.blocks.user_functionality

print("scenario:", scenario.scenario_id)
print("cause of disability:", get_attribute(muf, "Cause Of Disability"))
print("active neck rotation (left):", get_attribute(muf, "Active ROM Neck RotationLeft"))
print("MMT neck flexors:", get_attribute(muf, "MMT Neck Flexors"))

# the planner works in radians; the manifold is a box of neck angles
manifold = head_pose_manifold(muf)
deg = 180 / math.pi
print("\nattainable head-pose box (degrees):")
print("  flexion :", [round(a * deg, 1) for a in manifold.flexion_range])
print("  rotation:", [round(a * deg, 1) for a in manifold.rotation_range])
print("  lateral :", [round(a * deg, 1) for a in manifold.lateral_range])

h_all = full_mobility_manifold()
print("full-mobility box contains it:", h_all.contains_manifold(manifold))

# blocks are immutable; editing returns a new block, and the manifold
# derived from it reflects the change
wider = set_attribute(muf, "Active ROM Neck RotationLeft", Quantity(40, "deg"))
print("\nafter widening left rotation to 40 deg:")
print("  rotation:", [round(a * deg, 1) for a in head_pose_manifold(wider).rotation_range])
print("  original unchanged:", [round(a * deg, 1) for a in head_pose_manifold(muf).rotation_range])
