"""Building Block models: typed, file-backed dictionaries describing one
caregiving scenario (user functionality/behavior, caregiver, environment,
robot) plus quantities derived from them for planning.

A block is an ordered attribute map. Scalar numbers always carry a unit tag;
clinical range-of-motion and muscle-test entries are recognized by key
pattern and validated. Blocks are immutable after parsing: `set_attribute`
returns a new block (copy-on-write), so values can be shared across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from . import canon
from .errors import SparcsError


class SchemaError(SparcsError):
    """Document does not match the scenario file schema."""


class InvariantError(SparcsError):
    """Well-formed document with values that violate a domain invariant."""


class MissingRomError(SparcsError):
    """A required range-of-motion entry is absent."""


UNITS = ("deg", "rad", "cm", "kg", "grade", "unitless")

DEG = math.pi / 180.0


class BlockKind(str, Enum):
    USER_FUNCTIONALITY = "UserFunctionality"
    USER_BEHAVIOR = "UserBehavior"
    CAREGIVER_FUNCTIONALITY = "CaregiverFunctionality"
    CAREGIVER_BEHAVIOR = "CaregiverBehavior"
    ENVIRONMENT = "Environment"
    ROBOT = "Robot"


# Caregiver blocks are optional; the other four define a scenario.
REQUIRED_KINDS = (
    BlockKind.USER_FUNCTIONALITY,
    BlockKind.USER_BEHAVIOR,
    BlockKind.ENVIRONMENT,
    BlockKind.ROBOT,
)


class Motion(str, Enum):
    FLEXION = "Flexion"
    EXTENSION = "Extension"
    ROTATION_LEFT = "RotationLeft"
    ROTATION_RIGHT = "RotationRight"
    LATERAL_FLEXION_LEFT = "LateralFlexionLeft"
    LATERAL_FLEXION_RIGHT = "LateralFlexionRight"


class RomMode(str, Enum):
    ACTIVE = "Active"
    PASSIVE = "Passive"


@dataclass(frozen=True)
class Quantity:
    """A scalar with its mandatory unit tag."""

    value: float
    unit: str

    def __post_init__(self):
        if self.unit not in UNITS:
            raise SchemaError(f"unknown unit tag {self.unit!r}")
        if isinstance(self.value, bool) or not isinstance(self.value, (int, float)):
            raise SchemaError(f"quantity value must be a number, got {self.value!r}")


# AttributeValue = Quantity | str | bool | list[Quantity] | dict[str, AttributeValue]


@dataclass(frozen=True)
class RomEntry:
    joint: str
    motion: Motion
    mode: RomMode
    limit_deg: float

    def __post_init__(self):
        if not 0.0 <= self.limit_deg <= 180.0:
            raise InvariantError(
                f"ROM limit {self.limit_deg} deg for {self.joint} {self.motion.value} "
                "outside [0, 180]"
            )

    @property
    def key(self) -> str:
        return f"{self.mode.value} ROM {self.joint} {self.motion.value}"


@dataclass(frozen=True)
class MmtEntry:
    muscle_group: str
    grade: int

    def __post_init__(self):
        if not (isinstance(self.grade, int) and 0 <= self.grade <= 5):
            raise InvariantError(f"MMT grade {self.grade!r} outside 0..5")

    @property
    def key(self) -> str:
        return f"MMT {self.muscle_group}"


def _parse_rom_key(key: str):
    """Return (mode, joint, motion) if key matches '<Mode> ROM <Joint> <Motion>'."""
    parts = key.split(" ")
    if len(parts) < 4 or parts[1] != "ROM":
        return None
    try:
        mode = RomMode(parts[0])
        motion = Motion(parts[-1])
    except ValueError:
        return None
    joint = " ".join(parts[2:-1])
    if not joint:
        return None
    return mode, joint, motion


def _parse_mmt_key(key: str):
    if key.startswith("MMT ") and len(key) > 4:
        return key[4:]
    return None


def _decode_value(key: str, raw):
    if isinstance(raw, bool) or isinstance(raw, str):
        return raw
    if isinstance(raw, (int, float)):
        raise SchemaError(f"attribute {key!r}: bare number is missing its unit tag")
    if isinstance(raw, list):
        return [_decode_value(key, item) for item in raw]
    if isinstance(raw, dict):
        if set(raw.keys()) == {"value", "unit"}:
            return Quantity(raw["value"], raw["unit"])
        return {k: _decode_value(f"{key}.{k}", v) for k, v in raw.items()}
    raise SchemaError(f"attribute {key!r}: unsupported value {raw!r}")


def _encode_value(value):
    if isinstance(value, Quantity):
        return {"value": value.value, "unit": value.unit}
    if isinstance(value, list):
        return [_encode_value(v) for v in value]
    if isinstance(value, dict):
        return {k: _encode_value(v) for k, v in value.items()}
    return value


def _check_key_family(key: str, value) -> None:
    """Validate values whose key matches a clinical pattern."""
    rom = _parse_rom_key(key)
    if rom is not None:
        if not isinstance(value, Quantity) or value.unit != "deg":
            raise SchemaError(f"ROM attribute {key!r} must be a degree quantity")
        RomEntry(rom[1], rom[2], rom[0], float(value.value))
        return
    muscle = _parse_mmt_key(key)
    if muscle is not None:
        if not isinstance(value, Quantity) or value.unit != "grade":
            raise SchemaError(f"MMT attribute {key!r} must be a grade quantity")
        if value.value != int(value.value):
            raise InvariantError(f"MMT grade must be an integer, got {value.value}")
        MmtEntry(muscle, int(value.value))


@dataclass(frozen=True)
class BuildingBlock:
    kind: BlockKind
    entries: dict

    def __post_init__(self):
        for key, value in self.entries.items():
            if not key or not isinstance(key, str):
                raise SchemaError(f"attribute keys must be non-empty strings, got {key!r}")
            _check_key_family(key, value)
        self._check_rom_pairs()

    def _check_rom_pairs(self):
        active, passive = {}, {}
        for entry in self.rom_entries():
            target = active if entry.mode is RomMode.ACTIVE else passive
            target[(entry.joint, entry.motion)] = entry.limit_deg
        for pair, active_limit in active.items():
            if pair in passive and active_limit > passive[pair]:
                raise InvariantError(
                    f"active ROM {active_limit} deg exceeds passive {passive[pair]} deg "
                    f"for {pair[0]} {pair[1].value}"
                )

    def rom_entries(self) -> list[RomEntry]:
        out = []
        for key, value in self.entries.items():
            rom = _parse_rom_key(key)
            if rom is not None and isinstance(value, Quantity):
                out.append(RomEntry(rom[1], rom[2], rom[0], float(value.value)))
        return out

    def mmt_entries(self) -> list[MmtEntry]:
        out = []
        for key, value in self.entries.items():
            muscle = _parse_mmt_key(key)
            if muscle is not None and isinstance(value, Quantity):
                out.append(MmtEntry(muscle, int(value.value)))
        return out


def get_attribute(block: BuildingBlock, key: str):
    """Exact-key lookup; None when absent."""
    return block.entries.get(key)


def set_attribute(block: BuildingBlock, key: str, value) -> BuildingBlock:
    """Insert-or-replace, preserving the order of pre-existing keys.

    Returns a new block; the input is never mutated.
    """
    entries = dict(block.entries)
    entries[key] = value
    return BuildingBlock(block.kind, entries)


@dataclass(frozen=True)
class BuildingBlockSet:
    scenario_id: str
    blocks: dict

    def __post_init__(self):
        for kind, block in self.blocks.items():
            if block.kind is not kind:
                raise SchemaError(f"block stored under {kind} has kind {block.kind}")
        for kind in REQUIRED_KINDS:
            if kind not in self.blocks:
                raise SchemaError(f"missing required building block {kind.value!r}")

    def block(self, kind: BlockKind) -> BuildingBlock:
        return self.blocks[kind]

    @property
    def user_functionality(self) -> BuildingBlock:
        return self.blocks[BlockKind.USER_FUNCTIONALITY]

    @property
    def user_behavior(self) -> BuildingBlock:
        return self.blocks[BlockKind.USER_BEHAVIOR]

    @property
    def environment(self) -> BuildingBlock:
        return self.blocks[BlockKind.ENVIRONMENT]

    @property
    def robot(self) -> BuildingBlock:
        return self.blocks[BlockKind.ROBOT]


def parse_building_blocks(document: str | bytes | dict) -> BuildingBlockSet:
    """Parse and validate a scenario blocks document (canonical JSON)."""
    data = canon.loads(document) if isinstance(document, (str, bytes)) else document
    if not isinstance(data, dict):
        raise SchemaError("blocks document must be a JSON object")
    if "scenario_id" not in data or "blocks" not in data:
        raise SchemaError("blocks document needs 'scenario_id' and 'blocks'")
    blocks = {}
    for raw in data["blocks"]:
        try:
            kind = BlockKind(raw.get("kind"))
        except ValueError:
            raise SchemaError(f"unknown building block kind {raw.get('kind')!r}")
        if kind in blocks:
            raise SchemaError(f"duplicate building block kind {kind.value!r}")
        entries = {}
        for key, raw_value in raw.get("entries", {}).items():
            entries[key] = _decode_value(key, raw_value)
        blocks[kind] = BuildingBlock(kind, entries)
    return BuildingBlockSet(str(data["scenario_id"]), blocks)


def serialize_building_blocks(bbs: BuildingBlockSet) -> str:
    doc = {
        "scenario_id": bbs.scenario_id,
        "blocks": [
            {
                "kind": block.kind.value,
                "entries": {k: _encode_value(v) for k, v in block.entries.items()},
            }
            for block in bbs.blocks.values()
        ],
    }
    return canon.dumps(doc)


@dataclass(frozen=True)
class HeadPoseManifold:
    """Box of attainable neck angles, radians.

    Axes: flexion (extension is negative flexion), axial rotation
    (left negative), lateral flexion (left negative). The neutral pose
    (0, 0, 0) is always inside.
    """

    flexion_range: tuple
    rotation_range: tuple
    lateral_range: tuple

    def __post_init__(self):
        for name, (lo, hi) in self._axes():
            if not lo <= hi:
                raise InvariantError(f"{name} range [{lo}, {hi}] is empty")
            if lo < -math.pi - 1e-12 or hi > math.pi + 1e-12:
                raise InvariantError(f"{name} range [{lo}, {hi}] outside [-pi, pi]")
            if not lo <= 0.0 <= hi:
                raise InvariantError(f"{name} range [{lo}, {hi}] excludes neutral pose")

    def _axes(self):
        return (
            ("flexion", self.flexion_range),
            ("rotation", self.rotation_range),
            ("lateral", self.lateral_range),
        )

    def contains(self, angles, tol: float = 1e-9) -> bool:
        """angles = (flexion, rotation, lateral) in radians."""
        for (_, (lo, hi)), a in zip(self._axes(), angles):
            if a < lo - tol or a > hi + tol:
                return False
        return True

    def contains_manifold(self, other: "HeadPoseManifold", tol: float = 1e-9) -> bool:
        return all(
            lo_s - tol <= lo_o and hi_o <= hi_s + tol
            for (_, (lo_s, hi_s)), (_, (lo_o, hi_o)) in zip(self._axes(), other._axes())
        )

    def sample(self, rng):
        """One uniform draw from the box; returns (flexion, rotation, lateral)."""
        return tuple(rng.uniform(lo, hi) for _, (lo, hi) in self._axes())


_NECK_MOTIONS = (
    Motion.FLEXION,
    Motion.EXTENSION,
    Motion.ROTATION_LEFT,
    Motion.ROTATION_RIGHT,
    Motion.LATERAL_FLEXION_LEFT,
    Motion.LATERAL_FLEXION_RIGHT,
)


def head_pose_manifold(muf: BuildingBlock, joint: str = "Neck") -> HeadPoseManifold:
    """Derive the attainable head-pose box from active neck ROM entries."""
    if muf.kind is not BlockKind.USER_FUNCTIONALITY:
        raise SchemaError("head-pose manifold derives from the UserFunctionality block")
    limits = {}
    for entry in muf.rom_entries():
        if entry.joint == joint and entry.mode is RomMode.ACTIVE:
            limits[entry.motion] = entry.limit_deg * DEG
    missing = [m.value for m in _NECK_MOTIONS if m not in limits]
    if missing:
        raise MissingRomError(f"missing active {joint} ROM entries: {', '.join(missing)}")
    return HeadPoseManifold(
        flexion_range=(-limits[Motion.EXTENSION], limits[Motion.FLEXION]),
        rotation_range=(-limits[Motion.ROTATION_LEFT], limits[Motion.ROTATION_RIGHT]),
        lateral_range=(-limits[Motion.LATERAL_FLEXION_LEFT], limits[Motion.LATERAL_FLEXION_RIGHT]),
    )


def load_defaults() -> dict:
    """Shipped normative defaults (full-mobility ROM, experiment configs)."""
    return canon.read_file(Path(__file__).parent / "data" / "defaults.json")


def full_mobility_manifold(overrides: dict | None = None) -> HeadPoseManifold:
    """The full-mobility head-pose box from the shipped config (overridable)."""
    rom = dict(load_defaults()["full_mobility_rom_deg"])
    if overrides:
        rom.update(overrides)
    return HeadPoseManifold(
        flexion_range=(-rom["Extension"] * DEG, rom["Flexion"] * DEG),
        rotation_range=(-rom["RotationLeft"] * DEG, rom["RotationRight"] * DEG),
        lateral_range=(-rom["LateralFlexionLeft"] * DEG, rom["LateralFlexionRight"] * DEG),
    )
