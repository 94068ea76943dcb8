"""Structured Workflows: hierarchical state machines with typed abstraction
levels, pre/post-conditions, and concurrent regions.

Two workflow families share one node type. Human-caregiving workflows stop
at the Task level; robot-caregiving workflows continue through Composite
Skills down to Motor/Perceptual Skill leaves, which carry handler
references. Execution is a deterministic step loop: a step propagates
completions bottom-up, activates eligible nodes top-down, then runs the
handlers of newly active leaves. Failure of a child fails its ancestors on
the following step (fail-fast).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from . import canon
from .conditions import ALWAYS_TRUE, ConditionExpr, parse_condition
from .conditions import ParseError  # re-exported: document and grammar errors share it
from .errors import SparcsError


class HierarchyError(SparcsError):
    """Level chain or leaf rule violated."""


class DanglingHandlerError(SparcsError):
    """Handler reference on a node that cannot carry one."""


class UnknownHandler(SparcsError):
    """Execution met a handler_ref with no registered handler."""


class PathError(SparcsError):
    """A node path does not address exactly one node."""


class Level(str, Enum):
    ACTIVITY = "Activity"
    COMPOSITE_TASK = "CompositeTask"
    TASK = "Task"
    COMPOSITE_SKILL = "CompositeSkill"
    MOTOR_SKILL = "MotorSkill"
    PERCEPTUAL_SKILL = "PerceptualSkill"


# child levels allowed under each level
CHILD_LEVELS = {
    Level.ACTIVITY: (Level.COMPOSITE_TASK,),
    Level.COMPOSITE_TASK: (Level.TASK,),
    Level.TASK: (Level.COMPOSITE_SKILL,),
    Level.COMPOSITE_SKILL: (Level.MOTOR_SKILL, Level.PERCEPTUAL_SKILL),
    Level.MOTOR_SKILL: (),
    Level.PERCEPTUAL_SKILL: (),
}

SKILL_LEVELS = (Level.MOTOR_SKILL, Level.PERCEPTUAL_SKILL)


@dataclass(frozen=True)
class WorkflowNode:
    id: str
    name: str
    level: Level
    pre: ConditionExpr = ALWAYS_TRUE
    post: ConditionExpr = ALWAYS_TRUE
    children: tuple = ()
    concurrent: bool = False
    handler_ref: str | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self, path=()):
        """Yield (path-of-names, node) in document order; path includes self."""
        here = path + (self.name,)
        yield here, self
        for child in self.children:
            yield from child.walk(here)


@dataclass(frozen=True)
class Workflow:
    target: str                      # "human" | "robot"
    root: WorkflowNode


@dataclass(frozen=True)
class Diagnostic:
    rule: str
    node_id: str
    message: str

    def to_json(self) -> dict:
        return {"rule": self.rule, "node_id": self.node_id, "message": self.message}


def decode_workflow(document: str | bytes | dict) -> Workflow:
    """Structural decode: JSON shape, level names, condition grammar.

    Hierarchy rules are checked separately by validate_hierarchy so that
    callers can collect diagnostics instead of exceptions.
    """
    data = canon.loads(document) if isinstance(document, (str, bytes)) else document
    if not isinstance(data, dict) or "root" not in data:
        raise ParseError("workflow document needs a 'root' node")
    target = data.get("target", "robot")
    if target not in ("human", "robot"):
        raise ParseError(f"workflow target must be 'human' or 'robot', got {target!r}")
    return Workflow(target, _decode_node(data["root"]))


def _decode_node(raw: dict) -> WorkflowNode:
    if not isinstance(raw, dict):
        raise ParseError(f"workflow node must be an object, got {raw!r}")
    for key in ("id", "name", "level"):
        if key not in raw:
            raise ParseError(f"workflow node missing {key!r}: {raw.get('id') or raw.get('name')!r}")
    try:
        level = Level(raw["level"])
    except ValueError:
        raise ParseError(f"unknown level {raw['level']!r} on node {raw['id']!r}")
    return WorkflowNode(
        id=str(raw["id"]),
        name=str(raw["name"]),
        level=level,
        pre=parse_condition(raw.get("pre", "true")),
        post=parse_condition(raw.get("post", "true")),
        children=tuple(_decode_node(c) for c in raw.get("children", ())),
        concurrent=bool(raw.get("concurrent", False)),
        handler_ref=raw.get("handler_ref"),
    )


def _encode_node(node: WorkflowNode) -> dict:
    out = {"id": node.id, "name": node.name, "level": node.level.value}
    if not node.pre.is_default:
        out["pre"] = node.pre.source
    if not node.post.is_default:
        out["post"] = node.post.source
    if node.concurrent:
        out["concurrent"] = True
    if node.children:
        out["children"] = [_encode_node(c) for c in node.children]
    if node.handler_ref is not None:
        out["handler_ref"] = node.handler_ref
    return out


def serialize_workflow(workflow: Workflow) -> str:
    return canon.dumps({"target": workflow.target, "root": _encode_node(workflow.root)})


def validate_hierarchy(workflow: Workflow | WorkflowNode, target: str | None = None) -> list:
    """All structural diagnostics; empty list means the workflow is valid."""
    if isinstance(workflow, Workflow):
        root, target = workflow.root, workflow.target
    else:
        root, target = workflow, (target or "robot")
    diagnostics = []
    seen_ids = {}
    leaf_levels = (Level.TASK,) if target == "human" else SKILL_LEVELS

    if root.level is not Level.ACTIVITY:
        diagnostics.append(Diagnostic("RootLevel", root.id, "root must be an Activity"))
    for _, node in root.walk():
        if node.id in seen_ids:
            diagnostics.append(Diagnostic("DuplicateId", node.id, f"id {node.id!r} reused"))
        seen_ids[node.id] = node
        for child in node.children:
            if child.level not in CHILD_LEVELS[node.level]:
                diagnostics.append(
                    Diagnostic(
                        "LevelChain",
                        child.id,
                        f"{child.level.value} cannot sit under {node.level.value}",
                    )
                )
        if node.handler_ref is not None and not node.is_leaf:
            diagnostics.append(
                Diagnostic("HandlerOnInnerNode", node.id, "handler_ref allowed on leaves only")
            )
        if node.is_leaf and node.level not in leaf_levels and node is not root:
            diagnostics.append(
                Diagnostic(
                    "LeafLevel",
                    node.id,
                    f"{target} workflow leaves must be "
                    f"{' or '.join(l.value for l in leaf_levels)}, found {node.level.value}",
                )
            )
    return diagnostics


def parse_workflow(document) -> Workflow:
    """Decode and fully validate; raises instead of returning diagnostics."""
    workflow = decode_workflow(document)
    diagnostics = validate_hierarchy(workflow)
    for diag in diagnostics:
        if diag.rule == "HandlerOnInnerNode":
            raise DanglingHandlerError(f"{diag.node_id}: {diag.message}")
    if diagnostics:
        first = diagnostics[0]
        raise HierarchyError(f"{first.rule} at {first.node_id}: {first.message}")
    return workflow


# --------------------------------------------------------------------------
# execution


class Status(str, Enum):
    PENDING = "Pending"
    ACTIVE = "Active"
    DONE = "Done"
    FAILED = "Failed"


@dataclass(frozen=True)
class TraceEvent:
    step: int
    node_id: str
    event: str

    def __str__(self):
        return f"{self.step}:{self.node_id}:{self.event}"


@dataclass(frozen=True)
class WorkflowInstance:
    root: WorkflowNode
    statuses: dict
    trace: tuple = ()
    step_count: int = 0

    @classmethod
    def fresh(cls, root: WorkflowNode) -> "WorkflowInstance":
        return cls(root, {node.id: Status.PENDING for _, node in root.walk()})

    @property
    def cursor(self) -> set:
        return {nid for nid, s in self.statuses.items() if s is Status.ACTIVE}

    @property
    def terminal(self) -> bool:
        return self.statuses[self.root.id] in (Status.DONE, Status.FAILED)


def step(instance: WorkflowInstance, blackboard: dict, handlers: dict) -> tuple:
    """One scheduling round; returns (instance', blackboard').

    Phases: propagate completion/failure of composite nodes from child
    statuses, activate eligible pending nodes top-down, then execute the
    handlers of newly active leaves (document order). A leaf resolves to
    Done or Failed in the same step it activates; waiting is expressed by
    a pre-condition staying false.
    """
    if instance.terminal:
        raise SparcsError("instance is terminal")
    statuses = dict(instance.statuses)
    bb = dict(blackboard)
    k = instance.step_count
    events = []

    def mark(node_id, status, event):
        statuses[node_id] = status
        events.append(TraceEvent(k, node_id, event))

    # phase 1: composite completion / fail-fast, bottom-up to fixpoint
    changed = True
    while changed:
        changed = False
        for _, node in instance.root.walk():
            if statuses[node.id] is not Status.ACTIVE or node.is_leaf:
                continue
            child_statuses = [statuses[c.id] for c in node.children]
            if any(s is Status.FAILED for s in child_statuses):
                mark(node.id, Status.FAILED, "failed")
                changed = True
            elif all(s is Status.DONE for s in child_statuses):
                if node.post.evaluate(bb):
                    mark(node.id, Status.DONE, "done")
                else:
                    mark(node.id, Status.FAILED, "failed")
                changed = True

    # phase 2: top-down activation cascade
    newly_active_leaves = []

    def activate_children(node: WorkflowNode):
        eligible = [
            c for c in node.children if statuses[c.id] is Status.PENDING and c.pre.evaluate(bb)
        ]
        if node.concurrent:
            to_activate = eligible
        else:
            already_active = any(statuses[c.id] is Status.ACTIVE for c in node.children)
            to_activate = [] if already_active or not eligible else [eligible[0]]
        for child in to_activate:
            mark(child.id, Status.ACTIVE, "activated")
            if child.is_leaf:
                newly_active_leaves.append(child)
        for child in node.children:
            if statuses[child.id] is Status.ACTIVE and not child.is_leaf:
                activate_children(child)

    root = instance.root
    if statuses[root.id] is Status.PENDING and root.pre.evaluate(bb):
        mark(root.id, Status.ACTIVE, "activated")
        if root.is_leaf:
            newly_active_leaves.append(root)
    if statuses[root.id] is Status.ACTIVE and not root.is_leaf:
        activate_children(root)

    # phase 3: run newly active leaves in document order
    order = {node.id: i for i, (_, node) in enumerate(root.walk())}
    for leaf in sorted(newly_active_leaves, key=lambda n: order[n.id]):
        ok = True
        if leaf.handler_ref is not None:
            if leaf.handler_ref not in handlers:
                raise UnknownHandler(f"no handler registered for {leaf.handler_ref!r}")
            bb, ok = handlers[leaf.handler_ref](bb)
        if ok and leaf.post.evaluate(bb):
            mark(leaf.id, Status.DONE, "done")
        else:
            mark(leaf.id, Status.FAILED, "failed")

    next_instance = replace(
        instance,
        statuses=statuses,
        trace=instance.trace + tuple(events),
        step_count=k + 1,
    )
    return next_instance, bb


@dataclass(frozen=True)
class RunResult:
    instance: WorkflowInstance
    blackboard: dict
    status: str                      # "Done" | "Failed" | "BudgetExhausted"

    @property
    def trace(self) -> tuple:
        return self.instance.trace


def run(workflow: Workflow | WorkflowNode, blackboard0: dict, handlers: dict, max_steps: int) -> RunResult:
    """Drive step until the root terminates or the budget runs out.

    Deterministic for deterministic handlers. A step that changes nothing
    can never be followed by one that does, so quiescence ends the run
    early with BudgetExhausted.
    """
    if max_steps < 1:
        raise SparcsError("max_steps must be >= 1")
    root = workflow.root if isinstance(workflow, Workflow) else workflow
    instance = WorkflowInstance.fresh(root)
    bb = dict(blackboard0)
    for _ in range(max_steps):
        before = (instance.statuses, bb)
        instance, bb = step(instance, bb, handlers)
        if instance.terminal:
            return RunResult(instance, bb, instance.statuses[root.id].value)
        if instance.statuses == before[0] and bb == before[1]:
            return RunResult(instance, bb, "BudgetExhausted")
    return RunResult(instance, bb, "BudgetExhausted")


# --------------------------------------------------------------------------
# structural comparison and reuse


def _same_attrs(a: WorkflowNode, b: WorkflowNode) -> bool:
    return (
        a.name == b.name
        and a.level is b.level
        and a.pre.source == b.pre.source
        and a.post.source == b.post.source
        and a.concurrent == b.concurrent
        and a.handler_ref == b.handler_ref
    )


def deep_equal_ignoring_ids(a: WorkflowNode, b: WorkflowNode) -> bool:
    return (
        _same_attrs(a, b)
        and len(a.children) == len(b.children)
        and all(deep_equal_ignoring_ids(x, y) for x, y in zip(a.children, b.children))
    )


@dataclass(frozen=True)
class Edit:
    kind: str                        # "insert" | "delete" | "replace"
    path: tuple                      # node names from the root, inclusive
    node: WorkflowNode | None = None

    def __str__(self):
        return f"{self.kind} {'/'.join(self.path)}"


def _key(node: WorkflowNode):
    return (node.level, node.name)


def diff_workflows(a: Workflow | WorkflowNode, b: Workflow | WorkflowNode) -> list:
    """Top-down subtree edits turning a into b; nodes match by (level, name)."""
    a_root = a.root if isinstance(a, Workflow) else a
    b_root = b.root if isinstance(b, Workflow) else b
    edits = []
    _diff_nodes(a_root, b_root, (), edits)
    return edits


def _diff_nodes(a: WorkflowNode, b: WorkflowNode, parent_path, edits):
    path = parent_path + (a.name,)
    if _key(a) != _key(b) or not _same_attrs(a, b):
        edits.append(Edit("replace", path, b))
        return
    a_keys = [_key(c) for c in a.children]
    b_keys = [_key(c) for c in b.children]
    if a_keys == b_keys:
        for ca, cb in zip(a.children, b.children):
            if not deep_equal_ignoring_ids(ca, cb):
                _diff_nodes(ca, cb, path, edits)
        return
    # align by key: first unmatched occurrences become deletes/inserts
    used_b = [False] * len(b.children)
    for ca in a.children:
        match = None
        for j, cb in enumerate(b.children):
            if not used_b[j] and _key(cb) == _key(ca):
                match = j
                break
        if match is None:
            edits.append(Edit("delete", path + (ca.name,)))
        else:
            used_b[match] = True
            if not deep_equal_ignoring_ids(ca, b.children[match]):
                _diff_nodes(ca, b.children[match], path, edits)
    for j, cb in enumerate(b.children):
        if not used_b[j]:
            edits.append(Edit("insert", path + (cb.name,), cb))


def find_node(root: WorkflowNode, path) -> WorkflowNode:
    """Resolve a name path (root name first). PathError when not unique."""
    path = tuple(path)
    if not path or path[0] != root.name:
        raise PathError(f"path {path} does not start at root {root.name!r}")
    node = root
    for name in path[1:]:
        matches = [c for c in node.children if c.name == name]
        if len(matches) != 1:
            raise PathError(f"path {path}: {name!r} matches {len(matches)} children")
        node = matches[0]
    return node


def substitute_subtree(root: WorkflowNode, path, replacement: WorkflowNode) -> WorkflowNode:
    """Replace the node at path (levels must agree) and return a new tree.

    Ids inside the replacement are re-suffixed when they collide with ids
    kept from the host tree, so the result always validates.
    """
    target = find_node(root, path)
    if replacement.level is not target.level:
        raise HierarchyError(
            f"replacement level {replacement.level.value} != {target.level.value}"
        )

    kept_ids = {
        node.id
        for _, node in root.walk()
        if node is not target and not _is_descendant(target, node)
    }
    replacement = _unique_ids(replacement, kept_ids)

    def rebuild(node: WorkflowNode) -> WorkflowNode:
        if node is target:
            return replacement
        if not any(_is_descendant(node, target) or node is target for _ in (0,)):
            pass
        new_children = tuple(rebuild(c) for c in node.children)
        if new_children == node.children:
            return node
        return replace(node, children=new_children)

    new_root = rebuild(root)
    diagnostics = validate_hierarchy(new_root, target="robot")
    structural = [d for d in diagnostics if d.rule in ("DuplicateId", "LevelChain", "RootLevel")]
    if structural:
        first = structural[0]
        raise HierarchyError(f"{first.rule} at {first.node_id}: {first.message}")
    return new_root


def _is_descendant(ancestor: WorkflowNode, node: WorkflowNode) -> bool:
    if ancestor is node:
        return False
    return any(c is node or _is_descendant(c, node) for c in ancestor.children)


def _unique_ids(node: WorkflowNode, taken: set) -> WorkflowNode:
    new_children = tuple(_unique_ids(c, taken) for c in node.children)
    node_id = node.id
    suffix = 1
    while node_id in taken:
        suffix += 1
        node_id = f"{node.id}_{suffix}"
    taken.add(node_id)
    if node_id == node.id and new_children == node.children:
        return node
    return replace(node, id=node_id, children=new_children)
