import pytest

from sparcs.workflow import (
    DanglingHandlerError,
    HierarchyError,
    ParseError,
    Status,
    UnknownHandler,
    WorkflowInstance,
    decode_workflow,
    parse_workflow,
    run,
    serialize_workflow,
    step,
    validate_hierarchy,
)
from sparcs.errors import SparcsError


def node(nid, name, level, **kw):
    out = {"id": nid, "name": name, "level": level}
    out.update(kw)
    return out


def tiny_robot_doc():
    return {
        "target": "robot",
        "root": node(
            "act", "Feeding", "Activity",
            children=[
                node(
                    "ct1", "Acquire", "CompositeTask",
                    post="food.on_fork == true",
                    children=[
                        node(
                            "t1", "Skewer", "Task",
                            post="food.on_fork == true",
                            children=[
                                node(
                                    "cs1", "Do Skewer", "CompositeSkill",
                                    children=[
                                        node("m1", "Stab", "MotorSkill",
                                             post="food.on_fork == true",
                                             handler_ref="stab"),
                                    ],
                                ),
                            ],
                        ),
                    ],
                ),
                node(
                    "ct2", "Transfer", "CompositeTask",
                    pre="food.on_fork == true",
                    children=[
                        node(
                            "t2", "Deliver", "Task",
                            children=[
                                node(
                                    "cs2", "Do Deliver", "CompositeSkill",
                                    children=[
                                        node("m2", "Move", "MotorSkill",
                                             pre="mouth.open == true",
                                             post="delivered == true",
                                             handler_ref="move"),
                                    ],
                                ),
                            ],
                        ),
                    ],
                ),
            ],
        ),
    }


def test_parse_roundtrip_fixpoint():
    wf = parse_workflow(tiny_robot_doc())
    text = serialize_workflow(wf)
    assert serialize_workflow(parse_workflow(text)) == text


def test_degenerate_single_activity():
    wf = parse_workflow({"target": "robot", "root": node("a", "Rest", "Activity")})
    assert wf.root.is_leaf
    assert validate_hierarchy(wf) == []


def test_level_chain_violation():
    doc = {
        "target": "robot",
        "root": node("a", "A", "Activity", children=[node("t", "T", "Task")]),
    }
    with pytest.raises(HierarchyError):
        parse_workflow(doc)
    diags = validate_hierarchy(decode_workflow(doc))
    assert any(d.rule == "LevelChain" for d in diags)


def test_duplicate_id_diagnostic():
    doc = {
        "target": "human",
        "root": node("a", "A", "Activity", children=[
            node("x", "B", "CompositeTask", children=[node("x", "C", "Task")]),
        ]),
    }
    diags = validate_hierarchy(decode_workflow(doc))
    assert [d.rule for d in diags] == ["DuplicateId"]


def test_handler_on_inner_node():
    doc = {
        "target": "human",
        "root": node("a", "A", "Activity", children=[
            node("b", "B", "CompositeTask", handler_ref="oops",
                 children=[node("c", "C", "Task")]),
        ]),
    }
    diags = validate_hierarchy(decode_workflow(doc))
    assert any(d.rule == "HandlerOnInnerNode" for d in diags)
    with pytest.raises(DanglingHandlerError):
        parse_workflow(doc)


def test_human_leaf_rule():
    # a robot-style skill chain in a human workflow is flagged
    doc = {
        "target": "human",
        "root": node("a", "A", "Activity", children=[
            node("b", "B", "CompositeTask", children=[
                node("c", "C", "Task", children=[
                    node("d", "D", "CompositeSkill", children=[
                        node("e", "E", "MotorSkill"),
                    ]),
                ]),
            ]),
        ]),
    }
    diags = validate_hierarchy(decode_workflow(doc))
    assert any(d.rule == "LeafLevel" for d in diags)


def test_robot_leaf_rule():
    doc = {
        "target": "robot",
        "root": node("a", "A", "Activity", children=[
            node("b", "B", "CompositeTask", children=[node("c", "C", "Task")]),
        ]),
    }
    diags = validate_hierarchy(decode_workflow(doc))
    assert any(d.rule == "LeafLevel" for d in diags)


def test_unknown_level_is_parse_error():
    with pytest.raises(ParseError):
        decode_workflow({"target": "robot", "root": node("a", "A", "Megatask")})


def test_gated_leaf_stays_pending():
    wf = parse_workflow(tiny_robot_doc())
    handlers = {"stab": lambda bb: ({**bb, "food.on_fork": True}, True),
                "move": lambda bb: ({**bb, "delivered": True}, True)}
    instance = WorkflowInstance.fresh(wf.root)
    bb = {"food.on_fork": False, "mouth.open": False, "delivered": False}
    # acquisition completes, transfer leaf waits on mouth.open
    for _ in range(6):
        instance, bb = step(instance, bb, handlers)
    assert instance.statuses["m2"] is Status.PENDING
    assert bb["food.on_fork"] is True
    # no spurious events for the gated leaf
    assert not any(ev.node_id == "m2" for ev in instance.trace)
    # open the mouth: leaf activates, runs, completes
    bb["mouth.open"] = True
    for _ in range(4):
        if instance.terminal:
            break
        instance, bb = step(instance, bb, handlers)
    assert instance.statuses["act"] is Status.DONE


def test_acquisition_before_transfer_ordering():
    wf = parse_workflow(tiny_robot_doc())
    handlers = {"stab": lambda bb: ({**bb, "food.on_fork": True}, True),
                "move": lambda bb: ({**bb, "delivered": True}, True)}
    result = run(wf, {"food.on_fork": False, "mouth.open": True, "delivered": False},
                 handlers, max_steps=30)
    assert result.status == "Done"
    order = [ev for ev in result.trace if ev.node_id in ("ct1", "ct2")]
    done_ct1 = next(ev.step for ev in order if ev.node_id == "ct1" and ev.event == "done")
    act_ct2 = next(ev.step for ev in order if ev.node_id == "ct2" and ev.event == "activated")
    assert done_ct1 <= act_ct2


def test_concurrent_children_both_active():
    doc = {
        "target": "human",
        "root": node("a", "Bathe", "Activity", children=[
            node("ct", "Hair", "CompositeTask", concurrent=True, children=[
                node("t1", "Shampoo", "Task", post="shampoo.done == true"),
                node("t2", "Shield", "Task", post="shield.done == true"),
            ]),
        ]),
    }
    wf = parse_workflow(doc)
    instance = WorkflowInstance.fresh(wf.root)
    bb = {"shampoo.done": False, "shield.done": False}
    instance, bb = step(instance, bb, {})
    # both regions activated in one scheduling round; both failed their
    # posts (no handler set the facts), which is the fail-fast path
    activated = [ev.node_id for ev in instance.trace if ev.event == "activated"]
    assert "t1" in activated and "t2" in activated


def test_concurrent_parent_waits_for_all_children():
    doc = {
        "target": "human",
        "root": node("a", "A", "Activity", children=[
            node("ct", "Both", "CompositeTask", concurrent=True, children=[
                node("t1", "One", "Task"),
                node("t2", "Two", "Task", pre="go.two == true"),
            ]),
        ]),
    }
    wf = parse_workflow(doc)
    instance = WorkflowInstance.fresh(wf.root)
    bb = {"go.two": False}
    instance, bb = step(instance, bb, {})
    instance, bb = step(instance, bb, {})
    assert instance.statuses["t1"] is Status.DONE
    assert instance.statuses["ct"] is Status.ACTIVE
    bb["go.two"] = True
    result_bb = bb
    for _ in range(3):
        if instance.terminal:
            break
        instance, result_bb = step(instance, result_bb, {})
    assert instance.statuses["a"] is Status.DONE


def test_sequential_parent_single_active_child():
    doc = {
        "target": "human",
        "root": node("a", "A", "Activity", children=[
            node("ct", "Seq", "CompositeTask", children=[
                node("t1", "One", "Task"),
                node("t2", "Two", "Task"),
            ]),
        ]),
    }
    wf = parse_workflow(doc)
    instance = WorkflowInstance.fresh(wf.root)
    bb = {}
    seen_double = False
    while not instance.terminal and instance.step_count < 10:
        instance, bb = step(instance, bb, {})
        active = [nid for nid in ("t1", "t2") if instance.statuses[nid] is Status.ACTIVE]
        seen_double = seen_double or len(active) > 1
    assert not seen_double
    assert instance.statuses["a"] is Status.DONE


def test_handler_failure_fails_ancestors():
    wf = parse_workflow(tiny_robot_doc())
    handlers = {"stab": lambda bb: (bb, False),
                "move": lambda bb: (bb, True)}
    result = run(wf, {"food.on_fork": False, "mouth.open": True}, handlers, max_steps=20)
    assert result.status == "Failed"
    assert result.instance.statuses["m1"] is Status.FAILED
    assert result.instance.statuses["act"] is Status.FAILED


def test_post_false_after_success_is_failure():
    # handler reports success but the post-condition does not hold
    wf = parse_workflow(tiny_robot_doc())
    handlers = {"stab": lambda bb: (bb, True),  # never sets food.on_fork
                "move": lambda bb: (bb, True)}
    result = run(wf, {"food.on_fork": False, "mouth.open": True}, handlers, max_steps=20)
    assert result.status == "Failed"
    assert result.instance.statuses["m1"] is Status.FAILED


def test_unknown_handler_raises():
    wf = parse_workflow(tiny_robot_doc())
    instance = WorkflowInstance.fresh(wf.root)
    with pytest.raises(UnknownHandler):
        for _ in range(5):
            instance, _ = step(instance, {"food.on_fork": False}, {})


def test_unsatisfiable_pre_exhausts_budget():
    wf = parse_workflow(tiny_robot_doc())
    handlers = {"stab": lambda bb: ({**bb, "food.on_fork": True}, True),
                "move": lambda bb: (bb, True)}
    result = run(wf, {"food.on_fork": False, "mouth.open": False}, handlers, max_steps=50)
    assert result.status == "BudgetExhausted"


def test_max_steps_must_be_positive():
    wf = parse_workflow(tiny_robot_doc())
    with pytest.raises(SparcsError):
        run(wf, {}, {}, max_steps=0)


def test_done_only_with_post_true():
    # every done event in the trace implies its post held at that step;
    # re-checked here by replaying the blackboard history
    wf = parse_workflow(tiny_robot_doc())
    handlers = {"stab": lambda bb: ({**bb, "food.on_fork": True}, True),
                "move": lambda bb: ({**bb, "delivered": True}, True)}
    bb = {"food.on_fork": False, "mouth.open": True, "delivered": False}
    instance = WorkflowInstance.fresh(wf.root)
    nodes = {n.id: n for _, n in wf.root.walk()}
    while not instance.terminal and instance.step_count < 30:
        prev_trace = len(instance.trace)
        instance, bb = step(instance, bb, handlers)
        for ev in instance.trace[prev_trace:]:
            if ev.event == "done":
                assert nodes[ev.node_id].post.evaluate(bb)


def test_determinism_identical_traces():
    wf = parse_workflow(tiny_robot_doc())
    handlers = {"stab": lambda bb: ({**bb, "food.on_fork": True}, True),
                "move": lambda bb: ({**bb, "delivered": True}, True)}
    bb0 = {"food.on_fork": False, "mouth.open": True, "delivered": False}
    r1 = run(wf, bb0, handlers, max_steps=30)
    r2 = run(wf, bb0, handlers, max_steps=30)
    assert [str(e) for e in r1.trace] == [str(e) for e in r2.trace]
    assert r1.blackboard == r2.blackboard


def test_active_nodes_form_root_paths():
    # at every step the active set is a union of root-to-frontier chains:
    # every active non-root node has an active parent
    wf = parse_workflow(tiny_robot_doc())
    handlers = {"stab": lambda bb: ({**bb, "food.on_fork": True}, True),
                "move": lambda bb: ({**bb, "delivered": True}, True)}
    parent = {}
    for _, n in wf.root.walk():
        for c in n.children:
            parent[c.id] = n.id
    instance = WorkflowInstance.fresh(wf.root)
    bb = {"food.on_fork": False, "mouth.open": True, "delivered": False}
    while not instance.terminal and instance.step_count < 30:
        instance, bb = step(instance, bb, handlers)
        for nid in instance.cursor:
            if nid != wf.root.id:
                assert instance.statuses[parent[nid]] is Status.ACTIVE
