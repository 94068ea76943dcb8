import pytest

from sparcs.conditions import ConditionTypeError, ParseError, parse_condition


def test_comparisons():
    bb = {"food.count": 3, "user.name": "nat", "mouth.open": True}
    assert parse_condition("food.count == 3").evaluate(bb)
    assert parse_condition("food.count >= 3").evaluate(bb)
    assert not parse_condition("food.count < 3").evaluate(bb)
    assert parse_condition('user.name == "nat"').evaluate(bb)
    assert parse_condition("mouth.open == true").evaluate(bb)
    assert parse_condition("mouth.open != false").evaluate(bb)


def test_boolean_connectives_and_precedence():
    bb = {"a": 1, "b": 2}
    # and binds tighter than or
    assert parse_condition("a == 9 or a == 1 and b == 2").evaluate(bb)
    assert not parse_condition("(a == 9 or a == 1) and b == 9").evaluate(bb)
    assert parse_condition("not a == 9").evaluate(bb)
    assert parse_condition("not (a == 1 and b == 9)").evaluate(bb)


def test_missing_path_is_false():
    assert not parse_condition("ghost.key == 1").evaluate({})
    assert not parse_condition("ghost.key != 1").evaluate({})
    # but negation of a missing comparison is true
    assert parse_condition("not ghost.key == 1").evaluate({})


def test_type_mismatch_raises():
    with pytest.raises(ConditionTypeError):
        parse_condition('count == "three"').evaluate({"count": 3})
    with pytest.raises(ConditionTypeError):
        parse_condition("flag < 1").evaluate({"flag": True})
    with pytest.raises(ConditionTypeError):
        parse_condition("flag == 1").evaluate({"flag": True})


def test_grammar_errors():
    for bad in ("==", "a ==", "a == 1 extra junk(", "1 == a", "a.b &&", "(a == 1", "and == 1"):
        with pytest.raises(ParseError):
            parse_condition(bad)


def test_default_constants():
    assert parse_condition("true").evaluate({})
    assert not parse_condition("false").evaluate({})
    assert parse_condition("true").is_default


def test_paths_collection():
    cond = parse_condition("a.b == 1 and (c == 2 or not d.e.f == true)")
    assert cond.paths() == ["a.b", "c", "d.e.f"]


def test_string_ordering_allowed():
    assert parse_condition('name < "zz"').evaluate({"name": "aa"})


def test_negative_and_float_literals():
    assert parse_condition("x == -2").evaluate({"x": -2})
    assert parse_condition("x <= -1.5").evaluate({"x": -2.0})
