"""Pre/post-condition expressions evaluated against a blackboard.

Grammar (EBNF):

    expr    := or
    or      := and {"or" and}
    and     := unary {"and" unary}
    unary   := ["not"] primary
    primary := "(" expr ")" | path cmp literal
    cmp     := "==" | "!=" | "<" | "<=" | ">" | ">="
    path    := ident {"." ident}
    literal := number | quoted string | "true" | "false"

The blackboard maps dotted path strings to scalars. A comparison against a
path that is absent from the blackboard evaluates to false; comparing
values of different type families raises ConditionTypeError. The bare
source "true"/"false" is accepted as a constant, which is how omitted
conditions are represented.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import SparcsError


class ParseError(SparcsError):
    """Condition source does not match the grammar."""


class ConditionTypeError(SparcsError):
    """Comparison between incompatible value types."""


_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<op>==|!=|<=|>=|<|>)
      | (?P<lparen>\()
      | (?P<rparen>\))
      | (?P<number>-?\d+(?:\.\d+)?)
      | (?P<string>"[^"]*"|'[^']*')
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<dot>\.)
    )""",
    re.VERBOSE,
)


def _tokenize(source: str) -> list:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.end() == pos:
            rest = source[pos:].strip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r} in condition {source!r}")
        pos = m.end()
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
    return tokens


@dataclass(frozen=True)
class Comparison:
    path: str
    op: str
    literal: object

    def evaluate(self, blackboard: dict) -> bool:
        if self.path not in blackboard:
            return False
        value = blackboard[self.path]
        lit = self.literal
        if isinstance(value, bool) != isinstance(lit, bool) or (
            isinstance(value, str) != isinstance(lit, str)
        ):
            raise ConditionTypeError(
                f"cannot compare blackboard {self.path}={value!r} with {lit!r}"
            )
        if self.op == "==":
            return value == lit
        if self.op == "!=":
            return value != lit
        if isinstance(value, bool):
            raise ConditionTypeError(f"ordering comparison on boolean path {self.path}")
        if self.op == "<":
            return value < lit
        if self.op == "<=":
            return value <= lit
        if self.op == ">":
            return value > lit
        return value >= lit

    def paths(self):
        yield self.path


@dataclass(frozen=True)
class Constant:
    value: bool

    def evaluate(self, blackboard: dict) -> bool:
        return self.value

    def paths(self):
        return iter(())


@dataclass(frozen=True)
class Not:
    inner: object

    def evaluate(self, blackboard: dict) -> bool:
        return not self.inner.evaluate(blackboard)

    def paths(self):
        yield from self.inner.paths()


@dataclass(frozen=True)
class BoolOp:
    op: str                    # "and" | "or"
    items: tuple

    def evaluate(self, blackboard: dict) -> bool:
        if self.op == "and":
            return all(item.evaluate(blackboard) for item in self.items)
        return any(item.evaluate(blackboard) for item in self.items)

    def paths(self):
        for item in self.items:
            yield from item.paths()


class _Parser:
    def __init__(self, tokens, source):
        self.tokens = tokens
        self.source = source
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None:
            raise ParseError(f"unexpected end of condition {self.source!r}")
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind} but found {tok[1]!r} in {self.source!r}")
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r} but found {tok[1]!r} in {self.source!r}")
        self.pos += 1
        return tok

    def parse(self):
        expr = self.parse_or()
        if self.peek()[0] is not None:
            raise ParseError(f"trailing tokens after expression in {self.source!r}")
        return expr

    def parse_or(self):
        items = [self.parse_and()]
        while self.peek() == ("ident", "or"):
            self.take()
            items.append(self.parse_and())
        return items[0] if len(items) == 1 else BoolOp("or", tuple(items))

    def parse_and(self):
        items = [self.parse_unary()]
        while self.peek() == ("ident", "and"):
            self.take()
            items.append(self.parse_unary())
        return items[0] if len(items) == 1 else BoolOp("and", tuple(items))

    def parse_unary(self):
        if self.peek() == ("ident", "not"):
            self.take()
            return Not(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self):
        kind, _ = self.peek()
        if kind == "lparen":
            self.take()
            inner = self.parse_or()
            self.take("rparen")
            return inner
        path = self.parse_path()
        op = self.take("op")[1]
        literal = self.parse_literal()
        return Comparison(path, op, literal)

    def parse_path(self):
        parts = [self.take("ident")[1]]
        if parts[0] in ("true", "false", "and", "or", "not"):
            raise ParseError(f"keyword {parts[0]!r} cannot start a path in {self.source!r}")
        while self.peek()[0] == "dot":
            self.take()
            parts.append(self.take("ident")[1])
        return ".".join(parts)

    def parse_literal(self):
        kind, value = self.peek()
        if kind == "number":
            self.take()
            return float(value) if "." in value else int(value)
        if kind == "string":
            self.take()
            return value[1:-1]
        if kind == "ident" and value in ("true", "false"):
            self.take()
            return value == "true"
        raise ParseError(f"expected a literal, found {value!r} in {self.source!r}")


@dataclass(frozen=True)
class ConditionExpr:
    """A parsed condition plus its original source text."""

    source: str
    ast: object

    def evaluate(self, blackboard: dict) -> bool:
        return self.ast.evaluate(blackboard)

    def paths(self) -> list:
        return sorted(set(self.ast.paths()))

    @property
    def is_default(self) -> bool:
        return self.source == "true"


def parse_condition(source: str) -> ConditionExpr:
    source = source.strip()
    if source == "true":
        return ALWAYS_TRUE
    if source == "false":
        return ConditionExpr("false", Constant(False))
    tokens = _tokenize(source)
    if not tokens:
        raise ParseError("empty condition")
    return ConditionExpr(source, _Parser(tokens, source).parse())


ALWAYS_TRUE = ConditionExpr("true", Constant(True))
