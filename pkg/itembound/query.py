"""
Boolean queries over attributes.

Grammar (loosest binding first):

    expr   := term ('|' term)*
    term   := factor ('&' factor)*
    factor := '!' factor | '(' expr ')' | '0' | '1' | name

Names are identifiers (`[A-Za-z_][A-Za-z0-9_.-]*`) or double-quoted strings,
so numeric item names from FIMI files are written as `"12"`.
"""

import random
import re
from dataclasses import dataclass
from typing import Callable, FrozenSet, List, Mapping, Sequence, Tuple, Union

import numpy as np

from .core import AttributeUniverse, Itemset, assignment_masks
from .errors import DomainMismatchError, QuerySyntaxError, UnboundVariableError


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int

    def __post_init__(self):
        if self.value not in (0, 1):
            raise ValueError(f"constant must be 0 or 1, got {self.value}")


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


Formula = Union[Var, Const, Not, And, Or]

_TOKEN = re.compile(r'''
    (?P<space>\s+)
  | (?P<op>[&|!()])
  | "(?P<quoted>[^"]*)"
  | (?P<name>[A-Za-z_][A-Za-z0-9_.\-]*)
  | (?P<number>\d+)
''', re.VERBOSE)
_IDENTIFIER = re.compile(r'[A-Za-z_][A-Za-z0-9_.\-]*\Z')


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup
        if kind == "op":
            tokens.append(("op", match.group("op"), pos))
        elif kind == "quoted":
            if not match.group("quoted"):
                raise QuerySyntaxError("empty quoted name", pos)
            tokens.append(("name", match.group("quoted"), pos))
        elif kind == "name":
            tokens.append(("name", match.group("name"), pos))
        elif kind == "number":
            if match.group("number") not in ("0", "1"):
                raise QuerySyntaxError(
                    "numeric names must be quoted, e.g. \"12\"", pos)
            tokens.append(("const", match.group("number"), pos))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> Tuple[str, str, int]:
        token = self.tokens[self.i]
        self.i += 1
        return token

    def parse(self) -> Formula:
        formula = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise QuerySyntaxError(f"unexpected {value!r}", pos)
        return formula

    def expr(self) -> Formula:
        left = self.term()
        while self.peek()[:2] == ("op", "|"):
            self.take()
            left = Or(left, self.term())
        return left

    def term(self) -> Formula:
        left = self.factor()
        while self.peek()[:2] == ("op", "&"):
            self.take()
            left = And(left, self.factor())
        return left

    def factor(self) -> Formula:
        kind, value, pos = self.take()
        if kind == "op" and value == "!":
            return Not(self.factor())
        if kind == "op" and value == "(":
            inner = self.expr()
            kind, value, close = self.take()
            if (kind, value) != ("op", ")"):
                raise QuerySyntaxError("expected ')'", close)
            return inner
        if kind == "const":
            return Const(int(value))
        if kind == "name":
            return Var(value)
        if kind == "end":
            raise QuerySyntaxError("unexpected end of query", pos)
        raise QuerySyntaxError(f"expected an operand, got {value!r}", pos)


def parse(text: str) -> Formula:
    """Parse a query; names are resolved later, against a universe."""
    return _Parser(text).parse()


_PRECEDENCE = {Or: 1, And: 2, Not: 3, Var: 4, Const: 4}


def format_formula(f: Formula) -> str:
    """Text that parses back to the same formula."""
    def wrap(child: Formula, bound: int) -> str:
        text = format_formula(child)
        return f"({text})" if _PRECEDENCE[type(child)] < bound else text

    if isinstance(f, Var):
        return f.name if _IDENTIFIER.match(f.name) else f'"{f.name}"'
    if isinstance(f, Const):
        return str(f.value)
    if isinstance(f, Not):
        return "!" + wrap(f.arg, 3)
    op = " | " if isinstance(f, Or) else " & "
    p = _PRECEDENCE[type(f)]
    return wrap(f.left, p) + op + wrap(f.right, p + 1)


def evaluate(f: Formula, assignment: Mapping[str, int]) -> int:
    """Value of the formula under a name -> bit assignment."""
    if isinstance(f, Var):
        try:
            return int(bool(assignment[f.name]))
        except KeyError:
            raise UnboundVariableError(f.name) from None
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return 1 - evaluate(f.arg, assignment)
    if isinstance(f, And):
        return evaluate(f.left, assignment) & evaluate(f.right, assignment)
    return evaluate(f.left, assignment) | evaluate(f.right, assignment)


def variables(f: Formula) -> FrozenSet[str]:
    if isinstance(f, Var):
        return frozenset((f.name,))
    if isinstance(f, Const):
        return frozenset()
    if isinstance(f, Not):
        return variables(f.arg)
    return variables(f.left) | variables(f.right)


def support(f: Formula, universe: AttributeUniverse) -> Itemset:
    """Syntactic support: every attribute named in the formula."""
    return universe.itemset(sorted(variables(f)))


def evaluate_masks(f: Formula, masks: np.ndarray,
                   universe: AttributeUniverse) -> np.ndarray:
    """Vectorized evaluation over an array of global assignment masks."""
    if isinstance(f, Var):
        return (masks >> universe.index(f.name)) & 1 == 1
    if isinstance(f, Const):
        return np.full(masks.shape, bool(f.value))
    if isinstance(f, Not):
        return ~evaluate_masks(f.arg, masks, universe)
    left = evaluate_masks(f.left, masks, universe)
    right = evaluate_masks(f.right, masks, universe)
    return left & right if isinstance(f, And) else left | right


def compile_formula(f: Formula,
                    universe: AttributeUniverse) -> Callable[[int], int]:
    """A function of one global mask, with names resolved once."""
    if isinstance(f, Var):
        bit = universe.index(f.name)
        return lambda z: z >> bit & 1
    if isinstance(f, Const):
        value = f.value
        return lambda z: value
    if isinstance(f, Not):
        inner = compile_formula(f.arg, universe)
        return lambda z: 1 - inner(z)
    left = compile_formula(f.left, universe)
    right = compile_formula(f.right, universe)
    if isinstance(f, And):
        return lambda z: left(z) & right(z)
    return lambda z: left(z) | right(z)


def objective_vector(f: Formula, attrs: Itemset,
                     universe: AttributeUniverse) -> Tuple[int, ...]:
    """f evaluated on every assignment of `attrs`, in canonical order."""
    B = support(f, universe)
    if not B.issubset(attrs):
        raise DomainMismatchError(
            f"query support {universe.format(B)} is not contained in "
            f"{universe.format(attrs)}")
    values = evaluate_masks(f, assignment_masks(attrs), universe)
    return tuple(int(v) for v in values)


def conjunction(names: Sequence[str]) -> Formula:
    if not names:
        return Const(1)
    formula: Formula = Var(names[0])
    for name in names[1:]:
        formula = And(formula, Var(name))
    return formula


def random_conjunction(names: Sequence[str], size: int,
                       rng: random.Random) -> Formula:
    chosen = sorted(rng.sample(list(names), size), key=list(names).index)
    return conjunction(chosen)


def random_formula(names: Sequence[str], size: int, rng: random.Random,
                   negation_rate: float = 0.3) -> Formula:
    """Random And/Or/Not formula using each of `size` chosen names once."""
    chosen = rng.sample(list(names), size)
    parts: List[Formula] = [
        Not(Var(n)) if rng.random() < negation_rate else Var(n) for n in chosen]
    while len(parts) > 1:
        i = rng.randrange(len(parts) - 1)
        op = And if rng.random() < 0.5 else Or
        combined: Formula = op(parts[i], parts[i + 1])
        if rng.random() < negation_rate / 2:
            combined = Not(combined)
        parts[i:i + 2] = [combined]
    return parts[0]
