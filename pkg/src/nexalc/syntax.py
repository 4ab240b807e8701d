"""Abstract syntax of non-expansive fuzzy ALC.

Truth values and thresholds are :class:`fractions.Fraction` throughout; no
floating point value ever enters a concept, assertion or model.

Core constructors are :class:`Atom`, :class:`Const`, :class:`Not`,
:class:`Minus` (truncated subtraction of a constant), :class:`And` and
:class:`Exists`.  :class:`Or`, :class:`Plus` and :class:`Forall` are sugar and
are removed by :func:`desugar`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Union

ZERO = Fraction(0)
ONE = Fraction(1)


class SyntaxErrorAt(ValueError):
    """Raised for malformed input; carries a 1-based line and column."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


# ---------------------------------------------------------------------------
# comparison operators


class CmpOp(enum.Enum):
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="

    @property
    def is_less(self) -> bool:
        return self in (CmpOp.LT, CmpOp.LE)

    @property
    def is_greater(self) -> bool:
        return not self.is_less

    @property
    def is_strict(self) -> bool:
        return self in (CmpOp.LT, CmpOp.GT)

    def flip(self) -> "CmpOp":
        return _FLIP[self]

    def toggle(self) -> "CmpOp":
        return _TOGGLE[self]

    def negate(self) -> "CmpOp":
        """The operator of the complementary assertion (``a op b`` fails iff ``a negate(op) b``)."""
        return _FLIP[_TOGGLE[self]]

    def holds(self, a: Fraction, b: Fraction) -> bool:
        if self is CmpOp.LT:
            return a < b
        if self is CmpOp.LE:
            return a <= b
        if self is CmpOp.GT:
            return a > b
        return a >= b

    def __str__(self) -> str:
        return self.value


_FLIP = {CmpOp.LT: CmpOp.GT, CmpOp.LE: CmpOp.GE, CmpOp.GT: CmpOp.LT, CmpOp.GE: CmpOp.LE}
_TOGGLE = {CmpOp.LT: CmpOp.LE, CmpOp.LE: CmpOp.LT, CmpOp.GT: CmpOp.GE, CmpOp.GE: CmpOp.GT}


def flip(op: CmpOp) -> CmpOp:
    """Turn an inequality around: ``<`` becomes ``>``, ``<=`` becomes ``>=``."""
    return _FLIP[op]


def toggle(op: CmpOp) -> CmpOp:
    """Swap strict and non-strict, keeping the direction."""
    return _TOGGLE[op]


def blacktriangle(lt: CmpOp, gt: CmpOp) -> CmpOp:
    """Comparison deciding whether a lower and an upper bound leave a gap.

    For an upper bound ``e lt d`` and a lower bound ``e gt c`` no rational ``e``
    satisfies both iff ``d blacktriangle(lt, gt) c``.
    """
    if not lt.is_less or not gt.is_greater:
        raise ValueError(f"blacktriangle expects (less, greater) operators, got ({lt}, {gt})")
    if lt is CmpOp.LE and gt is CmpOp.GE:
        return CmpOp.LT
    return CmpOp.LE


def eval_cmp(a: Fraction, op: CmpOp, b: Fraction) -> bool:
    return op.holds(a, b)


# ---------------------------------------------------------------------------
# rationals


def as_rational(value: Union[int, str, Fraction]) -> Fraction:
    """Exact conversion; decimal strings such as ``"0.3"`` become ``3/10``."""
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; use a string or Fraction")
    return Fraction(value)


def fmt_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _clog2(n: int) -> int:
    return (n - 1).bit_length() if n > 1 else 0


def rational_size(value: Fraction) -> int:
    """Integer size of a constant ``a/b``: ceil(log2 max(a, 1)) + ceil(log2 b)."""
    return _clog2(max(abs(value.numerator), 1)) + _clog2(value.denominator)


# ---------------------------------------------------------------------------
# concepts


class Concept:
    """Base class of concept syntax trees (immutable, hashable)."""

    __slots__ = ()

    def __str__(self) -> str:
        return self.text

    @cached_property
    def text(self) -> str:
        return self._render()

    @cached_property
    def size(self) -> int:
        return self._size()

    # sugar helpers for building concepts in code
    def __and__(self, other: "Concept") -> "Concept":
        return And(self, other)

    def __or__(self, other: "Concept") -> "Concept":
        return Or(self, other)

    def __invert__(self) -> "Concept":
        return Not(self)


def _wrap(c: Concept) -> str:
    if isinstance(c, (Atom, Const)):
        return c.text
    return f"({c.text})"


def _hashed(cls):
    """Give a frozen dataclass a hash computed once at construction."""

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((cls.__name__,) + tuple(getattr(self, f) for f in cls._fields)))
        check = getattr(self, "_check", None)
        if check is not None:
            check()

    cls.__post_init__ = __post_init__
    cls.__hash__ = lambda self: self._hash
    return cls


@dataclass(frozen=True, eq=True, repr=False)
@_hashed
class Atom(Concept):
    name: str
    _fields = ("name",)

    def _render(self):
        return self.name

    def _size(self):
        return 1

    def __repr__(self):
        return f"Atom({self.name!r})"


def _check_unit(value: Fraction, what: str) -> None:
    if not isinstance(value, Fraction):
        raise TypeError(f"{what} must be a Fraction, got {type(value).__name__}")
    if not ZERO <= value <= ONE:
        raise ValueError(f"{what} {fmt_rational(value)} lies outside [0,1]")


@dataclass(frozen=True, eq=True, repr=False)
@_hashed
class Const(Concept):
    value: Fraction
    _fields = ("value",)

    def _check(self):
        _check_unit(self.value, "constant")

    def _render(self):
        return fmt_rational(self.value)

    def _size(self):
        return rational_size(self.value)

    def __repr__(self):
        return f"Const({fmt_rational(self.value)})"


@dataclass(frozen=True, eq=True, repr=False)
@_hashed
class Not(Concept):
    arg: Concept
    _fields = ("arg",)

    def _render(self):
        return "!" + _wrap(self.arg)

    def _size(self):
        return self.arg.size + 1

    def __repr__(self):
        return f"Not({self.arg!r})"


@dataclass(frozen=True, eq=True, repr=False)
@_hashed
class Minus(Concept):
    """Truncated subtraction ``max(C - c, 0)``."""

    arg: Concept
    value: Fraction
    _fields = ("arg", "value")

    def _check(self):
        _check_unit(self.value, "shift constant")

    def _render(self):
        return f"{_wrap(self.arg)} (-) {fmt_rational(self.value)}"

    def _size(self):
        return self.arg.size + rational_size(self.value) + 1

    def __repr__(self):
        return f"Minus({self.arg!r}, {fmt_rational(self.value)})"


@dataclass(frozen=True, eq=True, repr=False)
@_hashed
class And(Concept):
    left: Concept
    right: Concept
    _fields = ("left", "right")

    def _render(self):
        return f"{_wrap(self.left)} & {_wrap(self.right)}"

    def _size(self):
        return self.left.size + self.right.size + 1

    def __repr__(self):
        return f"And({self.left!r}, {self.right!r})"


@dataclass(frozen=True, eq=True, repr=False)
@_hashed
class Exists(Concept):
    role: str
    arg: Concept
    _fields = ("role", "arg")

    def _render(self):
        return f"some {self.role} . {_wrap(self.arg)}"

    def _size(self):
        return self.arg.size + 1

    def __repr__(self):
        return f"Exists({self.role!r}, {self.arg!r})"


# sugar -----------------------------------------------------------------------


@dataclass(frozen=True, eq=True, repr=False)
@_hashed
class Or(Concept):
    left: Concept
    right: Concept
    _fields = ("left", "right")

    def _render(self):
        return f"{_wrap(self.left)} | {_wrap(self.right)}"

    def _size(self):
        return desugar(self).size

    def __repr__(self):
        return f"Or({self.left!r}, {self.right!r})"


@dataclass(frozen=True, eq=True, repr=False)
@_hashed
class Plus(Concept):
    """Truncated addition ``min(C + c, 1)``."""

    arg: Concept
    value: Fraction
    _fields = ("arg", "value")

    def _check(self):
        _check_unit(self.value, "shift constant")

    def _render(self):
        return f"{_wrap(self.arg)} (+) {fmt_rational(self.value)}"

    def _size(self):
        return desugar(self).size

    def __repr__(self):
        return f"Plus({self.arg!r}, {fmt_rational(self.value)})"


@dataclass(frozen=True, eq=True, repr=False)
@_hashed
class Forall(Concept):
    role: str
    arg: Concept
    _fields = ("role", "arg")

    def _render(self):
        return f"all {self.role} . {_wrap(self.arg)}"

    def _size(self):
        return desugar(self).size

    def __repr__(self):
        return f"Forall({self.role!r}, {self.arg!r})"


CORE_TYPES = (Atom, Const, Not, Minus, And, Exists)


def desugar(c: Concept) -> Concept:
    """Rewrite ``|``, ``(+)`` and ``all`` into core constructors."""
    if isinstance(c, (Atom, Const)):
        return c
    if isinstance(c, Not):
        arg = desugar(c.arg)
        return c if arg is c.arg else Not(arg)
    if isinstance(c, Minus):
        arg = desugar(c.arg)
        return c if arg is c.arg else Minus(arg, c.value)
    if isinstance(c, And):
        left, right = desugar(c.left), desugar(c.right)
        return c if (left is c.left and right is c.right) else And(left, right)
    if isinstance(c, Exists):
        arg = desugar(c.arg)
        return c if arg is c.arg else Exists(c.role, arg)
    if isinstance(c, Or):
        return Not(And(Not(desugar(c.left)), Not(desugar(c.right))))
    if isinstance(c, Plus):
        return Not(Minus(Not(desugar(c.arg)), c.value))
    if isinstance(c, Forall):
        return Not(Exists(c.role, Not(desugar(c.arg))))
    raise TypeError(f"not a concept: {c!r}")


def is_core(c: Concept) -> bool:
    return all(isinstance(s, CORE_TYPES) for s in subconcepts(c))


def subconcepts(c: Concept) -> Iterator[Concept]:
    """All subconcept occurrences, pre-order (duplicates included)."""
    stack = [c]
    while stack:
        d = stack.pop()
        yield d
        if isinstance(d, (And, Or)):
            stack.append(d.right)
            stack.append(d.left)
        elif isinstance(d, (Not, Minus, Plus, Exists, Forall)):
            stack.append(d.arg)


def constants_of(c: Concept) -> set[Fraction]:
    out = set()
    for d in subconcepts(c):
        if isinstance(d, Const):
            out.add(d.value)
        elif isinstance(d, (Minus, Plus)):
            out.add(d.value)
    return out


def atoms_of(c: Concept) -> set[str]:
    return {d.name for d in subconcepts(c) if isinstance(d, Atom)}


def roles_of(c: Concept) -> set[str]:
    return {d.role for d in subconcepts(c) if isinstance(d, (Exists, Forall))}


def role_depth(c: Concept) -> int:
    if isinstance(c, (Atom, Const)):
        return 0
    if isinstance(c, (Exists, Forall)):
        return 1 + role_depth(c.arg)
    if isinstance(c, (And, Or)):
        return max(role_depth(c.left), role_depth(c.right))
    return role_depth(c.arg)


# ---------------------------------------------------------------------------
# assertions, sequents, knowledge bases


@dataclass(frozen=True, eq=True)
class Assertion:
    """A concept assertion ``C op c``; the threshold may leave [0,1]."""

    concept: Concept
    op: CmpOp
    threshold: Fraction

    def __post_init__(self):
        if not isinstance(self.threshold, Fraction):
            raise TypeError("threshold must be a Fraction")
        object.__setattr__(self, "_hash", hash((self.concept, self.op, self.threshold)))

    def __hash__(self):
        return self._hash

    @cached_property
    def sort_key(self) -> tuple:
        return (self.concept.text, self.op.is_greater, self.op.is_strict, self.threshold)

    @property
    def size(self) -> int:
        return self.concept.size + rational_size(self.threshold)

    @property
    def is_ground(self) -> bool:
        return isinstance(self.concept, Const)

    def __str__(self) -> str:
        return f"{self.concept.text} {self.op.value} {fmt_rational(self.threshold)}"

    def __repr__(self) -> str:
        return f"Assertion({self})"


class Sequent:
    """A finite set of assertions with a canonical order.

    Equality and hashing ignore order; iteration follows the canonical order
    (printed concept, direction, strictness, threshold).
    """

    __slots__ = ("_set", "_sorted", "_hash")

    def __init__(self, assertions: Iterable[Assertion] = ()):
        self._set = frozenset(assertions)
        self._sorted = None
        self._hash = hash(self._set)

    @property
    def assertions(self) -> tuple[Assertion, ...]:
        if self._sorted is None:
            self._sorted = tuple(sorted(self._set, key=_sort_key))
        return self._sorted

    def __iter__(self):
        return iter(self.assertions)

    def __len__(self):
        return len(self._set)

    def __contains__(self, a):
        return a in self._set

    def __eq__(self, other):
        return isinstance(other, Sequent) and self._set == other._set

    def __hash__(self):
        return self._hash

    def as_set(self) -> frozenset:
        return self._set

    def replace(self, old: Assertion, new: Iterable[Assertion]) -> "Sequent":
        return Sequent((self._set - {old}).union(new))

    def union(self, more: Iterable[Assertion]) -> "Sequent":
        return Sequent(self._set.union(more))

    @property
    def size(self) -> int:
        return sum(a.size for a in self._set)

    def __str__(self):
        return "{" + ", ".join(str(a) for a in self.assertions) + "}"

    def __repr__(self):
        return f"Sequent({self})"


def _sort_key(a: Assertion) -> tuple:
    return a.sort_key


@dataclass(frozen=True)
class GCI:
    lhs: Concept
    rhs: Concept

    @property
    def size(self) -> int:
        return self.lhs.size + self.rhs.size

    def __str__(self):
        return f"{self.lhs.text} [= {self.rhs.text}"


@dataclass(frozen=True)
class RoleAssertion:
    """``R(source, target) op c`` with ``op`` a lower bound (``>`` or ``>=``)."""

    role: str
    source: str
    target: str
    op: CmpOp
    threshold: Fraction

    def __post_init__(self):
        if not self.op.is_greater:
            raise ValueError(f"role assertions must use > or >=, got {self.op}")

    def __str__(self):
        return f"({self.source}, {self.target}) : {self.role} {self.op} {fmt_rational(self.threshold)}"


@dataclass(frozen=True)
class ABox:
    concept_assertions: tuple[tuple[str, Assertion], ...] = ()
    role_assertions: tuple[RoleAssertion, ...] = ()

    @property
    def individuals(self) -> list[str]:
        seen = {}
        for name, _ in self.concept_assertions:
            seen.setdefault(name, None)
        for ra in self.role_assertions:
            seen.setdefault(ra.source, None)
            seen.setdefault(ra.target, None)
        return list(seen)

    def assertions_for(self, name: str) -> list[Assertion]:
        return [a for n, a in self.concept_assertions if n == name]

    def __bool__(self):
        return bool(self.concept_assertions or self.role_assertions)


TBox = tuple  # tuple[GCI, ...]


@dataclass(frozen=True)
class KB:
    """Everything a KB file may contain."""

    tbox: tuple[GCI, ...] = ()
    query: tuple[Assertion, ...] = ()
    abox: ABox = field(default_factory=ABox)
    concepts: tuple[Concept, ...] = ()  # bare concepts (classical KB files)


def size(x) -> int:
    """Syntactic size of a concept, assertion, sequent, GCI or TBox."""
    if isinstance(x, (Concept, Assertion, Sequent, GCI)):
        return x.size
    if isinstance(x, (tuple, list)):
        return sum(size(y) for y in x)
    raise TypeError(f"no size for {type(x).__name__}")


def desugar_assertion(a: Assertion) -> Assertion:
    c = desugar(a.concept)
    return a if c is a.concept else Assertion(c, a.op, a.threshold)


def desugar_gci(g: GCI) -> GCI:
    return GCI(desugar(g.lhs), desugar(g.rhs))


def negate_assertion(a: Assertion) -> Assertion:
    """The assertion that holds exactly where ``a`` fails."""
    return Assertion(a.concept, a.op.negate(), a.threshold)


def gcd_rationals(values: Iterable[Fraction]) -> Fraction:
    """Generator of the additive subgroup of Q spanned by ``values`` (nonzero input)."""
    vals = [abs(Fraction(v)) for v in values if v != 0]
    if not vals:
        raise ValueError("gcd of no nonzero rationals")
    lcm = 1
    for v in vals:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    g = 0
    for v in vals:
        g = math.gcd(g, v.numerator * (lcm // v.denominator))
    return Fraction(g, lcm)
