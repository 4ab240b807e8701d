"""Finite fuzzy interpretations and exact valuation of concepts."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .syntax import (
    ONE, ZERO, And, Assertion, Atom, Concept, Const, Exists, Forall, GCI, Minus, Not, Or, Plus,
    Sequent, fmt_rational, subconcepts,
)


@dataclass(frozen=True)
class Interpretation:
    """Finite interpretation; unlisted atom and role values are 0."""

    domain: tuple[str, ...]
    concepts: Mapping[tuple[str, str], Fraction] = field(default_factory=dict)
    roles: Mapping[tuple[str, str, str], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        if not self.domain:
            raise ValueError("interpretation needs a nonempty domain")
        if len(set(self.domain)) != len(self.domain):
            raise ValueError("duplicate individuals in domain")
        dom = set(self.domain)
        for (atom, x), v in self.concepts.items():
            if x not in dom:
                raise ValueError(f"atom {atom} valued at unknown individual {x}")
            _check_value(v)
        for (role, x, y), v in self.roles.items():
            if x not in dom or y not in dom:
                raise ValueError(f"role {role} valued at unknown pair ({x}, {y})")
            _check_value(v)

    def atom(self, name: str, x: str) -> Fraction:
        return self.concepts.get((name, x), ZERO)

    def role(self, name: str, x: str, y: str) -> Fraction:
        return self.roles.get((name, x, y), ZERO)

    # serialization -------------------------------------------------------------
    def to_json(self) -> dict:
        concepts: dict = {}
        for (atom, x), v in sorted(self.concepts.items()):
            concepts.setdefault(atom, {})[x] = fmt_rational(v)
        roles: dict = {}
        for (role, x, y), v in sorted(self.roles.items()):
            roles.setdefault(role, {}).setdefault(x, {})[y] = fmt_rational(v)
        return {"domain": list(self.domain), "concepts": concepts, "roles": roles}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "Interpretation":
        concepts = {(atom, x): Fraction(v)
                    for atom, vals in data.get("concepts", {}).items() for x, v in vals.items()}
        roles = {(role, x, y): Fraction(v)
                 for role, rows in data.get("roles", {}).items()
                 for x, row in rows.items() for y, v in row.items()}
        return cls(tuple(data["domain"]), concepts, roles)

    @classmethod
    def loads(cls, text: str) -> "Interpretation":
        return cls.from_json(json.loads(text))


def _check_value(v):
    if not isinstance(v, Fraction):
        raise TypeError(f"truth values must be Fractions, got {type(v).__name__}")
    if not ZERO <= v <= ONE:
        raise ValueError(f"truth value {v} outside [0,1]")


class Evaluator:
    """Memoized valuation of concepts over all individuals of one interpretation."""

    def __init__(self, interp: Interpretation):
        self.I = interp
        self._memo: dict[Concept, dict[str, Fraction]] = {}

    def values(self, c: Concept) -> dict[str, Fraction]:
        got = self._memo.get(c)
        if got is None:
            got = self._memo[c] = self._compute(c)
        return got

    def __call__(self, x: str, c: Concept) -> Fraction:
        if x not in self.I.domain:
            raise KeyError(f"unknown individual {x!r}")
        return self.values(c)[x]

    def _compute(self, c: Concept) -> dict[str, Fraction]:
        I = self.I
        dom = I.domain
        if isinstance(c, Atom):
            return {x: I.atom(c.name, x) for x in dom}
        if isinstance(c, Const):
            return {x: c.value for x in dom}
        if isinstance(c, Not):
            v = self.values(c.arg)
            return {x: ONE - v[x] for x in dom}
        if isinstance(c, Minus):
            v = self.values(c.arg)
            return {x: max(v[x] - c.value, ZERO) for x in dom}
        if isinstance(c, Plus):
            v = self.values(c.arg)
            return {x: min(v[x] + c.value, ONE) for x in dom}
        if isinstance(c, And):
            l, r = self.values(c.left), self.values(c.right)
            return {x: min(l[x], r[x]) for x in dom}
        if isinstance(c, Or):
            l, r = self.values(c.left), self.values(c.right)
            return {x: max(l[x], r[x]) for x in dom}
        if isinstance(c, Exists):
            v = self.values(c.arg)
            return {x: max(min(I.role(c.role, x, y), v[y]) for y in dom) for x in dom}
        if isinstance(c, Forall):
            v = self.values(c.arg)
            return {x: min(max(ONE - I.role(c.role, x, y), v[y]) for y in dom) for x in dom}
        raise TypeError(f"not a concept: {c!r}")

    def holds(self, x: str, a: Assertion) -> bool:
        return a.op.holds(self(x, a.concept), a.threshold)


def evaluate(interp: Interpretation, x: str, c: Concept) -> Fraction:
    """Exact value of ``c`` at ``x`` (sugar is evaluated directly)."""
    return Evaluator(interp)(x, c)


def check_assertion(interp: Interpretation, x: str, a: Assertion) -> bool:
    return Evaluator(interp).holds(x, a)


def check_sequent(interp: Interpretation, x: str, s: Sequent | Iterable[Assertion], ev: Evaluator | None = None) -> bool:
    ev = ev or Evaluator(interp)
    return all(ev.holds(x, a) for a in s)


def check_tbox(interp: Interpretation, tbox: Iterable[GCI], ev: Evaluator | None = None) -> bool:
    ev = ev or Evaluator(interp)
    for g in tbox:
        lhs, rhs = ev.values(g.lhs), ev.values(g.rhs)
        if any(lhs[x] > rhs[x] for x in interp.domain):
            return False
    return True


def snap_value(v: Fraction, Z: tuple[Fraction, ...], eps: Fraction) -> Fraction:
    """Identity on ``Z``; otherwise the largest ``z + eps`` with ``z < v``."""
    if v in Z:
        return v
    return max(min(z + eps, ONE) for z in Z if z < v)


def snap_to_grid(interp: Interpretation, Z: Iterable[Fraction], eps: Fraction) -> Interpretation:
    Z = tuple(sorted(Z))
    zset = frozenset(Z)

    def snap(v):
        return v if v in zset else snap_value(v, Z, eps)

    return Interpretation(
        interp.domain,
        {k: snap(v) for k, v in interp.concepts.items()},
        {k: snap(v) for k, v in interp.roles.items()},
    )


def kb_subconcepts(concepts: Iterable[Concept]) -> list[Concept]:
    seen: dict[Concept, None] = {}
    for c in concepts:
        for d in subconcepts(c):
            seen.setdefault(d, None)
    return list(seen)
