"""Seeded random generators for concepts, KBs and interpretations used by the suites."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from nexalc.semantics import Interpretation
from nexalc.syntax import (
    And, Assertion, Atom, CmpOp, Const, Exists, Forall, GCI, Minus, Not, Or, Plus, atoms_of, roles_of,
)

QUARTERS = tuple(Fraction(i, 4) for i in range(5))
OPS = (CmpOp.GE, CmpOp.GT, CmpOp.LE, CmpOp.LT)


def random_concept(rng: random.Random, depth: int, atoms=("A", "B", "C"), roles=("R",),
                   consts=QUARTERS, sugar=True):
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.12:
            return Const(rng.choice(consts))
        return Atom(rng.choice(atoms))
    kinds = ["not", "minus", "and", "exists"]
    if sugar:
        kinds += ["or", "plus", "forall"]
    k = rng.choice(kinds)
    sub = lambda: random_concept(rng, depth - 1, atoms, roles, consts, sugar)
    if k == "not":
        return Not(sub())
    if k == "minus":
        return Minus(sub(), rng.choice(consts[1:]))
    if k == "plus":
        return Plus(sub(), rng.choice(consts[1:]))
    if k == "and":
        return And(sub(), sub())
    if k == "or":
        return Or(sub(), sub())
    if k == "exists":
        return Exists(rng.choice(roles), sub())
    return Forall(rng.choice(roles), sub())


@dataclass
class RandomKB:
    seed: int
    gamma: tuple
    tbox: tuple

    def __str__(self):
        q = "; ".join(str(a) for a in self.gamma)
        t = "; ".join(str(g) for g in self.tbox)
        return f"seed={self.seed} query=[{q}] tbox=[{t}]"


def random_kb(seed: int, max_depth: int = 4, max_gcis: int = 2, max_query: int = 2) -> RandomKB:
    """At most 3 atoms, 1-2 roles, constants in quarters, at most ``max_gcis`` GCIs."""
    rng = random.Random(seed)
    atoms = ("A", "B", "C")[: rng.randint(1, 3)]
    roles = ("R", "S")[: rng.randint(1, 2)]

    def concept(d):
        return random_concept(rng, rng.randint(0, d), atoms, roles)

    gamma = tuple(Assertion(concept(max_depth), rng.choice(OPS), rng.choice(QUARTERS))
                  for _ in range(rng.randint(1, max_query)))
    tbox = tuple(GCI(concept(max_depth - 1), concept(max_depth - 1)) for _ in range(rng.randint(0, max_gcis)))
    return RandomKB(seed, gamma, tbox)


def random_interpretation(rng: random.Random, concepts, values, size: int = None) -> Interpretation:
    size = size or rng.randint(1, 3)
    dom = tuple(f"x{i}" for i in range(size))
    atoms = sorted(set().union(*(atoms_of(c) for c in concepts))) if concepts else []
    roles = sorted(set().union(*(roles_of(c) for c in concepts))) if concepts else []
    return Interpretation(
        dom,
        {(a, x): rng.choice(values) for a in atoms for x in dom},
        {(r, x, y): rng.choice(values) for r in roles for x in dom for y in dom},
    )


def random_classical_kb(seed: int):
    """Classical KB over !, &, some (plus | and all as sugar): 1-2 query concepts, at most 2 GCIs."""
    from nexalc.syntax import KB
    rng = random.Random(seed)
    atoms = ("A", "B")[: rng.randint(1, 2)]
    roles = ("R",)

    def concept(d):
        if d <= 0 or rng.random() < 0.3:
            return Atom(rng.choice(atoms))
        k = rng.choice(["not", "and", "or", "exists", "forall"])
        if k == "not":
            return Not(concept(d - 1))
        if k == "and":
            return And(concept(d - 1), concept(d - 1))
        if k == "or":
            return Or(concept(d - 1), concept(d - 1))
        if k == "exists":
            return Exists(rng.choice(roles), concept(d - 1))
        return Forall(rng.choice(roles), concept(d - 1))

    concepts = tuple(concept(3) for _ in range(rng.randint(1, 2)))
    tbox = tuple(GCI(concept(2), concept(2)) for _ in range(rng.randint(0, 2)))
    return KB(tbox=tbox, concepts=concepts)
