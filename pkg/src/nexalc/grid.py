"""Truth-value grid and the associated assertion encoding a TBox.

For a TBox and query the grid ``Z`` is the intersection of [0,1] with the
additive subgroup of Q generated by 1 and every constant that occurs;
``Z'`` adds the midpoints.  The associated assertion ``T >= 1`` holds at an
individual iff every GCI ``C [= D`` holds there with some witness ``z`` in
``Z'`` (``C <= z <= D``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .syntax import (
    ABox, And, Assertion, CmpOp, Concept, Const, GCI, Not, ONE, Or, Plus, ZERO,
    constants_of, desugar, fmt_rational, gcd_rationals,
)


@dataclass(frozen=True)
class Grid:
    step: Fraction
    Z: tuple[Fraction, ...]
    epsilon: Fraction
    Zprime: tuple[Fraction, ...]

    def describe(self) -> str:
        return (f"step={fmt_rational(self.step)} |Z|={len(self.Z)} "
                f"epsilon={fmt_rational(self.epsilon)} |Z'|={len(self.Zprime)}")


def kb_constants(tbox: Iterable[GCI] = (), query: Iterable[Assertion] = (), abox: ABox | None = None) -> set[Fraction]:
    consts: set[Fraction] = set()
    for g in tbox:
        consts |= constants_of(g.lhs) | constants_of(g.rhs)
    for a in query:
        consts |= constants_of(a.concept)
        consts.add(a.threshold)
    if abox:
        for _, a in abox.concept_assertions:
            consts |= constants_of(a.concept)
            consts.add(a.threshold)
        for ra in abox.role_assertions:
            consts.add(ra.threshold)
    return consts


def grid_from_step(step: Fraction) -> Grid:
    n = 1 / step
    if n.denominator != 1:
        raise ValueError(f"1 is not a multiple of the step {step}")
    n = int(n)
    Z = tuple(step * i for i in range(n + 1))
    eps = step / 2
    Zprime = tuple(eps * i for i in range(2 * n + 1))
    return Grid(step, Z, eps, Zprime)


def compute_grid(tbox: Iterable[GCI] = (), query: Iterable[Assertion] = (), abox: ABox | None = None) -> Grid:
    tbox = tuple(tbox)
    query = tuple(query)
    consts = kb_constants(tbox, query, abox)
    step = gcd_rationals([ONE, *consts])
    grid = grid_from_step(step)
    zset = set(grid.Z)
    for c in consts:
        if ZERO <= c <= ONE:
            assert c in zset, f"constant {c} missing from grid"
    return grid


def gci_disjunction(gci: GCI, zprime: Iterable[Fraction]) -> Concept:
    """Right-nested ``OR_z (!C (+) z) & (D (+) (1 - z))`` in ascending ``z`` order."""
    disjuncts = [And(Plus(Not(desugar(gci.lhs)), z), Plus(desugar(gci.rhs), ONE - z))
                 for z in sorted(zprime)]
    out = disjuncts[-1]
    for d in reversed(disjuncts[:-1]):
        out = Or(d, out)
    return out


def associated_assertion(tbox: Iterable[GCI], grid: Grid) -> Assertion:
    """The assertion ``T >= 1`` in core form (``1 >= 1`` for an empty TBox)."""
    conjuncts = [gci_disjunction(g, grid.Zprime) for g in tbox]
    if not conjuncts:
        return Assertion(Const(ONE), CmpOp.GE, ONE)
    out = conjuncts[-1]
    for c in reversed(conjuncts[:-1]):
        out = And(c, out)
    return Assertion(desugar(out), CmpOp.GE, ONE)


def rewrite_fuzzy_gci(lhs: Concept, rhs: Concept, degree: Fraction) -> GCI:
    """``lhs [= rhs >= p`` (Lukasiewicz implication at least p) as a plain GCI."""
    if not ZERO <= degree <= ONE:
        raise ValueError(f"GCI degree {fmt_rational(degree)} lies outside [0,1]")
    return GCI(lhs, Plus(rhs, ONE - degree))
