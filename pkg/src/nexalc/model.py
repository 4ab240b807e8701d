"""Reading a finite interpretation off a consistent marking.

Individuals are the AND-nodes of the marking (plus one per named individual
of the joint ABox node).  Every node of the marking follows its chosen
OR-children to exactly one AND-node, its endpoint; ``Y(x)`` collects the
labels of all nodes whose endpoint is ``x``.  Atomic values and role values
are then picked from the bounds these sets impose, and the result is checked
against the semantics before it is handed out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .kernel import OPS as _OPS
from .semantics import Evaluator, Interpretation, check_tbox
from .syntax import ONE, ZERO, ABox, Assertion, Atom, CmpOp, Const, Exists, desugar_assertion
from .tableau import ABoxLabel, Kind, TableauGraph


class ModelError(RuntimeError):
    """Extraction produced something that fails verification (an engine bug)."""


# ---------------------------------------------------------------------------
# value choice


def choose_value(constraints: Iterable[tuple[CmpOp, Fraction]]) -> Fraction:
    """Value in [0,1] meeting every ``op d``: lower end if attainable, else upper end, else midpoint."""
    lo, lo_strict = ZERO, False
    hi, hi_strict = ONE, False
    for op, d in constraints:
        if op.is_greater:
            if d > lo or (d == lo and op.is_strict):
                lo, lo_strict = d, op.is_strict
        else:
            if d < hi or (d == hi and op.is_strict):
                hi, hi_strict = d, op.is_strict
    if lo > hi or (lo == hi and (lo_strict or hi_strict)):
        raise ModelError(f"no value in the interval {lo}..{hi}")
    if not lo_strict:
        return lo
    if not hi_strict:
        return hi
    return (lo + hi) / 2


def choose_atomic_value(constraints: Iterable[tuple[CmpOp, Fraction]]) -> Fraction:
    return choose_value(constraints)


def choose_role_value(lower: Iterable[tuple[CmpOp, Fraction]], upper: Iterable[tuple[CmpOp, Fraction]]) -> Fraction:
    """``lower`` from existentials (and role assertions), ``upper`` from the active universals."""
    return choose_value([*lower, *upper])


def entails(have: Iterable[Assertion], a: Assertion) -> bool:
    """Some member of ``have`` on the same concept and side is at least as strong as ``a``."""
    if _trivially_true(a):
        return True
    for b in have:
        if b.concept == a.concept and b.op.is_greater == a.op.is_greater and _at_least_as_strong(b, a):
            return True
    return False


def _trivially_true(a: Assertion) -> bool:
    if isinstance(a.concept, Const):
        return a.op.holds(a.concept.value, a.threshold)
    if a.op.is_greater:
        return a.threshold < 0 or (a.threshold == 0 and not a.op.is_strict)
    return a.threshold > 1 or (a.threshold == 1 and not a.op.is_strict)


def _at_least_as_strong(b: Assertion, a: Assertion) -> bool:
    if b.op.is_greater:
        return b.threshold > a.threshold or (b.threshold == a.threshold and (b.op.is_strict or not a.op.is_strict))
    return b.threshold < a.threshold or (b.threshold == a.threshold and (b.op.is_strict or not a.op.is_strict))


# ---------------------------------------------------------------------------
# extraction


@dataclass
class Extraction:
    interpretation: Interpretation
    designated: Optional[str]
    names: dict = field(default_factory=dict)  # (node, part) -> individual
    Y: dict = field(default_factory=dict)  # individual -> set of assertions

    @property
    def size(self) -> int:
        return len(self.interpretation.domain)


def saturation_endpoints(g: TableauGraph, marking) -> dict[int, int]:
    """Endpoint (AND-node) of every node of the marking along chosen OR-children."""
    end: dict[int, int] = {}
    for start in sorted(marking.nodes):
        path = []
        n = start
        while n not in end and g.kinds[n] is Kind.OR:
            if n in path:
                raise ModelError(f"OR-cycle through node {n}")
            path.append(n)
            n = marking.choice[n]
        if n not in end:
            if g.kinds[n] is not Kind.AND:
                raise ModelError(f"saturation path from {start} ends at a {g.kinds[n].value} node")
            end[n] = n
        for m in path:
            end[m] = end[n]
    return end


def _units(a: Assertion) -> tuple[CmpOp, Fraction]:
    return a.op, a.threshold


def extract_model(result) -> Extraction:
    """Interpretation read off ``result.marking``; verified before it is returned."""
    g: TableauGraph = result.graph
    marking = result.marking
    if marking is None:
        raise ValueError("no marking: the input is unsatisfiable")
    end = saturation_endpoints(g, marking)
    ands = sorted(n for n in marking.nodes if g.kinds[n] is Kind.AND)

    # individuals ---------------------------------------------------------------
    names: dict[tuple[int, Optional[int]], str] = {}
    taken: set[str] = set()
    for n in ands:
        lab = g.raw[n]
        if isinstance(lab, ABoxLabel):
            for i, name in enumerate(lab.names):
                names[(n, i)] = name
                taken.add(name)
    for n in ands:
        if not isinstance(g.raw[n], ABoxLabel):
            name = f"v{n}"
            while name in taken:
                name = "_" + name
            names[(n, None)] = name
            taken.add(name)

    # Y sets ----------------------------------------------------------------------
    Y: dict[str, set[Assertion]] = {name: set() for name in names.values()}
    for v in sorted(marking.nodes):
        x = end[v]
        lab = g.label(v)
        if isinstance(lab, dict):
            raw = g.raw[v]
            for i, name in enumerate(raw.names):
                Y[names[(x, i)]].update(lab[name])
                Y[names[(x, i)]].update(g.U.decode(c) for c in raw.sent[i])
        else:
            Y[names[(x, None)]].update(lab)
    edges = {}
    for x in ands:
        edges[x] = g.exists_edges(x)
        for e in edges[x]:
            Y[names[(end[e.child], None)]].update(e.raw)
    for x in ands:
        # assertions on atoms, constants and restrictions survive to the endpoint
        lab = g.label(x)
        parts = [(i, lab[n]) for i, n in enumerate(g.raw[x].names)] if isinstance(lab, dict) else [(None, lab)]
        for i, final in parts:
            for a in Y[names[(x, i)]]:
                if isinstance(a.concept, (Atom, Exists)) and not entails(final, a):
                    raise ModelError(f"{a} is lost on the way to node {x}")

    # atomic values ------------------------------------------------------------
    concepts: dict[tuple[str, str], Fraction] = {}
    for ind in sorted(Y):
        by_atom: dict[str, list] = {}
        for a in Y[ind]:
            if isinstance(a.concept, Atom):
                by_atom.setdefault(a.concept.name, []).append(_units(a))
        for atom in sorted(by_atom):
            v = choose_atomic_value(by_atom[atom])
            if v != ZERO:
                concepts[(atom, ind)] = v

    # role values ----------------------------------------------------------------
    roles: dict[tuple[str, str, str], Fraction] = {}

    def universals(ind, role):
        return [a for a in Y[ind] if isinstance(a.concept, Exists) and a.concept.role == role and a.op.is_less]

    def set_role(role, src, dst, lower):
        upper = [(u.op, u.threshold) for u in universals(src, role)
                 if not entails(Y[dst], Assertion(u.concept.arg, u.op, u.threshold))]
        v = choose_role_value(lower, upper)
        if v != ZERO:
            roles[(role, src, dst)] = v

    for x in ands:
        lower: dict[tuple[str, str, str], list] = {}
        for e in edges[x]:
            src = names[(x, e.part)]
            dst = names[(end[e.child], None)]
            lower.setdefault((e.existential.concept.role, src, dst), []).append(_units(e.existential))
        lab = g.raw[x]
        if isinstance(lab, ABoxLabel):
            for role, si, di, op, k in lab.roles:
                key = (role, names[(x, si)], names[(x, di)])
                lower.setdefault(key, []).append((_OPS[op], k * g.U.unit))
        for (role, src, dst) in sorted(lower):
            set_role(role, src, dst, lower[(role, src, dst)])

    domain = tuple(sorted(Y, key=_ind_key))
    interp = Interpretation(domain, concepts, roles)

    designated = None
    seq_roots = [r for r in g.roots if not isinstance(g.raw[r], ABoxLabel)]
    if seq_roots:
        designated = names[(end[seq_roots[0]], None)]
    elif domain:
        designated = names.get((end[g.roots[0]], 0))
    out = Extraction(interp, designated, names, Y)
    verify_extraction(out, result)
    return out


def _ind_key(name: str):
    if name.startswith("v") and name[1:].isdigit():
        return (1, int(name[1:]), name)
    return (0, 0, name)


# ---------------------------------------------------------------------------
# verification


def verify_extraction(ex: Extraction, result) -> None:
    I = ex.interpretation
    ev = Evaluator(I)
    for ind in I.domain:
        for a in ex.Y[ind]:
            if not ev.holds(ind, desugar_assertion(a)):
                raise ModelError(f"{a} fails at {ind} (value {ev(ind, a.concept)})")
    if result.gamma:
        for a in result.gamma:
            if not ev.holds(ex.designated, a):
                raise ModelError(f"query assertion {a} fails at {ex.designated}")
    verify_abox(I, result.abox, ev)
    if not check_tbox(I, result.tbox, ev):
        raise ModelError("a GCI fails in the extracted interpretation")


def verify_abox(I: Interpretation, abox: Optional[ABox], ev: Optional[Evaluator] = None) -> None:
    if not abox:
        return
    ev = ev or Evaluator(I)
    for name, a in abox.concept_assertions:
        if not ev.holds(name, a):
            raise ModelError(f"ABox assertion {name}: {a} fails")
    for ra in abox.role_assertions:
        if not ra.op.holds(I.role(ra.role, ra.source, ra.target), ra.threshold):
            raise ModelError(f"ABox role assertion {ra} fails")
