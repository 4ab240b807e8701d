"""Brute-force ground truth for small inputs.

``brute_force_sat`` searches finite interpretations whose atom and role values
lie on a grid (``Z'`` by default), trying domain sizes 1, 2, ... in turn.
Variables are assigned in a fixed order (roles, then atoms, each sorted, each
over individuals in order) with values ascending; partial assignments are
pruned with interval bounds on every subconcept, which never removes a model,
so the first model found is the first one in plain enumeration order.
Variables that no checked constraint can read (say ``R(y, z)`` when only the
query individual has role restrictions and there is no TBox) are left at 0
instead of being enumerated.

The classical side works on two-valued models: ``classical_brute_force``
enumerates small models, ``classical_decide`` is a complete type-elimination
procedure, and ``crispify`` turns a classical KB into the fuzzy one whose
satisfiability it should match.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .grid import Grid, compute_grid, grid_from_step
from .semantics import Evaluator, Interpretation, check_tbox
from .syntax import (
    ONE, ZERO, ABox, And, Assertion, Atom, CmpOp, Concept, Const, Exists, Forall, GCI, KB, Minus,
    Not, Or, Plus, atoms_of, gcd_rationals, roles_of, subconcepts,
)


class Outcome(Enum):
    SAT = "SAT"
    NO_MODEL_UP_TO = "NO_MODEL_UP_TO"
    ABORTED = "ABORTED"


@dataclass
class OracleResult:
    outcome: Outcome
    max_domain: int
    model: Optional[Interpretation] = None
    designated: Optional[str] = None
    nodes: int = 0

    @property
    def sat(self) -> bool:
        return self.outcome is Outcome.SAT

    def __str__(self):
        if self.outcome is Outcome.SAT:
            return f"SAT({len(self.model.domain)})"
        return f"{self.outcome.value}({self.max_domain})"


class _Budget(Exception):
    pass


# ---------------------------------------------------------------------------
# interval valuation over partial assignments


def _ival(c: Concept, dom: int, atoms: dict, roles: dict, memo: dict, one: int, k: dict):
    """Per-individual (lo, hi) bounds of ``c`` in integer units; unassigned variables range over [0, one].

    ``k`` maps each constant-carrying subconcept to its constant in units.
    """
    got = memo.get(c)
    if got is not None:
        return got
    if isinstance(c, Atom):
        out = []
        for x in range(dom):
            v = atoms.get((c.name, x))
            out.append((0, one) if v is None else (v, v))
    elif isinstance(c, Const):
        out = [(k[c], k[c])] * dom
    elif isinstance(c, Not):
        out = [(one - hi, one - lo) for lo, hi in _ival(c.arg, dom, atoms, roles, memo, one, k)]
    elif isinstance(c, Minus):
        d = k[c]
        out = [(max(lo - d, 0), max(hi - d, 0)) for lo, hi in _ival(c.arg, dom, atoms, roles, memo, one, k)]
    elif isinstance(c, Plus):
        d = k[c]
        out = [(min(lo + d, one), min(hi + d, one)) for lo, hi in _ival(c.arg, dom, atoms, roles, memo, one, k)]
    elif isinstance(c, And):
        l, r = _ival(c.left, dom, atoms, roles, memo, one, k), _ival(c.right, dom, atoms, roles, memo, one, k)
        out = [(min(a[0], b[0]), min(a[1], b[1])) for a, b in zip(l, r)]
    elif isinstance(c, Or):
        l, r = _ival(c.left, dom, atoms, roles, memo, one, k), _ival(c.right, dom, atoms, roles, memo, one, k)
        out = [(max(a[0], b[0]), max(a[1], b[1])) for a, b in zip(l, r)]
    elif isinstance(c, (Exists, Forall)):
        body = _ival(c.arg, dom, atoms, roles, memo, one, k)
        exists = isinstance(c, Exists)
        out = []
        for x in range(dom):
            los, his = [], []
            for y in range(dom):
                v = roles.get((c.role, x, y))
                rlo, rhi = (0, one) if v is None else (v, v)
                if exists:
                    los.append(min(rlo, body[y][0]))
                    his.append(min(rhi, body[y][1]))
                else:
                    los.append(max(one - rhi, body[y][0]))
                    his.append(max(one - rlo, body[y][1]))
            out.append((max(los), max(his)) if exists else (min(los), min(his)))
    else:
        raise TypeError(f"not a concept: {c!r}")
    memo[c] = out
    return out


def _may_hold(op: CmpOp, lo: Fraction, hi: Fraction, c: Fraction) -> bool:
    """Some value in [lo, hi] satisfies ``op c``."""
    if op is CmpOp.GE:
        return hi >= c
    if op is CmpOp.GT:
        return hi > c
    if op is CmpOp.LE:
        return lo <= c
    return lo < c


# ---------------------------------------------------------------------------
# fuzzy search


def _needed(n: int, roots: Iterable[tuple[Concept, int]]) -> tuple[set, set]:
    """Atom ``(name, x)`` and role ``(name, x, y)`` variables the valuation of ``roots`` reads."""
    atoms, roles = set(), set()
    seen = set()
    pending = list(roots)
    while pending:
        c, x = pending.pop()
        if (c, x) in seen:
            continue
        seen.add((c, x))
        if isinstance(c, Atom):
            atoms.add((c.name, x))
        elif isinstance(c, (Not, Minus, Plus)):
            pending.append((c.arg, x))
        elif isinstance(c, (And, Or)):
            pending += [(c.left, x), (c.right, x)]
        elif isinstance(c, (Exists, Forall)):
            for y in range(n):
                roles.add((c.role, x, y))
                pending.append((c.arg, y))
    return atoms, roles


def _names(n: int, fixed: Sequence[str]) -> list[str]:
    out = list(fixed[:n])
    i = 0
    while len(out) < n:
        cand = f"d{i}"
        if cand not in out and cand not in fixed:
            out.append(cand)
        i += 1
    return out


def brute_force_sat(gamma: Iterable[Assertion], tbox: Iterable[GCI] = (), max_domain: int = 3,
                    abox: Optional[ABox] = None, grid: Optional[Grid] = None, values: Optional[Iterable[Fraction]] = None,
                    budget: int = 200_000) -> OracleResult:
    """First grid model with ``gamma`` at its first individual and every GCI everywhere.

    Named ABox individuals are the first domain elements; ``gamma`` is then
    placed at a further individual when it is nonempty.  ``values`` overrides
    the candidate truth values (``grid.Zprime`` by default).
    """
    if max_domain < 1:
        raise ValueError("max_domain must be at least 1")
    gamma = tuple(gamma)
    tbox = tuple(tbox)
    if values is None:
        grid = grid or compute_grid(tbox, gamma, abox)
        values = grid.Zprime
    values = tuple(sorted(set(values)))
    named = tuple(abox.individuals) if abox else ()

    concepts = [a.concept for a in gamma] + [g.lhs for g in tbox] + [g.rhs for g in tbox]
    if abox:
        concepts += [a.concept for _, a in abox.concept_assertions]
    atom_names = sorted(set().union(*(atoms_of(c) for c in concepts))) if concepts else []

    # search in integer multiples of one common unit
    shifts = [d for c in concepts for d in subconcepts(c) if isinstance(d, (Const, Minus, Plus))]
    unit = gcd_rationals([ONE, *values, *(d.value for d in shifts), *(a.threshold for a in gamma),
                          *(a.threshold for _, a in (abox.concept_assertions if abox else ())),
                          *(r.threshold for r in (abox.role_assertions if abox else ()))])

    def units(v: Fraction) -> int:
        q = v / unit
        assert q.denominator == 1
        return q.numerator

    one = units(ONE)
    k = {d: units(d.value) for d in shifts}
    ivalues = [units(v) for v in values]
    igamma = [(a.concept, a.op, units(a.threshold)) for a in gamma]
    iabox = [(named.index(n), a.concept, a.op, units(a.threshold)) for n, a in abox.concept_assertions] if abox else []
    role_names = sorted(set().union(*(roles_of(c) for c in concepts)) | {r.role for r in (abox.role_assertions if abox else ())})

    nodes = 0
    # gamma needs its own individual only when there is an ABox; without one it sits at index 0
    first = len(named) if (abox and gamma) else 0
    lowest = max(len(named) + (1 if (abox and gamma) else 0), 1)
    for n in range(lowest, max(max_domain, lowest) + 1):
        names = _names(n, named)
        rfix: dict = {}
        if abox:
            for ra in abox.role_assertions:
                rfix.setdefault((ra.role, named.index(ra.source), named.index(ra.target)), []).append(
                    (ra.op, units(ra.threshold)))
        roots = [(a.concept, first) for a in gamma]
        roots += [(c, x) for g in tbox for c in (g.lhs, g.rhs) for x in range(n)]
        if abox:
            roots += [(a.concept, named.index(name)) for name, a in abox.concept_assertions]
        need_atoms, need_roles = _needed(n, roots)
        need_roles |= set(rfix)
        # roles first: once an edge is fixed, bounds on both ends start pruning
        variables = [("r", r, x, y) for r in role_names for x in range(n) for y in range(n)
                     if (r, x, y) in need_roles]
        variables += [("a", a, x) for x in range(n) for a in atom_names if (a, x) in need_atoms]
        atoms: dict = {}
        roles: dict = {}

        def consistent() -> bool:
            memo: dict = {}
            for c, op, t in igamma:
                lo, hi = _ival(c, n, atoms, roles, memo, one, k)[first]
                if not _may_hold(op, lo, hi, t):
                    return False
            for x, c, op, t in iabox:
                lo, hi = _ival(c, n, atoms, roles, memo, one, k)[x]
                if not _may_hold(op, lo, hi, t):
                    return False
            for g in tbox:
                l = _ival(g.lhs, n, atoms, roles, memo, one, k)
                r = _ival(g.rhs, n, atoms, roles, memo, one, k)
                if any(a[0] > b[1] for a, b in zip(l, r)):
                    return False
            return True

        def search(i: int) -> bool:
            nonlocal nodes
            nodes += 1
            if nodes > budget:
                raise _Budget
            if not consistent():
                return False
            if i == len(variables):
                return True
            var = variables[i]
            for v in ivalues:
                if var[0] == "a":
                    atoms[(var[1], var[2])] = v
                else:
                    key = (var[1], var[2], var[3])
                    if any(not op.holds(v, t) for op, t in rfix.get(key, ())):
                        continue
                    roles[key] = v
                if search(i + 1):
                    return True
            if var[0] == "a":
                del atoms[(var[1], var[2])]
            else:
                roles.pop((var[1], var[2], var[3]), None)
            return False

        try:
            found = search(0)
        except _Budget:
            return OracleResult(Outcome.ABORTED, max_domain, nodes=nodes)
        if found:
            interp = Interpretation(
                tuple(names),
                {(a, names[x]): v * unit for (a, x), v in atoms.items() if v},
                {(r, names[x], names[y]): v * unit for (r, x, y), v in roles.items() if v},
            )
            designated = names[first]
            _verify(interp, designated, gamma, tbox, abox)
            return OracleResult(Outcome.SAT, max_domain, interp, designated, nodes)
    return OracleResult(Outcome.NO_MODEL_UP_TO, max_domain, nodes=nodes)


def _verify(I: Interpretation, x: str, gamma, tbox, abox) -> None:
    ev = Evaluator(I)
    ok = all(ev.holds(x, a) for a in gamma) and check_tbox(I, tbox, ev)
    if abox:
        ok = ok and all(ev.holds(n, a) for n, a in abox.concept_assertions)
        ok = ok and all(r.op.holds(I.role(r.role, r.source, r.target), r.threshold) for r in abox.role_assertions)
    if not ok:
        raise AssertionError("oracle produced a model that fails exact evaluation")


def finer_values(grid: Grid, factor: int = 2) -> tuple[Fraction, ...]:
    """Candidate values on a grid ``factor`` times finer than ``Z'``."""
    return grid_from_step(grid.epsilon / factor).Z


# ---------------------------------------------------------------------------
# classical side


def crispify(kb: KB) -> tuple[tuple[Assertion, ...], tuple[GCI, ...]]:
    """Classical query concepts become ``C >= 1``; the TBox is kept."""
    query = tuple(Assertion(c, CmpOp.GE, ONE) for c in kb.concepts)
    query += tuple(a for a in kb.query)
    return query, tuple(kb.tbox)


def _classical(c: Concept, dom: range, ext: dict, rel: dict, memo: dict) -> frozenset:
    got = memo.get(c)
    if got is not None:
        return got
    if isinstance(c, Atom):
        out = frozenset(ext.get(c.name, ()))
    elif isinstance(c, Const):
        if c.value not in (ZERO, ONE):
            raise ValueError("classical concepts only use the constants 0 and 1")
        out = frozenset(dom) if c.value == ONE else frozenset()
    elif isinstance(c, Not):
        out = frozenset(dom) - _classical(c.arg, dom, ext, rel, memo)
    elif isinstance(c, And):
        out = _classical(c.left, dom, ext, rel, memo) & _classical(c.right, dom, ext, rel, memo)
    elif isinstance(c, Or):
        out = _classical(c.left, dom, ext, rel, memo) | _classical(c.right, dom, ext, rel, memo)
    elif isinstance(c, Exists):
        body = _classical(c.arg, dom, ext, rel, memo)
        out = frozenset(x for x in dom if any((x, y) in rel.get(c.role, ()) and y in body for y in dom))
    elif isinstance(c, Forall):
        body = _classical(c.arg, dom, ext, rel, memo)
        out = frozenset(x for x in dom if all((x, y) not in rel.get(c.role, ()) or y in body for y in dom))
    else:
        raise TypeError(f"{type(c).__name__} has no classical reading")
    memo[c] = out
    return out


def classical_holds(c: Concept, x: int, dom: range, ext: dict, rel: dict) -> bool:
    return x in _classical(c, dom, ext, rel, {})


def _classical_parts(kb: KB):
    query = list(kb.concepts) + [a.concept for a in kb.query]
    everything = query + [g.lhs for g in kb.tbox] + [g.rhs for g in kb.tbox]
    atoms = sorted(set().union(*(atoms_of(c) for c in everything))) if everything else []
    roles = sorted(set().union(*(roles_of(c) for c in everything))) if everything else []
    return query, atoms, roles


def classical_brute_force(kb: KB, max_domain: int = 3) -> OracleResult:
    """All query concepts at one individual and every GCI as set inclusion, domains up to ``max_domain``."""
    query, atoms, roles = _classical_parts(kb)
    nodes = 0
    for n in range(1, max_domain + 1):
        dom = range(n)
        pairs = [(x, y) for x in dom for y in dom]
        for bits_a in itertools.product((False, True), repeat=len(atoms) * n):
            ext = {a: {x for x in dom if bits_a[i * n + x]} for i, a in enumerate(atoms)}
            for bits_r in itertools.product((False, True), repeat=len(roles) * len(pairs)):
                nodes += 1
                rel = {r: {p for j, p in enumerate(pairs) if bits_r[i * len(pairs) + j]} for i, r in enumerate(roles)}
                memo: dict = {}
                if not all(0 in _classical(c, dom, ext, rel, memo) for c in query):
                    continue
                if all(_classical(g.lhs, dom, ext, rel, memo) <= _classical(g.rhs, dom, ext, rel, memo)
                       for g in kb.tbox):
                    names = [f"d{i}" for i in dom]
                    interp = Interpretation(
                        tuple(names),
                        {(a, names[x]): ONE for a in atoms for x in ext[a]},
                        {(r, names[x], names[y]): ONE for r in roles for (x, y) in rel[r]},
                    )
                    return OracleResult(Outcome.SAT, max_domain, interp, names[0], nodes)
    return OracleResult(Outcome.NO_MODEL_UP_TO, max_domain, nodes=nodes)


def _nnf_atoms(c: Concept) -> list[Concept]:
    """Subconcepts whose truth a type fixes freely: atoms and restrictions (``all`` read as ``!some !``)."""
    out = []
    for d in subconcepts(c):
        if isinstance(d, (Atom, Exists)) and d not in out:
            out.append(d)
        elif isinstance(d, Forall):
            e = Exists(d.role, Not(d.arg))
            if e not in out:
                out.append(e)
                for f in subconcepts(e):
                    if isinstance(f, (Atom, Exists)) and f not in out:
                        out.append(f)
    return out


def _type_value(c: Concept, t: dict) -> bool:
    if isinstance(c, (Atom, Exists)):
        return t[c]
    if isinstance(c, Const):
        return c.value == ONE
    if isinstance(c, Not):
        return not _type_value(c.arg, t)
    if isinstance(c, And):
        return _type_value(c.left, t) and _type_value(c.right, t)
    if isinstance(c, Or):
        return _type_value(c.left, t) or _type_value(c.right, t)
    if isinstance(c, Forall):
        return not t[Exists(c.role, Not(c.arg))]
    raise TypeError(f"{type(c).__name__} has no classical reading")


def classical_decide(kb: KB) -> bool:
    """Complete satisfiability test by type elimination (query at one individual, GCIs everywhere)."""
    query, _, _ = _classical_parts(kb)
    base: list[Concept] = []
    for c in query + [g.lhs for g in kb.tbox] + [g.rhs for g in kb.tbox]:
        for d in _nnf_atoms(c):
            if d not in base:
                base.append(d)
    types = []
    for bits in itertools.product((False, True), repeat=len(base)):
        t = dict(zip(base, bits))
        if all(not _type_value(g.lhs, t) or _type_value(g.rhs, t) for g in kb.tbox):
            types.append(t)
    alive = list(range(len(types)))
    changed = True
    while changed:
        changed = False
        keep = []
        for i in alive:
            t = types[i]
            ok = True
            for e in base:
                if not isinstance(e, Exists) or not t[e]:
                    continue
                # every false R-restriction forbids its body at the successor
                bad = [f.arg for f in base if isinstance(f, Exists) and f.role == e.role and not t[f]]
                if not any(_type_value(e.arg, types[j]) and all(not _type_value(b, types[j]) for b in bad)
                           for j in alive):
                    ok = False
                    break
            if ok:
                keep.append(i)
            else:
                changed = True
        alive = keep
    return any(all(_type_value(c, types[i]) for c in query) for i in alive)
