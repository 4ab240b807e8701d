"""Deciding satisfiability on tableau graphs."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .grid import Grid
from .syntax import ABox, Assertion, GCI, desugar_assertion, negate_assertion
from .tableau import Kind, RulePolicy, TableauGraph, new_graph


class BudgetExceeded(RuntimeError):
    """The tableau grew past the caller's node cap."""


class Verdict(Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"

    def __bool__(self):
        return self is Verdict.SAT


def compute_unsat(g: TableauGraph) -> set[int]:
    """Least set containing the closed node and closed under the AND/OR rules."""
    unsat: set[int] = set()
    bot = g.bottom
    if bot is None:
        return unsat
    unsat.add(bot)
    queue = deque([bot])
    g.stats.queue_ops += 1
    while queue:
        w = queue.popleft()
        for p in g.parents[w]:
            if p in unsat:
                continue
            kind = g.kinds[p]
            if kind is Kind.AND or (kind is Kind.OR and all(q in unsat for q in g.children[p])):
                unsat.add(p)
                queue.append(p)
                g.stats.queue_ops += 1
    return unsat


def compute_unsat_naive(g: TableauGraph) -> set[int]:
    """Same fixpoint by whole-graph sweeps; slow, for cross-checking."""
    unsat = {n for n, k in enumerate(g.kinds) if k is Kind.BOTTOM}
    changed = True
    while changed:
        changed = False
        for n, k in enumerate(g.kinds):
            if n in unsat:
                continue
            kids = g.children[n]
            if (k is Kind.AND and any(c in unsat for c in kids)) or \
                    (k is Kind.OR and kids and all(c in unsat for c in kids)):
                unsat.add(n)
                changed = True
    return unsat


@dataclass
class Marking:
    """Sub-graph: roots, every child of an AND-node, one chosen child of an OR-node."""

    nodes: set[int]
    choice: dict[int, int]

    def is_consistent(self, g: TableauGraph) -> bool:
        return all(g.kinds[n] is not Kind.BOTTOM for n in self.nodes)

    def is_closed(self, g: TableauGraph) -> bool:
        if not all(r in self.nodes for r in g.roots):
            return False
        for n in self.nodes:
            k = g.kinds[n]
            if k is Kind.AND:
                if not all(c in self.nodes for c in g.children[n]):
                    return False
            elif k is Kind.OR:
                c = self.choice.get(n)
                if c is None or c not in g.children[n] or c not in self.nodes:
                    return False
            elif k is Kind.UNEXPANDED:
                return False
        return True


def build_marking(g: TableauGraph, bad: set[int], prefer: Optional[set[int]] = None) -> Marking:
    """Closure from the roots avoiding ``bad``; OR-nodes take their first admissible child.

    With ``prefer`` (nodes known satisfiable), OR-nodes pick from it first.
    Children that were never expanded are not admissible.
    """
    nodes: set[int] = set()
    choice: dict[int, int] = {}
    pending = deque(g.roots)
    for r in g.roots:
        if r in bad:
            raise ValueError("a root is unsatisfiable; no consistent marking")
        nodes.add(r)
    while pending:
        n = pending.popleft()
        kind = g.kinds[n]
        if kind is Kind.AND:
            nxt = list(g.children[n])
        elif kind is Kind.OR:
            ok = [c for c in g.children[n] if c not in bad and g.kinds[c] is not Kind.UNEXPANDED]
            if prefer is not None:
                ok = [c for c in ok if c in prefer] or ok
            if not ok:
                raise ValueError(f"OR-node {n} has no admissible child")
            choice[n] = ok[0]
            nxt = [ok[0]]
        else:
            raise ValueError(f"node {n} ({kind.value}) cannot be in a consistent marking")
        for c in nxt:
            if c in bad:
                raise ValueError(f"marking reaches unsatisfiable node {c}")
            if c not in nodes:
                nodes.add(c)
                pending.append(c)
    return Marking(nodes, choice)


@dataclass
class Result:
    verdict: Verdict
    graph: TableauGraph
    grid: Grid
    tassert: Assertion
    unsat: set[int] = field(default_factory=set)
    marking: Optional[Marking] = None
    gamma: tuple = ()
    abox: Optional[ABox] = None
    tbox: tuple = ()

    @property
    def sat(self) -> bool:
        return self.verdict is Verdict.SAT

    def stats(self) -> dict:
        out = self.graph.stats.as_dict()
        out["unsat_nodes"] = len(self.unsat)
        return out


def prepare(gamma: Iterable[Assertion], tbox: Iterable[GCI], abox: Optional[ABox] = None,
            policy: RulePolicy = RulePolicy.COMPRESSED):
    gamma = tuple(desugar_assertion(a) for a in gamma)
    tbox = tuple(tbox)
    g, grid = new_graph(gamma, tbox, abox, policy)
    return g, grid, g.tassert, gamma, tbox


def is_satisfiable(gamma: Iterable[Assertion], tbox: Iterable[GCI] = (), abox: Optional[ABox] = None,
                   policy: RulePolicy = RulePolicy.COMPRESSED) -> Result:
    """Build the whole tableau, then propagate unsatisfiability."""
    g, grid, tassert, gamma, tbox = prepare(gamma, tbox, abox, policy)
    g.build()
    unsat = compute_unsat(g)
    sat = not any(r in unsat for r in g.roots)
    marking = build_marking(g, unsat) if sat else None
    return Result(Verdict.SAT if sat else Verdict.UNSAT, g, grid, tassert, unsat, marking, gamma, abox, tbox)


def solve_on_the_fly(gamma: Iterable[Assertion], tbox: Iterable[GCI] = (), abox: Optional[ABox] = None,
                     policy: RulePolicy = RulePolicy.COMPRESSED, max_nodes: Optional[int] = None) -> Result:
    """Expand breadth-first and decide nodes as soon as their children allow it.

    A node is only expanded while some parent is still undecided.  Once
    nothing relevant is left, the undecided nodes form a region with no
    derivation of closure, so they are satisfiable.
    """
    g, grid, tassert, gamma, tbox = prepare(gamma, tbox, abox, policy)
    SAT, UNSAT = True, False
    status: dict[int, bool] = {}

    def decide(n: int, value: bool):
        stack = [(n, value)]
        while stack:
            m, v = stack.pop()
            if m in status:
                continue
            status[m] = v
            g.stats.queue_ops += 1
            for p in g.parents[m]:
                if p in status:
                    continue
                kind, kids = g.kinds[p], g.children[p]
                if kind is Kind.OR:
                    if v is SAT:
                        stack.append((p, SAT))
                    elif all(status.get(c) is UNSAT for c in kids):
                        stack.append((p, UNSAT))
                elif kind is Kind.AND:
                    if v is UNSAT:
                        stack.append((p, UNSAT))
                    elif all(status.get(c) is SAT for c in kids):
                        stack.append((p, SAT))

    def settle(n: int):
        kids = g.children[n]
        known = [status.get(c) for c in kids]
        if g.kinds[n] is Kind.AND:
            if any(s is UNSAT for s in known):
                decide(n, UNSAT)
            elif all(s is SAT for s in known):
                decide(n, SAT)
        elif any(s is SAT for s in known):
            decide(n, SAT)
        elif all(s is UNSAT for s in known):
            decide(n, UNSAT)

    roots = g.roots
    queue = deque()
    for r in roots:
        if g.kinds[r] is Kind.BOTTOM:
            decide(r, UNSAT)
        else:
            queue.append(r)
    while queue and not all(r in status for r in roots):
        n = queue.popleft()
        if n in status or g.kinds[n] is not Kind.UNEXPANDED:
            continue
        if n not in roots and all(p in status for p in g.parents[n]):
            continue
        if max_nodes is not None and len(g) >= max_nodes:
            raise BudgetExceeded(f"tableau exceeded {max_nodes} nodes")
        g.expand(n)
        for c in g.children[n]:
            if g.kinds[c] is Kind.BOTTOM:
                decide(c, UNSAT)
        settle(n)
        if n not in status:
            queue.extend(c for c in g.children[n] if c not in status and g.kinds[c] is Kind.UNEXPANDED)
    unsat = {n for n, v in status.items() if v is UNSAT}
    sat = not any(r in unsat for r in roots)
    marking = None
    if sat:
        marking = build_marking(g, unsat, prefer={n for n, v in status.items() if v is SAT})
    return Result(Verdict.SAT if sat else Verdict.UNSAT, g, grid, tassert, unsat, marking, gamma, abox, tbox)


def is_valid(a: Assertion, tbox: Iterable[GCI] = (), on_the_fly: bool = False,
             policy: RulePolicy = RulePolicy.COMPRESSED) -> tuple[bool, Result]:
    """``a`` holds everywhere in every model of ``tbox`` iff its negation is unsatisfiable."""
    solve = solve_on_the_fly if on_the_fly else is_satisfiable
    res = solve([negate_assertion(a)], tbox, policy=policy)
    return not res.sat, res
