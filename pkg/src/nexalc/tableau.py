"""Tableau rules and global-caching construction of tableau graphs.

The first half of this module states the rules on
:class:`~nexalc.syntax.Sequent` objects; it is the readable reference and is
what the per-rule tests exercise.  :class:`TableauGraph` runs the same rules
on the integer-coded labels of :mod:`nexalc.kernel`.

A label is a sequent or :data:`BOTTOM`.  Ground assertions ``c op d`` are
decided when a label is built: a false one turns the label into ``BOTTOM``,
a true one is dropped.  A saturated label is an AND-node whose children are
the conclusions of every ``(exists R)`` instance; any other label is an
OR-node whose children are the conclusions of one rule instance.  Each label
gets exactly one node.

ABoxes use a joint label (:class:`ABoxLabel`) with one part per named
individual.  Its rules saturate the parts one at a time and push
universal-restriction bodies along asserted role edges, so a branch taken
for one individual is seen by the others.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Union

from .grid import Grid, associated_assertion, compute_grid
from .kernel import BIAS, BOTTOM, CSHIFT, EXISTS, GT, KMASK, KSHIFT, OPCODE, Universe, gap_closed
from .syntax import (
    ONE, ZERO, ABox, And, Assertion, Atom, CmpOp, Const, Exists, GCI, Minus, Not, Sequent,
    blacktriangle, desugar_assertion,
)


_Bottom = type(BOTTOM)


# ---------------------------------------------------------------------------
# labels


def _trivial(a: Assertion) -> bool:
    """True for every value in [0,1]: ``C >= c`` with ``c <= 0``, ``C <= c`` with ``c >= 1``, etc."""
    if a.op.is_greater:
        return not a.op.toggle().holds(a.threshold, ZERO)
    return not a.op.toggle().holds(a.threshold, ONE)


def _stronger(a: Assertion, b: Assertion) -> bool:
    """``a`` implies ``b`` (same concept, same direction)."""
    if a.threshold != b.threshold:
        return (a.threshold > b.threshold) == a.op.is_greater
    return a.op.is_strict or not b.op.is_strict


def make_label(assertions: Iterable[Assertion], simplify: bool = False) -> Union[Sequent, _Bottom]:
    """Canonical label: ground assertions are decided on the spot.

    With ``simplify`` assertions true for every value in [0,1] are dropped
    and, per concept and direction, only the strongest bound is kept.  Both
    steps preserve the set of satisfying values.
    """
    keep = {}
    for a in assertions:
        c = a.concept
        if isinstance(c, Const):
            if not a.op.holds(c.value, a.threshold):
                return BOTTOM
            continue
        if not simplify:
            keep[a] = a
            continue
        if _trivial(a):
            continue
        key = (c, a.op.is_greater)
        cur = keep.get(key)
        if cur is None or (cur != a and _stronger(a, cur)):
            keep[key] = a
    return Sequent(keep.values())


def _below_zero(op: CmpOp, c: Fraction) -> bool:
    # "x op c" has no solution x >= 0
    return op.toggle().holds(c, ZERO)


def _above_one(op: CmpOp, c: Fraction) -> bool:
    # "x op c" has no solution x <= 1
    return op.toggle().holds(c, ONE)


def bounds_clash(lt: CmpOp, c: Fraction, gt: CmpOp, d: Fraction) -> bool:
    """``x lt c`` and ``x gt d`` have no common rational solution."""
    return blacktriangle(lt, gt).holds(c, d)


def find_clash(s: Sequent) -> Optional[str]:
    """Name of the first axiom that closes ``s``, or None."""
    lower: dict[str, tuple[Fraction, CmpOp]] = {}
    upper: dict[str, tuple[Fraction, CmpOp]] = {}
    for a in s.as_set():
        c, op, t = a.concept, a.op, a.threshold
        if isinstance(c, Atom):
            if op.is_greater:
                if _above_one(op, t):
                    return "Ax1"
                cur = lower.get(c.name)
                if cur is None or t > cur[0] or (t == cur[0] and op.is_strict):
                    lower[c.name] = (t, op)
            else:
                if _below_zero(op, t):
                    return "Ax0"
                cur = upper.get(c.name)
                if cur is None or t < cur[0] or (t == cur[0] and op.is_strict):
                    upper[c.name] = (t, op)
        elif isinstance(c, Const):
            if not op.holds(c.value, t):
                return "Axc"
        elif isinstance(c, Exists) and op.is_less and _below_zero(op, t):
            # every value of a restriction is >= 0, like an atom
            return "AxE"
    for name, (c, lt) in upper.items():
        got = lower.get(name)
        if got is not None and bounds_clash(lt, c, got[1], got[0]):
            return "Axp"
    return None


def is_clashing(s) -> bool:
    if s is BOTTOM:
        return True
    return find_clash(s) is not None


# ---------------------------------------------------------------------------
# propositional rules


@dataclass(frozen=True)
class RuleApp:
    rule: str
    principal: Optional[Assertion]
    conclusions: tuple  # of labels


def _rule_for(a: Assertion) -> Optional[str]:
    c = a.concept
    if isinstance(c, And):
        return "and>" if a.op.is_greater else "and<"
    if isinstance(c, Not):
        return "not"
    if isinstance(c, Minus):
        if a.op.is_less:
            return "minus<"
        if a.op.toggle().holds(a.threshold, ZERO):
            return "minus>"
    return None


BRANCHING = frozenset({"and<"})


def _conclusions(s: Sequent, a: Assertion, rule: str) -> tuple:
    c, op, t = a.concept, a.op, a.threshold
    rest = s.as_set() - {a}
    if rule == "and>":
        return (make_label(rest | {Assertion(c.left, op, t), Assertion(c.right, op, t)}),)
    if rule == "and<":
        return (make_label(rest | {Assertion(c.left, op, t)}),
                make_label(rest | {Assertion(c.right, op, t)}))
    if rule == "not":
        return (make_label(rest | {Assertion(c.arg, op.flip(), ONE - t)}),)
    if rule == "minus<":
        # side constraint t flip(op) 0, ground
        if not op.flip().holds(t, ZERO):
            return (BOTTOM,)
        return (make_label(rest | {Assertion(c.arg, op, t + c.value)}),)
    if rule == "minus>":
        return (make_label(rest | {Assertion(c.arg, op, t + c.value)}),)
    raise ValueError(rule)


class RulePolicy(Enum):
    """How OR-nodes are expanded.

    ``CANONICAL``: one rule per node, principal = canonically smallest
    assertion with an applicable rule, labels kept verbatim.
    ``LINEAR_FIRST``: one rule per node, non-branching rules first, labels
    normalized (see :func:`make_label`).
    ``COMPRESSED``: every stored label is closed under the non-branching
    rules, so each OR-node is a branching step; labels normalized.
    """

    CANONICAL = "canonical"
    LINEAR_FIRST = "linear-first"
    COMPRESSED = "compressed"


def select_rule(s: Sequent, policy: RulePolicy = RulePolicy.CANONICAL) -> Optional[RuleApp]:
    """The rule instance applied to ``s``; None when ``s`` is saturated."""
    ax = find_clash(s)
    if ax is not None:
        return RuleApp(ax, None, (BOTTOM,))
    best = best_key = best_rule = None
    for a in s.as_set():
        rule = _rule_for(a)
        if rule is None:
            continue
        key = a.sort_key
        if policy is not RulePolicy.CANONICAL:
            key = (rule in BRANCHING, key)
        if best is None or key < best_key:
            best, best_key, best_rule = a, key, rule
    if best is None:
        return None
    concl = _conclusions(s, best, best_rule)
    for lab in concl:
        if lab is not BOTTOM:
            for b in lab.as_set() - s.as_set():
                assert b.concept.size < best.concept.size, "rule did not shrink its principal assertion"
    return RuleApp(best_rule, best, concl)


def apply_propositional(s: Sequent, policy: RulePolicy = RulePolicy.CANONICAL) -> Optional[list]:
    """Conclusions of the selected rule, ``[BOTTOM]`` for an axiom, None if saturated."""
    if s is BOTTOM:
        raise ValueError("no rules apply to the closed label")
    app = select_rule(s, policy)
    return None if app is None else list(app.conclusions)


def is_saturated(s: Sequent) -> bool:
    return select_rule(s) is None


def existential_instances(s: Sequent):
    """``(assertion, filtered universals)`` for each ``exists R . C gt c`` with ``c toggle(gt) 0``."""
    out = []
    for a in s:
        c = a.concept
        if not (isinstance(c, Exists) and a.op.is_greater and a.op.toggle().holds(a.threshold, ZERO)):
            continue
        kept = [u for u in s
                if isinstance(u.concept, Exists) and u.op.is_less and u.concept.role == c.role
                and blacktriangle(u.op, a.op).holds(u.threshold, a.threshold)]
        out.append((a, kept))
    return out


def exists_child(a: Assertion, kept: Iterable[Assertion], tassert: Assertion):
    return make_label([Assertion(a.concept.arg, a.op, a.threshold), tassert,
                       *(Assertion(u.concept.arg, u.op, u.threshold) for u in kept)])


def exists_children(s: Sequent, tassert: Assertion) -> list:
    if select_rule(s) is not None:
        raise ValueError("the (exists R) rule needs a saturated sequent")
    return [exists_child(a, kept, tassert) for a, kept in existential_instances(s)]


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class ABoxLabel:
    """Joint label of all named individuals (kernel-coded parts).

    ``sent[i]`` holds the universal bodies already pushed into part ``i``
    along role assertions, so each is pushed at most once.  ``roles`` holds
    ``(role, source index, target index, opcode, threshold units)``.
    """

    names: tuple[str, ...]
    parts: tuple[frozenset, ...]
    sent: tuple[frozenset, ...]
    roles: tuple[tuple, ...]
    _hash: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.names, self.parts, self.sent, self.roles)))

    def __hash__(self):
        return self._hash

    def with_parts(self, parts, sent=None) -> "ABoxLabel":
        return ABoxLabel(self.names, tuple(parts), self.sent if sent is None else tuple(sent), self.roles)


class Kind(Enum):
    AND = "AND"
    OR = "OR"
    BOTTOM = "BOTTOM"
    UNEXPANDED = "UNEXPANDED"


@dataclass
class Stats:
    nodes: int = 0
    expansions: int = 0
    cache_hits: int = 0
    edges: int = 0
    queue_ops: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class ExistsEdge:
    """One ``(exists R)`` instance at an AND-node and the node of its conclusion."""

    part: Optional[int]  # ABox part index, None for plain labels
    existential: Assertion
    kept: tuple[Assertion, ...]
    child: int
    # conclusion before normalization and closure; the child's label entails it
    raw: tuple[Assertion, ...] = ()


class TableauGraph:
    """And-or graph with a global label cache (one node per label).

    Labels are stored in kernel form; :meth:`label` decodes them.
    """

    def __init__(self, universe: Universe, tassert: Assertion, policy: RulePolicy = RulePolicy.COMPRESSED):
        self.U = universe
        self.tassert = tassert
        self.tcode = None if isinstance(tassert.concept, Const) else universe.encode(tassert)
        self.policy = policy
        self.simplify = policy is not RulePolicy.CANONICAL
        self.compressed = policy is RulePolicy.COMPRESSED
        self.raw: list = []
        self.kinds: list[Kind] = []
        self.rules: list[Optional[str]] = []
        self.children: list[tuple[int, ...]] = []
        self.parents: list[list[int]] = []
        self.cache: dict = {}
        self.roots: list[int] = []
        self.stats = Stats()

    def __len__(self):
        return len(self.raw)

    # labels ------------------------------------------------------------------
    def label(self, nid: int):
        """Decoded label: a Sequent, BOTTOM, or ``{individual: Sequent}`` for ABox nodes."""
        lab = self.raw[nid]
        if lab is BOTTOM:
            return BOTTOM
        if isinstance(lab, ABoxLabel):
            return {n: self.U.decode_label(p) for n, p in zip(lab.names, lab.parts)}
        return self.U.decode_label(lab)

    @property
    def labels(self) -> list:
        return [self.label(n) for n in range(len(self.raw))]

    def label_text(self, nid: int) -> str:
        lab = self.label(nid)
        if isinstance(lab, dict):
            return "[" + "; ".join(f"{n}: {s}" for n, s in lab.items()) + "]"
        return str(lab)

    def encode_label(self, assertions: Iterable[Assertion]):
        codes = []
        for a in assertions:
            if isinstance(a.concept, Const):
                if not a.op.holds(a.concept.value, a.threshold):
                    return BOTTOM
                continue
            codes.append(self.U.encode(a))
        return self.U.make_label(codes, self.simplify)

    def node_for(self, label) -> tuple[int, bool]:
        """Node id of ``label`` and whether it was created just now."""
        nid = self.cache.get(label)
        if nid is not None:
            self.stats.cache_hits += 1
            return nid, False
        nid = len(self.raw)
        self.cache[label] = nid
        self.raw.append(label)
        self.kinds.append(Kind.BOTTOM if label is BOTTOM else Kind.UNEXPANDED)
        self.rules.append(None)
        self.children.append(())
        self.parents.append([])
        self.stats.nodes += 1
        return nid, True

    def add_root(self, label) -> int:
        nid, _ = self.node_for(label)
        if nid not in self.roots:
            self.roots.append(nid)
        return nid

    @property
    def bottom(self) -> Optional[int]:
        return self.cache.get(BOTTOM)

    # rules -------------------------------------------------------------------
    def _close(self, lab):
        if lab is BOTTOM or not self.compressed:
            return lab
        return self.U.closure(lab)

    def _apply(self, lab, x, rule) -> list:
        if self.compressed:
            rest = lab - {x}
            return [BOTTOM if new is None else self.U.closure(rest.union(new))
                    for new in self.U.conclusions(x, rule)]
        out = self.U.apply(lab, x, rule, self.simplify)
        size = self.U.size
        bound = size[x >> CSHIFT]
        for c in out:
            if c is not BOTTOM:
                for y in c - lab:
                    assert size[y >> CSHIFT] < bound, "rule did not shrink its principal assertion"
        return out

    def _sequent_step(self, lab):
        """``(kind, rule, child labels)`` for a kernel-coded sequent."""
        U = self.U
        ax = U.clash(lab)
        if ax is not None:
            return Kind.OR, ax, [BOTTOM]
        sel = U.select(lab, linear_first=self.policy is not RulePolicy.CANONICAL)
        if sel is None:
            return Kind.AND, "exists", [self._close(U.exists_child(x, kept, self.tcode, self.simplify))
                                        for x, kept in U.exists_instances(lab)]
        x, rule = sel
        if self.compressed and rule != "and<":
            return Kind.OR, "linear", [U.closure(lab)]
        return Kind.OR, rule, self._apply(lab, x, rule)

    def _abox_step(self, lab: ABoxLabel):
        U = self.U
        for _, _, _, op, k in lab.roles:
            if k > U.one or (k == U.one and op == GT):
                return Kind.OR, "AxR", [BOTTOM]
        for p in lab.parts:
            ax = U.clash(p)
            if ax is not None:
                return Kind.OR, ax, [BOTTOM]
        linear_first = self.policy is not RulePolicy.CANONICAL
        for i, p in enumerate(lab.parts):
            sel = U.select(p, linear_first)
            if sel is None:
                continue
            x, rule = sel
            if self.compressed and rule != "and<":
                parts = [U.closure(q) for q in lab.parts]
                if any(q is BOTTOM for q in parts):
                    return Kind.OR, "linear", [BOTTOM]
                return Kind.OR, "linear", [lab.with_parts(parts)]
            kids = []
            for c in self._apply(p, x, rule):
                kids.append(BOTTOM if c is BOTTOM else lab.with_parts(lab.parts[:i] + (c,) + lab.parts[i + 1:]))
            return Kind.OR, rule, kids
        adds: dict[int, set] = {}
        for role, src, dst, op, c in lab.roles:
            for u in lab.parts[src]:
                cid = u >> CSHIFT
                uop = (u >> KSHIFT) & 3
                if U.kind[cid] == EXISTS and uop < 2 and U.role[cid] == role \
                        and gap_closed(uop, (u & KMASK) - BIAS, op, c):
                    b = U.body(u)
                    if b not in lab.sent[dst]:
                        adds.setdefault(dst, set()).add(b)
        if adds:
            parts, sent = list(lab.parts), list(lab.sent)
            for i, new in sorted(adds.items()):
                q = self._close(U.make_label(parts[i] | new, self.simplify))
                if q is BOTTOM:
                    return Kind.OR, "edge", [BOTTOM]
                parts[i] = q
                sent[i] = sent[i] | new
            return Kind.OR, "edge", [lab.with_parts(parts, sent)]
        kids = []
        for p in lab.parts:
            kids += [self._close(U.exists_child(x, kept, self.tcode, self.simplify))
                     for x, kept in U.exists_instances(p)]
        return Kind.AND, "exists", kids

    def expand(self, nid: int) -> list[int]:
        """Expand one node; returns the ids of newly created children."""
        if self.kinds[nid] is not Kind.UNEXPANDED:
            return []
        lab = self.raw[nid]
        if isinstance(lab, ABoxLabel):
            kind, rule, kid_labels = self._abox_step(lab)
        else:
            kind, rule, kid_labels = self._sequent_step(lab)
        self.stats.expansions += 1
        kids: list[int] = []
        fresh = []
        for kl in kid_labels:
            cid, new = self.node_for(kl)
            if new:
                fresh.append(cid)
            if cid not in kids:
                kids.append(cid)
                self.parents[cid].append(nid)
        self.kinds[nid] = kind
        self.rules[nid] = rule
        self.children[nid] = tuple(kids)
        self.stats.edges += len(kids)
        return fresh

    def build(self) -> "TableauGraph":
        pending = deque(n for n in range(len(self.raw)) if self.kinds[n] is Kind.UNEXPANDED)
        while pending:
            pending.extend(self.expand(pending.popleft()))
        return self

    def is_complete(self) -> bool:
        return all(k is not Kind.UNEXPANDED for k in self.kinds)

    def exists_edges(self, nid: int) -> list[ExistsEdge]:
        """The ``(exists R)`` instances of an expanded AND-node with their child nodes."""
        if self.kinds[nid] is not Kind.AND:
            raise ValueError(f"node {nid} is not an AND-node")
        lab = self.raw[nid]
        U = self.U
        parts = list(enumerate(lab.parts)) if isinstance(lab, ABoxLabel) else [(None, lab)]
        out = []
        for i, p in parts:
            for x, kept in U.exists_instances(p):
                child = self._close(U.exists_child(x, kept, self.tcode, self.simplify))
                raw = [U.body(x), *(U.body(u) for u in kept)]
                raw = tuple(U.decode(c) for c in raw) + ((self.tassert,) if self.tcode is not None else ())
                out.append(ExistsEdge(i, U.decode(x), tuple(U.decode(u) for u in kept), self.cache[child], raw))
        return out

    # diagnostics -------------------------------------------------------------
    def dump(self) -> str:
        rows = []
        for nid in range(len(self.raw)):
            rows.append({
                "id": nid,
                "kind": self.kinds[nid].value,
                "rule": self.rules[nid],
                "root": nid in self.roots,
                "label": self.label_text(nid),
                "children": list(self.children[nid]),
            })
        return json.dumps({"nodes": rows, "stats": self.stats.as_dict()}, indent=1)

    def check_cache_injective(self) -> bool:
        return (len(set(self.raw)) == len(self.raw) and len(self.cache) == len(self.raw)
                and all(self.cache[lab] == n for n, lab in enumerate(self.raw)))


# ---------------------------------------------------------------------------
# setting up graphs


def universe_for(grid: Grid, tassert: Assertion, gamma: Iterable[Assertion] = (), abox: Optional[ABox] = None) -> Universe:
    concepts = [tassert.concept, *(a.concept for a in gamma)]
    if abox:
        concepts += [desugar_assertion(a).concept for _, a in abox.concept_assertions]
    return Universe(concepts, grid.epsilon)


def abox_root_label(g: TableauGraph, abox: ABox):
    names = tuple(abox.individuals)
    parts = []
    for n in names:
        lab = g.encode_label([g.tassert, *(desugar_assertion(a) for a in abox.assertions_for(n))])
        if lab is BOTTOM:
            return BOTTOM
        parts.append(lab)
    roles = tuple(sorted((r.role, names.index(r.source), names.index(r.target), OPCODE[r.op], g.U.units(r.threshold))
                         for r in abox.role_assertions))
    return ABoxLabel(names, tuple(parts), tuple(frozenset() for _ in names), roles)


def new_graph(gamma: Iterable[Assertion], tbox: Iterable[GCI] = (), abox: Optional[ABox] = None,
              policy: RulePolicy = RulePolicy.COMPRESSED) -> tuple[TableauGraph, Grid]:
    """Unexpanded graph with its roots: the joint ABox label (if any), then ``gamma`` plus ``T >= 1``."""
    gamma = tuple(desugar_assertion(a) for a in gamma)
    tbox = tuple(tbox)
    grid = compute_grid(tbox, gamma, abox)
    tassert = associated_assertion(tbox, grid)
    g = TableauGraph(universe_for(grid, tassert, gamma, abox), tassert, policy)
    if abox:
        g.add_root(abox_root_label(g, abox))
    if gamma or not abox:
        g.add_root(g.encode_label([tassert, *gamma]))
    return g, grid


def build_tableau(gamma: Iterable[Assertion], tbox: Iterable[GCI] = (),
                  policy: RulePolicy = RulePolicy.COMPRESSED) -> TableauGraph:
    g, _ = new_graph(gamma, tbox, None, policy)
    return g.build()


def seed_abox(abox: ABox, tbox: Iterable[GCI] = (), gamma: Iterable[Assertion] = (),
              policy: RulePolicy = RulePolicy.COMPRESSED, build: bool = True) -> TableauGraph:
    """Graph whose first root is the joint ABox label; a nonempty ``gamma`` adds a second root."""
    g, _ = new_graph(gamma, tbox, abox, policy)
    return g.build() if build else g
