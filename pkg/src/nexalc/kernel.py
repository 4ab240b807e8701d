"""Integer-coded rule engine used to build tableau graphs quickly.

Every concept reachable by the rules is a subconcept of the root label or
of ``T >= 1``, so the concept universe is fixed up front.  Concepts get ids
in the order of their printed form and an assertion ``C op k*unit`` is packed
into one int ``(id << 42) | (op << 40) | (k + BIAS)``.  Integer order on
codes is then exactly the canonical assertion order (printed concept,
direction, strictness, threshold), and labels are frozensets of ints.

All thresholds the rules can produce are integer multiples of half the grid
step, which is used as ``unit``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional

from .syntax import (
    And, Assertion, Atom, CmpOp, Concept, Const, Exists, Minus, Not, Sequent, subconcepts,
)

ATOM, CONST, NOT, MINUS, AND, EXISTS = range(6)
LE, LT, GE, GT = range(4)
OPS = (CmpOp.LE, CmpOp.LT, CmpOp.GE, CmpOp.GT)
OPCODE = {op: i for i, op in enumerate(OPS)}

KSHIFT = 40
CSHIFT = 42
BIAS = 1 << 39
KMASK = (1 << 40) - 1


def holds(op: int, a: int, b: int) -> bool:
    if op == LE:
        return a <= b
    if op == LT:
        return a < b
    if op == GE:
        return a >= b
    return a > b


def gap_closed(lt: int, d: int, gt: int, c: int) -> bool:
    """No value ``e`` with ``e lt d`` and ``e gt c`` (the blacktriangle test ``d < c`` or ``d <= c``)."""
    if lt == LE and gt == GE:
        return d < c
    return d <= c


class Bottom:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "BOTTOM"

    def __str__(self):
        return "_|_"

    def __reduce__(self):
        return (Bottom, ())


BOTTOM = Bottom()


class Universe:
    """Concept table plus the packed-assertion codec and the rules."""

    def __init__(self, concepts: Iterable[Concept], unit: Fraction):
        closure: dict[Concept, None] = {}
        for c in concepts:
            for d in subconcepts(c):
                closure.setdefault(d, None)
        order = sorted(closure, key=lambda c: c.text)
        for a, b in zip(order, order[1:]):
            if a.text == b.text:
                raise ValueError(f"two concepts print as {a.text!r}")
        self.unit = unit
        one = 1 / unit
        if one.denominator != 1:
            raise ValueError("1 must be a multiple of the unit")
        self.one = int(one)
        self.concepts = order
        self.cid = {c: i for i, c in enumerate(order)}
        n = len(order)
        self.kind = [0] * n
        self.left = [-1] * n
        self.right = [-1] * n
        self.val = [0] * n
        self.role: list[Optional[str]] = [None] * n
        self.size = [c.size for c in order]
        self._closure_memo: dict = {}
        self._rule_memo: dict = {}
        self._label_memo: dict = {}
        for i, c in enumerate(order):
            if isinstance(c, Atom):
                self.kind[i] = ATOM
            elif isinstance(c, Const):
                self.kind[i] = CONST
                self.val[i] = self.units(c.value)
            elif isinstance(c, Not):
                self.kind[i] = NOT
                self.left[i] = self.cid[c.arg]
            elif isinstance(c, Minus):
                self.kind[i] = MINUS
                self.left[i] = self.cid[c.arg]
                self.val[i] = self.units(c.value)
            elif isinstance(c, And):
                self.kind[i] = AND
                self.left[i] = self.cid[c.left]
                self.right[i] = self.cid[c.right]
            elif isinstance(c, Exists):
                self.kind[i] = EXISTS
                self.left[i] = self.cid[c.arg]
                self.role[i] = c.role
            else:
                raise TypeError(f"concept {c.text!r} is not in core form")

    # codec -----------------------------------------------------------------
    def units(self, value: Fraction) -> int:
        k = value / self.unit
        if k.denominator != 1:
            raise ValueError(f"{value} is not a multiple of the unit {self.unit}")
        return int(k)

    def encode(self, a: Assertion) -> int:
        return self.pack(self.cid[a.concept], OPCODE[a.op], self.units(a.threshold))

    @staticmethod
    def pack(cid: int, op: int, k: int) -> int:
        k += BIAS
        if not 0 <= k <= KMASK:
            raise OverflowError("threshold out of packing range")
        return (cid << CSHIFT) | (op << KSHIFT) | k

    @staticmethod
    def unpack(code: int) -> tuple[int, int, int]:
        return code >> CSHIFT, (code >> KSHIFT) & 3, (code & KMASK) - BIAS

    def decode(self, code: int) -> Assertion:
        cid, op, k = self.unpack(code)
        return Assertion(self.concepts[cid], OPS[op], k * self.unit)

    def decode_label(self, label) -> Sequent:
        return Sequent(self.decode(x) for x in label)

    # labels ----------------------------------------------------------------
    def make_label(self, codes: Iterable[int], simplify: bool = True):
        """Frozenset label or BOTTOM; ground assertions decided, optional normalization."""
        info = self._label_memo
        keep: dict[int, int] = {}
        strength: dict[int, int] = {}
        for x in codes:
            got = info.get(x)
            if got is None:
                got = info[x] = self._label_info(x)
            if got is True:  # ground and true
                continue
            if got is False:
                return BOTTOM
            if not simplify:
                keep[x] = x
                continue
            key, s = got
            if key is None:  # trivially true
                continue
            cur = strength.get(key)
            if cur is None or s > cur:
                strength[key] = s
                keep[key] = x
        return frozenset(keep.values())

    def _label_info(self, x: int):
        """True/False for ground codes, else ``(key, strength)`` with key None when trivially true."""
        cid = x >> CSHIFT
        op = (x >> KSHIFT) & 3
        k = (x & KMASK) - BIAS
        if self.kind[cid] == CONST:
            return holds(op, self.val[cid], k)
        if op >= 2:
            if k < 0 or (k == 0 and op == GE):
                return None, 0
            return cid << 1 | 1, 2 * k + (op & 1)
        if k > self.one or (k == self.one and op == LE):
            return None, 0
        return cid << 1, -2 * k + (op & 1)

    def clash(self, label) -> Optional[str]:
        kind, one = self.kind, self.one
        lower: dict[int, tuple[int, int]] = {}
        upper: dict[int, tuple[int, int]] = {}
        for x in label:
            cid = x >> CSHIFT
            kd = kind[cid]
            if kd == ATOM:
                op = (x >> KSHIFT) & 3
                k = (x & KMASK) - BIAS
                if op >= 2:
                    if k > one or (k == one and op == GT):
                        return "Ax1"
                    cur = lower.get(cid)
                    if cur is None or k > cur[0] or (k == cur[0] and op == GT):
                        lower[cid] = (k, op)
                else:
                    if k < 0 or (k == 0 and op == LT):
                        return "Ax0"
                    cur = upper.get(cid)
                    if cur is None or k < cur[0] or (k == cur[0] and op == LT):
                        upper[cid] = (k, op)
            elif kd == CONST:
                if not holds((x >> KSHIFT) & 3, self.val[cid], (x & KMASK) - BIAS):
                    return "Axc"
            elif kd == EXISTS:
                op = (x >> KSHIFT) & 3
                if op < 2:
                    k = (x & KMASK) - BIAS
                    if k < 0 or (k == 0 and op == LT):
                        return "AxE"
        if lower and upper:
            for cid, (d, lt) in upper.items():
                got = lower.get(cid)
                if got is not None and gap_closed(lt, d, got[1], got[0]):
                    return "Axp"
        return None

    # rules -----------------------------------------------------------------
    def rule_of(self, x: int) -> Optional[str]:
        got = self._rule_memo.get(x, 0)
        if got == 0:
            got = self._rule_memo[x] = self._rule_of(x)
        return got

    def _rule_of(self, x: int) -> Optional[str]:
        cid = x >> CSHIFT
        kd = self.kind[cid]
        if kd == AND:
            return "and>" if (x >> KSHIFT) & 3 >= 2 else "and<"
        if kd == NOT:
            return "not"
        if kd == MINUS:
            op = (x >> KSHIFT) & 3
            if op < 2:
                return "minus<"
            k = (x & KMASK) - BIAS
            if k > 0 or (k == 0 and op == GT):
                return "minus>"
        return None

    def conclusions(self, x: int, rule: str):
        """New assertions per conclusion (None marks a closed conclusion)."""
        cid = x >> CSHIFT
        op = (x >> KSHIFT) & 3
        k = (x & KMASK) - BIAS
        pack = self.pack
        if rule == "and>":
            return ((pack(self.left[cid], op, k), pack(self.right[cid], op, k)),)
        if rule == "and<":
            return ((pack(self.left[cid], op, k),), (pack(self.right[cid], op, k),))
        if rule == "not":
            return ((pack(self.left[cid], op ^ 2, self.one - k),),)
        if rule == "minus<":
            # ground side condition k flip(op) 0
            if k < 0 or (k == 0 and op == LT):
                return (None,)
            return ((pack(self.left[cid], op, k + self.val[cid]),),)
        if rule == "minus>":
            return ((pack(self.left[cid], op, k + self.val[cid]),),)
        raise ValueError(rule)

    def select(self, label, linear_first: bool):
        """``(code, rule)`` of the principal assertion, or None when saturated."""
        best = best_rule = None
        best_lin = best_lin_rule = None
        for x in label:
            r = self.rule_of(x)
            if r is None:
                continue
            if best is None or x < best:
                best, best_rule = x, r
            if r != "and<" and (best_lin is None or x < best_lin):
                best_lin, best_lin_rule = x, r
        if linear_first and best_lin is not None:
            return best_lin, best_lin_rule
        if best is None:
            return None
        return best, best_rule

    def apply(self, label, x: int, rule: str, simplify: bool) -> list:
        rest = label - {x}
        out = []
        for new in self.conclusions(x, rule):
            if new is None:
                out.append(BOTTOM)
            else:
                out.append(self.make_label(rest.union(new), simplify))
        return out

    def closure(self, label):
        """Apply every non-branching rule until none applies (BOTTOM on a clash).

        Non-branching rules only look at their principal assertion, so the
        closure of a label is the union of the closures of its members.
        """
        memo = self._closure_memo
        work = set()
        for x in label:
            got = memo.get(x)
            if got is None:
                got = memo[x] = self._closure_one(x)
            if got is BOTTOM:
                return BOTTOM
            work |= got
        lab = self.make_label(work, True)
        if lab is BOTTOM or self.clash(lab) is not None:
            return BOTTOM
        return lab

    def _closure_one(self, x: int):
        out = set()
        pending = [x]
        seen = {x}
        while pending:
            y = pending.pop()
            rule = self.rule_of(y)
            if rule is None or rule == "and<":
                out.add(y)
                continue
            (new,) = self.conclusions(y, rule)
            if new is None:
                return BOTTOM
            for z in new:
                if z not in seen:
                    seen.add(z)
                    pending.append(z)
        return frozenset(out)

    def _linear(self, x: int) -> bool:
        r = self.rule_of(x)
        return r is not None and r != "and<"

    # (exists R) --------------------------------------------------------------
    def exists_instances(self, label):
        """``(existential code, [kept universal codes])`` in canonical order."""
        kind, role = self.kind, self.role
        ex, univ = [], []
        for x in label:
            cid = x >> CSHIFT
            if kind[cid] != EXISTS:
                continue
            op = (x >> KSHIFT) & 3
            if op >= 2:
                k = (x & KMASK) - BIAS
                if k > 0 or (k == 0 and op == GT):
                    ex.append(x)
            else:
                univ.append(x)
        ex.sort()
        out = []
        for x in ex:
            cid = x >> CSHIFT
            r = role[cid]
            op = (x >> KSHIFT) & 3
            c = (x & KMASK) - BIAS
            kept = sorted(u for u in univ if role[u >> CSHIFT] == r
                          and gap_closed((u >> KSHIFT) & 3, (u & KMASK) - BIAS, op, c))
            out.append((x, kept))
        return out

    def body(self, x: int) -> int:
        cid = x >> CSHIFT
        return (self.left[cid] << CSHIFT) | (x & ((1 << CSHIFT) - 1))

    def exists_child(self, x: int, kept, tcode: Optional[int], simplify: bool):
        codes = [self.body(x), *(self.body(u) for u in kept)]
        if tcode is not None:
            codes.append(tcode)
        return self.make_label(codes, simplify)
