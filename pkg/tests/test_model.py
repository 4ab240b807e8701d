from dataclasses import replace
from fractions import Fraction as F

import pytest

from nexalc.model import (
    ModelError, choose_atomic_value, choose_role_value, entails, extract_model, saturation_endpoints,
    verify_extraction,
)
from nexalc.parser import parse_assertion, parse_kb
from nexalc.semantics import Evaluator, Interpretation, check_sequent, check_tbox
from nexalc.solver import is_satisfiable, solve_on_the_fly
from nexalc.syntax import CmpOp, Sequent
from nexalc.tableau import Kind, find_clash
from kbgen import random_kb

GE, GT, LE, LT = CmpOp.GE, CmpOp.GT, CmpOp.LE, CmpOp.LT


def A(text):
    return parse_assertion(text)


class TestChoosers:
    def test_attainable_lower(self):
        assert choose_atomic_value([(GE, F(1, 2))]) == F(1, 2)

    def test_open_interval_midpoint(self):
        v = choose_atomic_value([(GT, F(3, 10)), (LT, F(2, 5))])
        assert v == F(7, 20) and v > F(3, 10) and v < F(2, 5)

    def test_empty(self):
        assert choose_atomic_value([]) == 0

    def test_upper_when_lower_open(self):
        assert choose_atomic_value([(GT, F(1, 2)), (LE, F(4, 5))]) == F(4, 5)

    def test_out_of_range_bounds(self):
        assert choose_atomic_value([(GE, F(-1)), (LE, F(3))]) == 0
        assert choose_atomic_value([(GT, F(0))]) == F(1)

    def test_infeasible(self):
        with pytest.raises(ModelError):
            choose_atomic_value([(GE, F(1, 2)), (LT, F(1, 2))])
        with pytest.raises(ModelError):
            choose_atomic_value([(GT, F(1))])

    def test_role_values(self):
        assert choose_role_value([(GE, F(1, 2))], []) == F(1, 2)
        assert choose_role_value([(GT, F(1, 2))], [(LE, F(4, 5))]) == F(4, 5)
        assert choose_role_value([], [(LT, F(3, 10))]) == 0


class TestEntails:
    def test_strength(self):
        have = [A("p >= 1/2"), A("q < 1/4")]
        assert entails(have, A("p >= 1/3")) and entails(have, A("p > 1/4"))
        assert not entails(have, A("p > 1/2"))
        assert entails(have, A("q <= 1/4")) and not entails(have, A("q < 1/5"))
        assert entails([], A("p >= 0")) and entails([], A("p <= 1")) and not entails([], A("p > 0"))


class TestExtraction:
    def test_single_atom(self):
        ex = extract_model(is_satisfiable([A("p >= 1/2")]))
        I = ex.interpretation
        assert len(I.domain) == 1 and I.atom("p", ex.designated) == F(1, 2)

    def test_two_successors(self):
        gamma = [A("some R . A > 1/2"), A("some R . B > 1/2"), A("all R . !(A & B) >= 1")]
        r = is_satisfiable(gamma)
        ex = extract_model(r)
        assert ex.size == 3
        assert check_sequent(ex.interpretation, ex.designated, gamma)

    def test_shift_tbox_model(self, shift_tbox):
        gamma = [A("A >= 1/2"), A("B >= 3/5")]
        ex = extract_model(is_satisfiable(gamma, shift_tbox))
        I = ex.interpretation
        ev = Evaluator(I)
        assert check_tbox(I, shift_tbox, ev)
        for x in I.domain:
            assert ev(x, shift_tbox[0].lhs) <= ev(x, shift_tbox[0].rhs)
        assert check_sequent(I, ex.designated, gamma, ev)

    def test_worked_tbox(self, ex1):
        tbox, _ = ex1
        gamma = [A("A >= 1/2"), A("(all R . B) (-) 1/5 >= 1/2")]
        ex = extract_model(solve_on_the_fly(gamma, tbox))
        assert check_tbox(ex.interpretation, tbox)

    def test_abox(self):
        kb = parse_kb("a : A >= 1\n(a, b) : R >= 1/2\na : all R . B >= 1/2\nb : some R . A > 0")
        r = is_satisfiable([], (), kb.abox)
        ex = extract_model(r)
        I = ex.interpretation
        assert {"a", "b"} <= set(I.domain)
        assert I.role("R", "a", "b") >= F(1, 2)
        assert Evaluator(I).holds("a", A("all R . B >= 1/2"))

    def test_unsat_has_no_model(self):
        with pytest.raises(ValueError):
            extract_model(is_satisfiable([A("A >= 1"), A("A < 1")]))

    def test_verification_catches_a_bad_model(self):
        r = is_satisfiable([A("p >= 1/2")])
        ex = extract_model(r)
        broken = replace(ex, interpretation=Interpretation(ex.interpretation.domain))
        with pytest.raises(ModelError):
            verify_extraction(broken, r)


def _sat_results(n):
    for seed in range(n):
        kb = random_kb(seed)
        r = is_satisfiable(kb.gamma, kb.tbox)
        if r.sat:
            yield kb, r


class TestExtractionProperties:
    def test_endpoints(self):
        for kb, r in _sat_results(40):
            g, m = r.graph, r.marking
            end = saturation_endpoints(g, m)
            assert set(end) == m.nodes
            for v, x in end.items():
                assert g.kinds[x] is Kind.AND
                if g.kinds[v] is Kind.AND:
                    assert x == v
                else:
                    assert end[m.choice[v]] == x

    def test_y_sets(self):
        for kb, r in _sat_results(60):
            ex = extract_model(r)
            g = r.graph
            ands = [n for n in r.marking.nodes if g.kinds[n] is Kind.AND]
            assert ex.size <= len(ands)
            for (node, part), ind in ex.names.items():
                y = Sequent(ex.Y[ind])
                assert find_clash(y) is None, kb
                final = g.label(node)
                for a in y:
                    if type(a.concept).__name__ in ("Atom", "Exists"):
                        assert entails(final, a), (kb, a)
