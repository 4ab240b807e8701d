import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from nexalc.parser import parse, parse_assertion, parse_concept, parse_gci, parse_kb, print_kb
from nexalc.syntax import (
    And, Assertion, Atom, CmpOp, Const, Exists, Forall, GCI, Minus, Not, Or, Plus, RoleAssertion, SyntaxErrorAt,
)
from kbgen import random_concept

A, B = Atom("A"), Atom("B")


def test_worked_concept():
    c = parse_concept("!(A (-) 0.5) | (all R . B) (-) 0.2")
    assert c == Or(Not(Minus(A, F(1, 2))), Minus(Forall("R", B), F(1, 5)))


def test_decimal_constant_is_exact():
    assert parse("0.3") == Const(F(3, 10))
    assert parse("1/3") == Const(F(1, 3))


@pytest.mark.parametrize("text,expected", [
    ("!A & B", And(Not(A), B)),
    ("!A (-) 1/2", Minus(Not(A), F(1, 2))),
    ("A & B | A", Or(And(A, B), A)),
    ("A | B & A", Or(A, And(B, A))),
    ("some R . A & B", And(Exists("R", A), B)),
    ("some R . (A & B)", Exists("R", And(A, B))),
    ("all R . !A (+) 0.25", Plus(Forall("R", Not(A)), F(1, 4))),
])
def test_precedence(text, expected):
    assert parse_concept(text) == expected


def test_assertions_and_gcis():
    assert parse_assertion("A & B > 0.25") == Assertion(And(A, B), CmpOp.GT, F(1, 4))
    # thresholds may leave [0,1]
    assert parse_assertion("A <= -1/2").threshold == F(-1, 2)
    assert parse_gci("A [= some R . B") == GCI(A, Exists("R", B))


def test_fuzzy_gci_is_rewritten():
    assert parse_gci("A [= B >= 0.7") == GCI(A, Plus(B, F(3, 10)))
    assert parse_gci("A [= B >= 1") == GCI(A, Plus(B, F(0)))


def test_kb_file():
    kb = parse_kb("""
# TBox
A [= B
A >= 1/2          # query
a : B > 0.1
(a, b) : R >= 1
A & !A
""")
    assert kb.tbox == (GCI(A, B),)
    assert kb.query == (Assertion(A, CmpOp.GE, F(1, 2)),)
    assert kb.abox.concept_assertions == (("a", Assertion(B, CmpOp.GT, F(1, 10))),)
    assert kb.abox.role_assertions == (RoleAssertion("R", "a", "b", CmpOp.GE, F(1)),)
    assert kb.abox.individuals == ["a", "b"]
    assert kb.concepts == (And(A, Not(A)),)
    assert parse_kb(print_kb(kb)) == kb


class TestErrors:
    @pytest.mark.parametrize("text,col", [
        ("A &", 4),
        ("some R A", 8),
        ("A (-) 1.5", 7),
        ("A >= x", 6),
        ("(A", 3),
    ])
    def test_position(self, text, col):
        with pytest.raises(SyntaxErrorAt) as e:
            parse(text)
        assert e.value.line == 1 and e.value.column == col

    def test_line_number_in_kb(self):
        with pytest.raises(SyntaxErrorAt) as e:
            parse_kb("A [= B\n\n# fine\n  B &&\n")
        assert e.value.line == 4

    def test_constant_out_of_range(self):
        with pytest.raises(SyntaxErrorAt):
            parse_concept("2")

    def test_role_assertion_needs_lower_bound(self):
        with pytest.raises(SyntaxErrorAt):
            parse_kb("(a, b) : R <= 0.5")

    def test_fuzzy_gci_degree_range(self):
        with pytest.raises(SyntaxErrorAt):
            parse_gci("A [= B >= 1.5")


def test_round_trip_corpus():
    rng = random.Random(1234)
    for _ in range(1000):
        c = random_concept(rng, rng.randint(0, 6), roles=("R", "S", "hasPart"),
                           consts=tuple(F(i, 10) for i in range(11)))
        assert parse_concept(c.text) == c, c.text


@settings(max_examples=200)
@given(st.integers(0, 10**6), st.sampled_from(list(CmpOp)), st.fractions(-2, 2, max_denominator=20))
def test_assertion_round_trip(seed, op, t):
    c = random_concept(random.Random(seed), 4)
    a = Assertion(c, op, t)
    assert parse_assertion(str(a)) == a
