import random
from fractions import Fraction

import pytest

from klrbound.algebra import Element, Monomial, canonical_word, dot, idempotent
from klrbound.expr import IdempotentMismatch, ParseError, format_element, parse_expression as P


def test_examples():
    assert P("e(0,0)") == idempotent((0, 0))
    assert P("d(1)*d(1)*e(0,0)") == 0
    assert P("x(1)^2*e(0)") == dot(1, (0,), 2)
    assert P("e(0,-3,1)") == idempotent((0, -3, 1))
    assert P("d(1) d(1) e(0,1)") == P("x(1)*e(0,1) + x(2)*e(0,1)")
    assert P("-x(1)*e(0) + 2/3*e(0)") == Element({Monomial((0,), (1,), ()): -1,
                                                  Monomial((0,), (0,), ()): Fraction(2, 3)})
    assert P("(x(1) + x(2))*e(0,0)") == P("x(1)*e(0,0) + x(2)*e(0,0)")
    assert P("0") == 0


@pytest.mark.parametrize("text,line,col", [
    ("d(1)*e(0,0", 1, 11),
    ("x(1)*e(0)\n + y(2)", 2, 4),
    ("x(0)*e(0)", 1, 1),
    ("e(0)) ", 1, 5),
    ("1/0*e(0)", 1, 3),
])
def test_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as err:
        P(text)
    assert (err.value.line, err.value.col) == (line, col)


def test_semantic_errors():
    with pytest.raises(ParseError):
        P("x(3)*e(0,1)")
    with pytest.raises(ParseError):
        P("d(2)*e(0,1)")
    with pytest.raises(ValueError):
        P("x(1)")


def test_idempotent_mismatch():
    with pytest.raises(IdempotentMismatch):
        P("e(0,1)*d(1)*e(0,1)")
    assert P("e(0,1)*d(1)*e(0,1)", allow_mismatch=True) == 0
    assert P("e(1,0)*d(1)*e(0,1)") == P("d(1)*e(0,1)")


def random_element(rng, m):
    seq = tuple(rng.randint(-2, 2) for _ in range(m))
    terms = {}
    for _ in range(rng.randint(1, 4)):
        perm = list(range(m))
        rng.shuffle(perm)
        exps = tuple(rng.randint(0, 2) for _ in range(m))
        terms[Monomial(seq, exps, canonical_word(perm))] = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return Element(terms)


def test_round_trip():
    rng = random.Random(1)
    for _ in range(1000):
        el = random_element(rng, rng.randint(1, 4))
        assert P(format_element(el)) == el
        assert Element.from_json(el.to_json()) == el
