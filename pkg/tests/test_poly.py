import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from codazzi_lab.poly import (
    BothZero,
    NotSquare,
    Poly,
    PolyMatrix,
    Var,
    determinant_cofactor,
    determinant_fraction_free,
    determinant_leibniz,
    resultant,
    substitute,
    sylvester_matrix,
    symbols,
)

from conftest import XV, X, Y, Z, to_sympy

VARS = [X, Y, Z]


@st.composite
def polys(draw, max_terms=5, max_exp=3):
    p = Poly()
    for _ in range(draw(st.integers(0, max_terms))):
        c = Fraction(draw(st.integers(-6, 6)), draw(st.integers(1, 4)))
        m = Poly.const(c)
        for v in VARS:
            m = m * v ** draw(st.integers(0, max_exp))
        p = p + m
    return p


# -- oracle checks against sympy ------------------------------------------


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_product_matches_sympy(f, g):
    assert sp.expand(to_sympy(f * g) - to_sympy(f) * to_sympy(g)) == 0


@settings(max_examples=40, deadline=None)
@given(polys(max_terms=4, max_exp=2), polys(max_terms=4, max_exp=2))
def test_resultant_matches_sympy(f, g):
    if f.degree(XV) == 0 and g.degree(XV) == 0:
        return
    if f.is_zero() or g.is_zero():
        return
    ours = to_sympy(resultant(f, g, XV))
    theirs = sp.resultant(to_sympy(f), to_sympy(g), sp.Symbol("x"))
    assert sp.expand(ours - theirs) == 0


def test_determinants_agree_with_sympy():
    rng = random.Random(3)
    for size in (1, 2, 3, 4):
        rows = [[Poly.const(rng.randint(-4, 4)) + X * rng.randint(-2, 2) + Y * rng.randint(-1, 1) for _ in range(size)] for _ in range(size)]
        m = PolyMatrix.from_rows(rows)
        ff = determinant_fraction_free(m)
        assert ff == determinant_cofactor(m)
        sym = sp.Matrix([[to_sympy(e) for e in row] for row in rows]).det()
        assert sp.expand(to_sympy(ff) - sym) == 0


def test_leibniz_matches_fraction_free_on_rationals():
    rows = [[Fraction(1, 2), 3, -1], [2, Fraction(-5, 3), 0], [1, 1, 4]]
    m = PolyMatrix.from_rows([[Poly.const(c) for c in row] for row in rows])
    assert determinant_leibniz([[Fraction(c) for c in row] for row in rows]) == determinant_fraction_free(m).constant_value()


# -- ring laws ---------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Poly()


@settings(max_examples=40, deadline=None)
@given(polys(max_terms=4, max_exp=2), polys(max_terms=3, max_exp=2))
def test_divide_exact_roundtrip(a, b):
    if b.is_zero():
        return
    assert (a * b).divide_exact(b) == a


@settings(max_examples=40, deadline=None)
@given(polys(max_terms=4, max_exp=2))
def test_derivative_product_rule(a):
    b = X * Y + 3
    assert (a * b).diff(XV) == a.diff(XV) * b + a * b.diff(XV)


# -- basic behaviour ----------------------------------------------------------


def test_canonical_text():
    x, y = symbols("x y")
    assert str((2 * x + 3 * y) ** 2) == "4*x^2 + 12*x*y + 9*y^2"
    assert str(Poly()) == "0"


def test_substitute_and_eval():
    x, y = symbols("x y")
    p = x ** 2 * y - 3
    xv = next(iter(x.variables()))
    yv = next(iter(y.variables()))
    assert substitute(p, {xv: y + 1}) == (y + 1) ** 2 * y - 3
    assert p.eval({xv: Fraction(2), yv: Fraction(1, 4)}) == -2


def test_as_univariate_and_leading():
    p = X ** 2 * Y + X * 3 + Z
    parts = p.as_univariate(XV)
    assert parts[2] == Y and parts[1] == Poly.const(3) and parts[0] == Z
    assert p.degree(XV) == 2


def test_divide_exact_fails_cleanly():
    assert (X ** 2 + 1).divide_exact(X + 1) is None


def test_var_order_is_structural():
    a = Var((2, 0), "a")
    b = Var((1, 0), "b")
    assert b < a
    assert sorted([a, b]) == [b, a]


def test_resultant_constant_cases():
    assert resultant(Poly.const(3), X ** 2 + 1, XV) == Poly.const(9)
    with pytest.raises(BothZero):
        resultant(Poly(), Poly(), XV)


def test_resultant_swap_sign_and_multiplicativity():
    f1, f2, g = X ** 2 + Y, X - 2 * Z, X ** 3 + X * Y + 1
    assert resultant(g, f1, XV) == resultant(f1, g, XV) * (-1) ** (2 * 3)
    assert resultant(f2, g, XV) == resultant(g, f2, XV) * (-1) ** (1 * 3)
    assert resultant(f1 * f2, g, XV) == resultant(f1, g, XV) * resultant(f2, g, XV)


def test_sylvester_shape():
    m = sylvester_matrix(X ** 3 + 1, X ** 2 + Y, XV)
    assert (m.rows, m.cols) == (5, 5)


def test_non_square_determinant_rejected():
    with pytest.raises(NotSquare):
        determinant_fraction_free(PolyMatrix(1, 2, [Poly.const(1), Poly.const(2)]))
