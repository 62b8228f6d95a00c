import itertools

import pytest

from codazzi_lab.expr import ParseError, parse
from codazzi_lab.frame import (
    CONVENTIONS,
    H,
    LAM,
    MU,
    Frame,
    FrameError,
    IndexClass,
    LinExpr,
    cancel_inverses,
    clear_inverses,
    inverse,
)
from codazzi_lab.poly import Poly

CLASSES = ["1", "2", "A", "At", "B", "Bt", "n"]


@pytest.fixture(scope="module")
def frame():
    return Frame(8, 4)


def test_index_layout(frame):
    assert list(frame.a_class) == [3, 4]
    assert list(frame.b_class) == [5, 6, 7]
    assert [frame.idx(c) for c in CLASSES] == [1, 2, 3, 4, 5, 6, 8]
    assert frame.class_of(7) is IndexClass.B
    assert frame.binding.label(6) == "Bt"


def test_tilde_classes_can_be_empty():
    f = Frame(6, 3)
    assert not f.binding.has_atilde
    with pytest.raises(FrameError):
        f.idx("At")
    g = Frame(6, 4)
    assert not g.binding.has_btilde
    with pytest.raises(FrameError):
        g.idx("Bt")


@pytest.mark.parametrize("n,r", [(4, 2), (8, 2), (8, 7)])
def test_inadmissible_parameters(n, r):
    with pytest.raises(FrameError):
        Frame(n, r)


def test_unknown_convention():
    with pytest.raises(FrameError):
        Frame(8, 4, "other")


def test_lam_n_is_minus_half_n_h(frame):
    assert frame.lam_n == Poly.var(H) * -4
    # the shape operator is traceless up to n*H as required by the trace condition
    assert frame.trace_shape() == Poly.var(LAM) * 2 + frame.shape_entry(3, 3) * 2 + frame.shape_entry(5, 5) * 3 - Poly.var(H) * 4


def test_rotation_block(frame):
    assert frame.shape_entry(1, 2) == Poly.var(MU)
    assert frame.shape_entry(2, 1) == -Poly.var(MU)


@pytest.mark.parametrize("convention", CONVENTIONS)
def test_codazzi_residual_antisymmetric_in_first_pair(convention):
    f = Frame(8, 4, convention)
    for x, y, z in itertools.product(CLASSES, repeat=3):
        assert f.codazzi_residual(x, y, z) == -f.codazzi_residual(y, x, z)


def test_connection_orientation():
    anti = Frame(7, 4, "antisymmetric")
    met = Frame(7, 4, "metric")
    assert anti.conn(2, 1, 3) == -anti.conn(2, 3, 1)
    # e_1 is timelike, so the metric rule flips the sign of mixed pairs
    assert met.conn(2, 3, 1) == met.conn(2, 1, 3)
    assert met.conn(2, 4, 3) == -met.conn(2, 3, 4)
    assert anti.conn(2, 3, 3).is_zero()


def test_inverse_symbols():
    h, ih = Poly.var(H), Poly.var(inverse(H))
    assert cancel_inverses(h * ih * 3) == Poly.const(3)
    assert clear_inverses(ih ** 2 + Poly.var(MU)) == Poly.const(1) + Poly.var(MU) * h ** 2


def test_differentiate_inverse(frame):
    ih = Poly.var(inverse(H))
    assert frame.differentiate(1, ih) == -(ih ** 2) * frame.d(1, H)


def test_alpha_is_constant(frame):
    assert frame.differentiate(2, parse("alpha*H", frame)) == parse("alpha*e(2,H)", frame)


def test_linexpr_split(frame):
    p = parse("H*w(1,2,n) + e(n,H) + lam", frame)
    lin = LinExpr.from_poly(p)
    assert lin.constant == Poly.var(LAM)
    assert len(lin.unknowns()) == 2
    assert lin.to_poly() == p


def test_parser_basics(frame):
    assert parse("lamn", frame) == frame.lam_n
    assert parse("2 H = H + H", frame).is_zero()
    assert parse("(lam + mu)^2", frame) == (Poly.var(LAM) + Poly.var(MU)) ** 2
    assert parse("w(A,2,B)", frame) == frame.conn(3, 2, 5)
    assert parse("lam mu", frame) == Poly.var(LAM) * Poly.var(MU)


@pytest.mark.parametrize("text", ["H +", "w(1,2)", "foo", "(H"])
def test_parser_errors(frame, text):
    with pytest.raises(ParseError):
        parse(text, frame)


def _skew_defect(f, z, w):
    a = f.g(f.curvature_vector(1, 8, z), f.basis(w))
    b = f.g(f.curvature_vector(1, 8, w), f.basis(z))
    return a + b


@pytest.mark.parametrize("z,w", [(1, 2), (3, 8), (2, 5), (1, 5)])
def test_curvature_skew_under_metric_rule(z, w):
    assert _skew_defect(Frame(8, 4, "metric"), z, w).is_zero()


def test_antisymmetric_rule_is_skew_only_on_spacelike_pairs():
    f = Frame(8, 4, "antisymmetric")
    assert _skew_defect(f, 3, 8).is_zero()
    assert _skew_defect(f, 2, 5).is_zero()
    assert not _skew_defect(f, 1, 5).is_zero()
