import random

import pytest

from codazzi_lab.expr import parse
from codazzi_lab.frame import H, LAM, MU, Frame, inverse
from codazzi_lab.kb import (
    DerivationTrace,
    Equation,
    Inconsistent,
    KnowledgeBase,
    ZeroPolynomial,
    evaluate,
    install_fact,
    replay,
    sample_point,
    saturate,
    solve_block,
)
from codazzi_lab.poly import Poly


@pytest.fixture
def frame():
    return Frame(7, 4)


@pytest.fixture
def kb(frame):
    return KnowledgeBase(frame).declare_nonzero(Poly.var(MU), "mu").declare_nonzero(Poly.var(H), "H")


def _w(frame, text):
    (v,) = parse(text, frame).variables()
    return v


def test_saturate_solves_linear_equations(frame, kb):
    a, b = _w(frame, "w(1,2,n)"), _w(frame, "w(2,1,n)")
    out, trace = saturate(kb, [(parse("w(1,2,n) - H", frame), "first"), (parse("w(2,1,n) + w(1,2,n)", frame), "second")])
    assert out.reduce(Poly.var(a)) == Poly.var(H)
    assert out.reduce(Poly.var(b)) == -Poly.var(H)
    assert trace.steps


def test_division_by_nonzero_member(frame, kb):
    a = _w(frame, "w(1,2,n)")
    out, trace = saturate(kb, [(parse("mu w(1,2,n) - lam^2", frame), "eq")])
    fact = out.fact(a)
    assert fact.den == Poly.var(MU)
    assert fact.value == Poly.var(LAM) ** 2 * Poly.var(inverse(MU))
    assert trace.steps[0]["side_conditions"] == ["mu"]


def test_contradiction_is_detected(frame, kb):
    with pytest.raises(Inconsistent) as exc:
        saturate(kb, [(parse("w(1,2,n)", frame), "zero"), (parse("w(1,2,n) - mu", frame), "nonzero")])
    assert "zero" in exc.value.origin or "nonzero" in exc.value.origin


def test_nonzero_factors_are_split(frame, kb):
    out = kb.declare_nonzero(parse("H mu lam", frame), "product")
    assert out.is_nonzero(Poly.var(LAM))
    with pytest.raises(ZeroPolynomial):
        kb.declare_nonzero(Poly(), "zero")


def test_derivative_of_fact_is_rewritten(frame, kb):
    out, _ = install_fact(kb, LAM, Poly.var(MU) * 2, "hyp")
    assert out.reduce(frame.d(1, LAM)) == frame.d(1, MU) * 2


def test_solve_block(frame, kb):
    x, y = _w(frame, "w(1,2,n)"), _w(frame, "w(2,1,n)")
    eqs = [parse("mu w(1,2,n) + H w(2,1,n) - 1", frame), parse("H w(1,2,n) - mu w(2,1,n)", frame)]
    det_free = kb.declare_nonzero(parse("mu^2 + H^2", frame), "det")
    out, _ = solve_block(det_free, eqs, [x, y], "block")
    for e in eqs:
        assert out.reduce_eq(e).is_zero()
    with pytest.raises(ValueError):
        solve_block(kb, eqs, [x, y], "block")


def test_trace_jsonl_round_trip(frame, kb):
    _, trace = saturate(kb, [(parse("w(1,2,n) - H", frame), "eq")])
    again = DerivationTrace.from_jsonl(trace.to_jsonl())
    assert again.steps == trace.steps


def test_replay_reproduces_trace(frame, kb):
    eqs = [(parse("w(1,2,n) - H", frame), "a"), (parse("w(2,1,n) - mu w(1,2,n)", frame), "b")]
    _, trace = saturate(kb, eqs)
    assert replay(kb, eqs, trace) is not None
    trace.steps[0]["output"] = "tampered"
    with pytest.raises(AssertionError):
        replay(kb, eqs, trace)


def test_sample_point_satisfies_facts(frame, kb):
    eqs = [Equation(parse("w(1,2,n) mu - H lam", frame), ("a",)), Equation(parse("w(2,1,n) - H^2", frame), ("b",))]
    out, _ = saturate(kb, eqs)
    rng = random.Random(0)
    for _ in range(10):
        pt = sample_point(out, [e.poly for e in eqs], rng)
        for e in eqs:
            assert evaluate(e.poly, pt.__getitem__) == 0
        assert pt[MU] != 0 and pt[H] != 0


def test_serialization_is_stable(frame, kb):
    eqs = [(parse("w(1,2,n) - H", frame), "a"), (parse("w(2,1,n) - mu", frame), "b")]
    one, _ = saturate(kb, eqs)
    two, _ = saturate(kb, list(reversed(eqs)))
    assert one.serialize() == two.serialize()
