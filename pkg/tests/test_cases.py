from fractions import Fraction

import pytest

from codazzi_lab.cases import (
    ShapeMismatch,
    certify_theorem,
    f_poly,
    g_poly,
    negative_controls,
    prelude,
    resultant_report,
    run_case_a,
    run_case_b,
    run_case_c,
    run_case_d,
)
from codazzi_lab.frame import H, LAM, LAM3, MU
from codazzi_lab.poly import Poly

# computed independently with sympy from the explicit quartic and cubic:
# (H-leading coefficient / mu^5, resultant at H = mu = 1, lam3-leads of f and g / mu)
RESULTANT_ORACLE = {
    (7, 4): (4251182290173952, 4051258223099904, -128, -384),
    (8, 4): (53311410410618880, 50960458108108800, -160, -480),
    (10, 6): (1788660744192000000, 1720517117909925888, -448, -1344),
    (12, 9): (15319572461389873152, 14887851657982377984, -1008, -3024),
}

BC_POINTS = [(7, 4), (8, 4), (8, 5), (10, 6)]


def eliminant(n, r):
    return Fraction((2 * r - 1) * n * n, r - 2)


def _h2(c):
    return f"{c}*H^2"


def _step(report, label):
    return next(s for s in report.steps if s.label == label)


# -- shared prelude --------------------------------------------------------------


@pytest.mark.parametrize("n,r", [(8, 4), (7, 4), (10, 6)])
def test_gauss_residual_is_minus_half_n_h_lam(n, r):
    pre = prelude(n, r)
    res_step = pre.steps[0]
    assert res_step.note == "passed"
    expected = Poly.var(LAM) * Poly.var(H) * Fraction(-n, 2)
    assert res_step.engine == pre.frame.render(expected)
    assert pre.lam_fact is not None and pre.lam_fact.value.is_zero()


def test_prelude_steps_match():
    assert [s.status for s in prelude(8, 4).steps] == ["CHECK", "MATCH", "CHECK", "MATCH", "MATCH"]


# -- Case A ----------------------------------------------------------------------


def test_case_a_branches():
    rep = run_case_a(8, 4)
    assert rep.contradiction
    assert rep.branches == {
        "+1,+1": "contradiction: coincident eigenvalues",
        "+1,-1": "contradiction: e_n(H) = 0",
        "-1,+1": "contradiction: e_n(H) = 0",
        "-1,-1": "contradiction: coincident eigenvalues",
    }


# -- Cases B and C ---------------------------------------------------------------


@pytest.mark.parametrize("n,r", BC_POINTS)
def test_case_b_chain(n, r):
    rep = run_case_b(n, r)
    assert rep.conclusion == "contradiction: H = 0"
    assert not rep.mismatches
    assert {s.status for s in rep.steps} <= {"MATCH", "CHECK", "ERRATUM"}
    assert [s.label for s in rep.steps if s.status == "ERRATUM"] == ["trace S^2"]
    elim = _step(rep, "eliminant = (2r-1)n^2/(r-2) * H^2")
    assert elim.engine == _h2(eliminant(n, r))


@pytest.mark.parametrize("n,r", BC_POINTS)
def test_case_c_mirrors_b(n, r):
    rep = run_case_c(n, r)
    assert rep.conclusion == "contradiction: H = 0"
    assert not rep.mismatches
    elim = _step(rep, "eliminant = (2r-1)n^2/(r-2) * H^2")
    assert elim.engine == _h2(eliminant(n, n - r + 1))


def test_eliminant_positive_on_grid():
    for n in range(5, 13):
        for r in range(3, n - 1):
            assert eliminant(n, r) > 0


def test_strict_mode_raises_on_mismatch():
    with pytest.raises(ShapeMismatch) as exc:
        run_case_b(8, 4, drop=("lamN1_sq",), strict=True)
    assert exc.value.step.status == "DIFF"


# -- Case D and the resultant -----------------------------------------------------


def test_case_d_steps():
    out = run_case_d(8, 4)
    rep = out.report
    assert rep.conclusion == "contradiction: H constant"
    assert not rep.mismatches
    assert [s.label for s in rep.steps if s.status == "ERRATUM"] == ["Gauss (B,1,B,n)"]
    assert _step(rep, "claim branch ends in a contradiction").note.startswith("passed")
    assert _step(rep, "g from e_1(f)").status == "MATCH"
    assert out.resultant is not None and out.resultant.degree_in_H == 6


@pytest.mark.parametrize("n,r", sorted(RESULTANT_ORACLE))
def test_resultant_against_oracle(n, r):
    lead, at_one, f_lead, g_lead = RESULTANT_ORACLE[(n, r)]
    rr = resultant_report(n, r)
    assert rr.degree_in_H == 6
    assert rr.leading_coeff == Poly.var(MU) ** 5 * lead
    assert rr.leading_is_mu_monomial
    assert rr.res.eval({H: Fraction(1), MU: Fraction(1)}) == at_one
    assert rr.certificate_value == lead
    assert all(c["agree"] for c in rr.numeric_checks) and len(rr.numeric_checks) == 3
    f, g = f_poly(n, r), g_poly(n, r)
    assert f.degree(LAM3) == 3 and g.degree(LAM3) == 2
    assert f.as_univariate(LAM3)[3] == Poly.var(MU) * f_lead
    assert g.as_univariate(LAM3)[2] == Poly.var(MU) * g_lead


def test_g_is_lam3_derivative_of_f():
    for n, r in RESULTANT_ORACLE:
        assert g_poly(n, r) == f_poly(n, r).diff(LAM3)


def test_resultant_json_shape():
    d = resultant_report(7, 4).to_dict()
    assert {"n", "r", "degree_in_H", "coefficients", "certificate_point", "certificate_value"} <= set(d)
    assert d["coefficients"][0] == {"h_power": 6, "poly_in_mu": "4251182290173952*mu^5"}


# -- controls and certification ----------------------------------------------------


def test_negative_controls_without_base_contradiction():
    out = negative_controls(8, 4)
    for key in (
        "A without lam3^2 = mu^2",
        "A without lamN1^2 = mu^2",
        "B without lamN1^2 = mu^2",
        "C without lam3^2 = mu^2",
        "D without w(1,2,A) = 0",
        "D without w(1,2,B) = 0",
    ):
        assert out[key] == "no contradiction", key


def test_certify_small_point_with_vacuous_class():
    summary = certify_theorem([(6, 3)])
    assert summary["failures"] == []
    assert summary["points"][0]["notes"] == ["class At is empty: rows and relations involving At are vacuous"]


def test_certify_empty():
    assert certify_theorem([]) == {"points": [], "failures": []}


def test_metric_rule_does_not_close_the_argument():
    pre = prelude(8, 4, "metric")
    assert pre.steps[0].note == "failed"
    assert pre.lam_fact is None
    for run in (run_case_a, run_case_b, run_case_c):
        assert run(8, 4, convention="metric").conclusion == "no contradiction"
