import random

import pytest

from codazzi_lab.derive import (
    CODAZZI_ROWS,
    InadmissibleParams,
    check_relations,
    compare_reduced_table,
    compare_table,
    enumerate_codazzi,
    first_order_kb,
)
from codazzi_lab.kb import DerivationTrace, evaluate, replay, sample_point

# entries whose engine support is strictly smaller than the displayed one at (8,4)
TIGHTER_ENTRIES = {("1", "A"): (1, 2, 4), ("2", "A"): (1, 2, 4), ("2", "B"): (1, 2, 6, 7)}


@pytest.fixture(scope="module")
def first_order():
    return first_order_kb(8, 4)


def test_table_has_52_rows():
    assert len(CODAZZI_ROWS) == 52
    rows = enumerate_codazzi(8, 4)
    assert len(rows) == 52


def test_every_row_matches_under_antisymmetric_rule():
    rows = compare_table(8, 4)
    assert [r.status for r in rows] == ["MATCH"] * 52
    assert rows[0].engine == "e(1,mu) + e(2,lam)"


def test_metric_rule_disagrees_on_eight_rows():
    diff = [r.id for r in compare_table(8, 4, "metric") if r.status == "DIFF"]
    assert diff == [1, 2, 6, 12, 18, 22, 28, 34]
    for r in compare_table(8, 4, "metric"):
        if r.status == "DIFF":
            assert r.engine and r.printed and r.difference


@pytest.mark.parametrize("n,r", [(7, 4), (10, 6), (6, 3)])
def test_table_is_parameter_independent(n, r):
    rows = compare_table(n, r)
    assert all(row.status in ("MATCH", "VACUOUS") for row in rows)


def test_inadmissible():
    with pytest.raises(InadmissibleParams):
        compare_table(5, 4)


def test_stated_relations_hold(first_order):
    kb, _, _ = first_order
    checks = check_relations(kb)
    assert len(checks) == 12
    for c in checks:
        assert c.holds, (c.label, c.failures)
        assert c.instances > 0
    chain = next(c for c in checks if c.label == "tilde chain")
    assert chain.chain_is_zero is True


def test_reduced_table_outcomes_are_frozen(first_order):
    kb, _, _ = first_order
    cmp = compare_reduced_table(kb)
    assert len(cmp) == 26
    diff = {c.entry: c.engine_support for c in cmp if c.status != "MATCH"}
    assert diff == TIGHTER_ENTRIES
    for c in cmp:
        if c.entry in TIGHTER_ENTRIES:
            assert set(c.engine_support) < set(c.stated_support)


def test_confluence_under_permutation(first_order):
    kb, _, eqs = first_order
    expected = kb.serialize()
    rng = random.Random(11)
    for _ in range(20):
        order = list(range(len(eqs)))
        rng.shuffle(order)
        other, _, _ = first_order_kb(8, 4, order=order)
        assert other.serialize() == expected


def test_soundness_by_evaluation(first_order):
    kb, _, eqs = first_order
    rng = random.Random(5)
    polys = [e.poly for e in eqs]
    for _ in range(50):
        pt = sample_point(kb, polys, rng)
        for p in polys:
            assert evaluate(p, pt.__getitem__) == 0


def test_trace_replays(first_order):
    from codazzi_lab.derive import base_kb, gradient_setup
    from codazzi_lab.frame import Frame

    _, trace, eqs = first_order
    start_trace = DerivationTrace()
    start = gradient_setup(base_kb(Frame(8, 4)), start_trace)
    recorded = DerivationTrace(trace.steps[len(start_trace.steps):])
    fresh = DerivationTrace.from_jsonl(recorded.to_jsonl())
    fresh.steps = [dict(s, step=i + 1) for i, s in enumerate(fresh.steps)]
    assert replay(start, eqs, fresh, "first-order Codazzi system") is not None


def test_metric_rule_leaves_forms_underdetermined():
    kb, _, _ = first_order_kb(8, 4, "metric")
    failed = [c.label for c in check_relations(kb) if not c.holds]
    assert failed == [
        "12-n pairing",
        "12-n vanishing",
        "12-class pairing",
        "AB-1 relation",
        "AB-2 relation",
        "AB-12 vanishing",
    ]
