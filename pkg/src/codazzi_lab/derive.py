"""Codazzi system, linear deduction of the vanishing connection forms, and
the reduced covariant-derivative table.

The tabulated Codazzi rows are indexed 1..52 by class triple ``(X, Y, Z)``.
Each row carries its printed reference form; :func:`compare_table` checks the
engine's residual against it up to a rational factor and declared-nonzero
factors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .expr import default_labels, parse
from .frame import (
    LAM,
    LAM3,
    LAMN1,
    MU,
    Frame,
    FrameError,
    H,
    IndexClass,
    LinExpr,
    clear_inverses,
    is_conn,
)
from .kb import DerivationTrace, Equation, Inconsistent, KnowledgeBase, saturate
from .poly import Poly

__all__ = [
    "InadmissibleParams",
    "RowSpec",
    "CodazziRow",
    "CODAZZI_ROWS",
    "enumerate_codazzi",
    "compare_table",
    "RowComparison",
    "base_kb",
    "gradient_setup",
    "first_order_equations",
    "first_order_kb",
    "RELATIONS",
    "check_relations",
    "REDUCED_ENTRIES",
    "reduced_connection_table",
    "compare_reduced_table",
    "normalize",
    "same_up_to_factor",
    "declare_nonzero",
]


class InadmissibleParams(ValueError):
    pass


@dataclass(frozen=True)
class RowSpec:
    id: int
    triple: Tuple[str, str, str]
    printed: str


def _rows(text: str) -> Tuple[RowSpec, ...]:
    out = []
    for line in text.strip().splitlines():
        num, triple, text = (s.strip() for s in line.split("|"))
        out.append(RowSpec(int(num), tuple(triple.split()), text))
    return tuple(out)


# printed reference forms, w(i,j,k) = coefficient of e_k in nabla_{e_i} e_j
CODAZZI_ROWS = _rows(
    """
1  | 1 2 1    | e(2,lam) + e(1,mu) = 0
2  | 1 2 2    | e(1,lam) - e(2,mu) = 0
3  | 1 2 A    | [lam - lam3](w(1,2,A) - w(2,1,A)) = mu(w(2,2,A) + w(1,1,A))
4  | 1 2 B    | [lam - lamN1](w(1,2,B) - w(2,1,B)) = mu(w(2,2,B) + w(1,1,B))
5  | 1 2 n    | [lam + n*H/2](w(1,2,n) - w(2,1,n)) = mu(w(2,2,n) + w(1,1,n))
6  | 1 A 1    | e(A,lam) = [lam3 - lam]w(1,A,1) + mu*w(1,A,2)
7  | 1 A 2    | e(A,mu) = [lam3 - lam]w(1,A,2) - mu*w(1,A,1)
8  | 1 A A    | e(1,lam3) = [lam - lam3]w(A,1,A) + mu*w(A,2,A)
9  | 1 A At   | [lam - lam3]w(A,1,At) + mu*w(A,2,At) = 0
10 | 1 A B    | [lam3 - lamN1]w(1,A,B) = [lam - lamN1]w(A,1,B) + mu*w(A,2,B)
11 | 1 A n    | [lam3 + n*H/2]w(1,A,n) = [lam + n*H/2]w(A,1,n) + mu*w(A,2,n)
12 | 1 B 1    | e(B,lam) = [lamN1 - lam]w(1,B,1) + mu*w(1,B,2)
13 | 1 B 2    | e(B,mu) = [lamN1 - lam]w(1,B,2) - mu*w(1,B,1)
14 | 1 B A    | [lamN1 - lam3]w(1,B,A) = [lam - lam3]w(B,1,A) + mu*w(B,2,A)
15 | 1 B B    | e(1,lamN1) = [lam - lamN1]w(B,1,B) + mu*w(B,2,B)
16 | 1 B Bt   | [lam - lamN1]w(B,1,Bt) + mu*w(B,2,Bt) = 0
17 | 1 B n    | [lamN1 + n*H/2]w(1,B,n) = [lam + n*H/2]w(B,1,n) + mu*w(B,2,n)
18 | 1 n 1    | -(lam + n*H/2)w(1,n,1) + mu*w(1,n,2) = e(n,lam)
19 | 1 n 2    | -(lam + n*H/2)w(1,n,2) - mu*w(1,n,1) = e(n,mu)
20 | 1 n n    | (lam + n*H/2)w(n,1,n) + mu*w(n,2,n) = 0
21 | 2 A 1    | -e(A,mu) = [lam3 - lam]w(2,A,1) + mu*w(2,A,2)
22 | 2 A 2    | e(A,lam) = [lam3 - lam]w(2,A,2) - mu*w(2,A,1)
23 | 2 A A    | e(2,lam3) = [lam - lam3]w(A,2,A) - mu*w(A,1,A)
24 | 2 A At   | [lam - lam3]w(A,2,At) - mu*w(A,1,At) = 0
25 | 2 A B    | (lam3 - lamN1)w(2,A,B) = [lam - lamN1]w(A,2,B) - mu*w(A,1,B)
26 | 2 A n    | [lam3 + n*H/2]w(2,A,n) = [lam + n*H/2]w(A,2,n) - mu*w(A,1,n)
27 | 2 B 1    | -e(B,mu) = [lamN1 - lam]w(2,B,1) + mu*w(2,B,2)
28 | 2 B 2    | e(B,lam) = [lamN1 - lam]w(2,B,2) - mu*w(2,B,1)
29 | 2 B A    | (lamN1 - lam3)w(2,B,A) = [lam - lam3]w(B,2,A) - mu*w(B,1,A)
30 | 2 B B    | e(2,lamN1) = [lam - lamN1]w(B,2,B) - mu*w(B,1,B)
31 | 2 B Bt   | [lam - lamN1]w(B,2,Bt) - mu*w(B,1,Bt) = 0
32 | 2 B n    | [lamN1 + n*H/2]w(2,B,n) = [lam + n*H/2]w(B,2,n) - mu*w(B,1,n)
33 | 2 n 1    | -(lam + n*H/2)w(2,n,1) + mu*w(2,n,2) = -e(n,mu)
34 | 2 n 2    | -(lam + n*H/2)w(2,n,2) - mu*w(2,n,1) = e(n,lam)
35 | 2 n n    | (lam + n*H/2)w(n,2,n) - mu*w(n,1,n) = 0
36 | A B 1    | (lamN1 - lam)w(A,B,1) + mu*w(A,B,2) = [lam3 - lam]w(B,A,1) + mu*w(B,A,2)
37 | A B 2    | (lamN1 - lam)w(A,B,2) - mu*w(A,B,1) = [lam3 - lam]w(B,A,2) - mu*w(B,A,1)
38 | A B n    | [lamN1 + n*H/2]w(A,B,n) = [lam3 + n*H/2]w(B,A,n)
39 | A B Bt   | w(B,A,Bt) = 0
40 | A B At   | w(A,B,At) = 0
41 | A n 1    | -(lam + n*H/2)w(A,n,1) + mu*w(A,n,2) = [lam3 - lam]w(n,A,1) + mu*w(n,A,2)
42 | A n 2    | -(lam + n*H/2)w(A,n,2) - mu*w(A,n,1) = [lam3 - lam]w(n,A,2) - mu*w(n,A,1)
43 | A n A    | e(n,lam3) = -[n*H/2 + lam3]w(A,n,A)
44 | A n B    | -[lamN1 + n*H/2]w(A,n,B) = [lam3 - lamN1]w(n,A,B)
45 | A n At   | w(A,n,At) = 0
46 | A n n    | w(n,A,n) = 0
47 | B n 1    | -(lam + n*H/2)w(B,n,1) + mu*w(B,n,2) = [lamN1 - lam]w(n,B,1) + mu*w(n,B,2)
48 | B n 2    | -(lam + n*H/2)w(B,n,2) - mu*w(B,n,1) = [lamN1 - lam]w(n,B,2) - mu*w(n,B,1)
49 | B n A    | -[lam3 + n*H/2]w(B,n,A) = [lamN1 - lam3]w(n,B,A)
50 | B n B    | e(n,lamN1) = -[n*H/2 + lamN1]w(B,n,B)
51 | B n Bt   | w(B,n,Bt) = 0
52 | B n n    | w(n,B,n) = 0
"""
)


def check_params(n: int, r: int) -> None:
    if not isinstance(n, int) or not isinstance(r, int):
        raise InadmissibleParams("n and r must be integers")
    if n < 5:
        raise InadmissibleParams(f"n must be >= 5 (got {n})")
    if not 3 <= r <= n - 2:
        raise InadmissibleParams(f"r must satisfy 3 <= r <= n-2 (got n={n}, r={r})")


def _frame(n: int, r: int, convention: str) -> Frame:
    check_params(n, r)
    return Frame(n, r, convention)


# -- normalization -----------------------------------------------------


def normalize(p: Poly, kb: Optional[KnowledgeBase] = None) -> Poly:
    """Canonical form of an equation ``p = 0``: nonzero factors stripped, monic."""
    p = clear_inverses(p)
    if kb is not None:
        p = kb.reduce_eq(p)
        _, p = kb.split_nonzero(p)
    if p.is_zero():
        return p
    return p.monic()


def same_up_to_factor(a: Poly, b: Poly, kb: Optional[KnowledgeBase] = None) -> bool:
    return normalize(a, kb) == normalize(b, kb)


# -- knowledge-base setup ---------------------------------------------


def declare_nonzero(kb: KnowledgeBase, p: Poly, anchor: str) -> KnowledgeBase:
    return kb.declare_nonzero(p, anchor)


def base_kb(frame: Frame) -> KnowledgeBase:
    """Fresh knowledge base with the genericity conditions declared."""
    mu, h = Poly.var(MU), Poly.var(H)
    lam, l3, ln1, lam_n = Poly.var(LAM), Poly.var(LAM3), Poly.var(LAMN1), frame.lam_n
    kb = KnowledgeBase(frame)
    declared = [
        (mu, "complex eigenvalue pair: mu != 0"),
        (h, "H != 0"),
        (l3 - ln1, "distinct eigenvalues: lam3 != lamN1"),
        (lam_n - l3, "distinct eigenvalues: lamn != lam3"),
        (lam_n - ln1, "distinct eigenvalues: lamn != lamN1"),
        ((lam - l3) ** 2 + mu ** 2, "real lam3 differs from lam + i mu since mu != 0"),
        ((lam - ln1) ** 2 + mu ** 2, "real lamN1 differs from lam + i mu since mu != 0"),
        ((lam - lam_n) ** 2 + mu ** 2, "real lamn differs from lam + i mu since mu != 0"),
    ]
    for p, anchor in declared:
        kb = kb.declare_nonzero(p, anchor)
    return kb


def gradient_setup(kb: KnowledgeBase, trace: Optional[DerivationTrace] = None) -> KnowledgeBase:
    """grad H along e_n: e_i(H) = 0 for i != n, e_n(H) != 0, and the e_n-derivatives
    of the simple eigenvalues, e_n(lam_a) = (lamn - lam_a) w(a,n,a)."""
    fr = kb.frame
    kb = kb.declare_nonzero(fr.d(fr.n, H), "grad H != 0 along e_n")
    eqs: List[Equation] = []
    for i in range(1, fr.n):
        eqs.append(Equation(fr.d(i, H), (f"grad:e{i}(H)",), "grad H along e_n"))
    for a in range(3, fr.n):
        lam_a = fr.shape_entry(a, a)
        p = fr.differentiate(fr.n, lam_a) - (fr.lam_n - lam_a) * fr.conn(a, fr.n, a)
        eqs.append(Equation(p, (f"grad:e{fr.n}(lam_{a})",), "eigenvalue derivative along e_n"))
    kb, _ = saturate(kb, eqs, "gradient setup", trace)
    return kb


# -- Codazzi rows --------------------------------------------------------


@dataclass(frozen=True)
class CodazziRow:
    id: int
    triple: Tuple[str, str, str]
    concrete: Optional[Tuple[int, int, int]]
    equation: Optional[LinExpr]
    vacuous: bool
    printed: str


def _row_indices(frame: Frame, triple) -> Optional[Tuple[int, int, int]]:
    try:
        return tuple(frame.idx(t) for t in triple)
    except FrameError:
        return None


def enumerate_codazzi(n: int, r: int, convention: str = "antisymmetric", kb: Optional[KnowledgeBase] = None) -> List[CodazziRow]:
    """The 52 tabulated Codazzi rows, reduced by the gradient conditions."""
    fr = _frame(n, r, convention) if kb is None else kb.frame
    if kb is None:
        kb = gradient_setup(base_kb(fr))
    rows = []
    for tmpl in CODAZZI_ROWS:
        idx = _row_indices(fr, tmpl.triple)
        if idx is None:
            rows.append(CodazziRow(tmpl.id, tmpl.triple, None, None, True, tmpl.printed))
            continue
        p = normalize(fr.codazzi_residual(*idx, kb=kb), kb)
        rows.append(CodazziRow(tmpl.id, tmpl.triple, idx, LinExpr.from_poly(p), False, tmpl.printed))
    return rows


@dataclass(frozen=True)
class RowComparison:
    id: int
    triple: Tuple[str, str, str]
    status: str  # MATCH, DIFF or VACUOUS
    engine: str
    printed: str
    difference: str = ""


def compare_table(n: int, r: int, convention: str = "antisymmetric") -> List[RowComparison]:
    """Compare every row with its printed form (up to nonzero factors)."""
    fr = _frame(n, r, convention)
    kb = gradient_setup(base_kb(fr))
    out = []
    for row in enumerate_codazzi(n, r, convention, kb):
        if row.vacuous:
            out.append(RowComparison(row.id, row.triple, "VACUOUS", "", row.printed))
            continue
        eng = row.equation.to_poly()
        ref = normalize(parse(row.printed, fr), kb)
        if eng == ref:
            out.append(RowComparison(row.id, row.triple, "MATCH", fr.render(eng), fr.render(ref)))
        else:
            out.append(
                RowComparison(row.id, row.triple, "DIFF", fr.render(eng), fr.render(ref), fr.render(eng - ref))
            )
    return out


# -- the full first-order system ----------------------------------------


def _class_instances(frame: Frame, triple: Sequence[str]) -> List[Dict[str, int]]:
    """All concrete bindings of the class labels in ``triple`` (distinct tilde members)."""
    labels = sorted({t for t in triple if t in ("A", "At", "B", "Bt")})
    pools = {
        "A": list(frame.a_class),
        "At": list(frame.a_class),
        "B": list(frame.b_class),
        "Bt": list(frame.b_class),
    }
    out = []
    for combo in itertools.product(*(pools[l] for l in labels)):
        env = dict(zip(labels, combo))
        if "A" in env and "At" in env and env["A"] == env["At"]:
            continue
        if "B" in env and "Bt" in env and env["B"] == env["Bt"]:
            continue
        out.append(env)
    return out


def first_order_equations(kb: KnowledgeBase) -> List[Equation]:
    """Every concrete instance of the tabulated rows plus the bracket relations
    [e_i, e_j] H = 0 for i, j != n, reduced by the gradient facts in ``kb``."""
    fr = kb.frame
    fixed = {"1": 1, "2": 2, "n": fr.n}
    eqs: List[Equation] = []
    seen = set()
    for tmpl in CODAZZI_ROWS:
        for env in _class_instances(fr, tmpl.triple):
            lab = dict(fixed, **env)
            x, y, z = (lab[t] for t in tmpl.triple)
            if (x, y, z) in seen:
                continue
            seen.add((x, y, z))
            p = fr.codazzi_residual(x, y, z, kb)
            if not p.is_zero():
                eqs.append(Equation(p, (f"T{tmpl.id}[{x},{y},{z}]",), f"Codazzi row {tmpl.id}"))
    for i in range(1, fr.n):
        for j in range(i + 1, fr.n):
            p = fr.bracket_residual(i, j, Poly.var(H), kb)
            if not p.is_zero():
                eqs.append(Equation(p, (f"bracket[{i},{j}]",), "[e_i,e_j]H"))
    return eqs


def first_order_kb(
    n: int, r: int, convention: str = "antisymmetric", trace: Optional[DerivationTrace] = None, order=None
) -> Tuple[KnowledgeBase, DerivationTrace, List[Equation]]:
    """Saturate the first-order system; returns (kb, trace, source equations)."""
    fr = _frame(n, r, convention)
    trace = trace if trace is not None else DerivationTrace()
    kb = gradient_setup(base_kb(fr), trace)
    eqs = first_order_equations(kb)
    if order is not None:
        eqs = [eqs[i] for i in order]
    kb, trace = saturate(kb, eqs, "first-order Codazzi system", trace)
    return kb, trace, eqs


# -- stated relations ---------------------------------------------------


@dataclass(frozen=True)
class Relation:
    label: str
    kind: str  # "zero": every member vanishes; "equal": listed equations hold
    items: Tuple[str, ...]


RELATIONS: Tuple[Relation, ...] = (
    Relation("AB-n mixed", "equal", ("w(A,B,n) = 0", "w(B,A,n) = 0", "w(A,n,B) = 0", "w(n,B,A) = 0", "w(n,A,B) = 0", "w(1,1,n) = -w(2,2,n)")),
    Relation("12-n pairing", "equal", ("w(2,2,n) = w(1,1,n)", "w(1,2,n) = -w(2,1,n)")),
    Relation("12-n vanishing", "zero", ("w(2,2,n)", "w(1,1,n)", "w(1,2,n)", "w(2,1,n)", "w(2,n,1)", "w(1,n,2)", "w(2,n,2)", "w(1,n,1)")),
    Relation("12-class pairing", "equal", ("w(2,2,A) = w(1,1,A)", "w(1,2,A) = -w(2,1,A)", "w(2,2,B) = w(1,1,B)", "w(1,2,B) = -w(2,1,B)")),
    Relation("n-n vanishing", "zero", ("w(n,1,n)", "w(n,2,n)", "w(n,n,1)", "w(n,n,2)", "w(n,n,A)", "w(n,n,B)")),
    Relation("tilde-cross vanishing", "zero", ("w(B,Bt,A)", "w(A,At,B)")),
    Relation(
        "12-class-n vanishing",
        "zero",
        (
            "w(1,A,n)", "w(2,A,n)", "w(A,1,n)", "w(A,2,n)", "w(1,n,A)", "w(2,n,A)", "w(A,n,1)", "w(A,n,2)",
            "w(1,B,n)", "w(2,B,n)", "w(B,1,n)", "w(B,2,n)", "w(1,n,B)", "w(2,n,B)", "w(B,n,1)", "w(B,n,2)",
        ),
    ),
    Relation(
        "tilde chain",
        "chain",
        ("w(A,1,At)", "w(A,2,At)", "w(B,1,Bt)", "w(B,2,Bt)", "w(A,At,1)", "w(A,At,2)", "w(B,Bt,2)", "w(A,At,n)", "w(B,Bt,n)"),
    ),
    Relation("n-class-12 vanishing", "zero", ("w(n,A,1)", "w(n,A,2)", "w(n,1,A)", "w(n,2,A)", "w(n,B,1)", "w(n,B,2)", "w(n,1,B)", "w(n,2,B)")),
    Relation("AB-1 relation", "equal", ("(lam3 - lam)w(B,A,1) = (lamN1 - lam)w(A,B,1)", "w(A,B,2) = w(B,A,2)")),
    Relation("AB-2 relation", "equal", ("(lam3 - lam)w(B,A,2) = (lamN1 - lam)w(A,B,2)", "w(A,B,1) = w(B,A,1)")),
    Relation("AB-12 vanishing", "zero", ("w(B,A,1)", "w(A,B,1)", "w(A,B,2)", "w(B,A,2)", "w(B,1,A)", "w(A,1,B)", "w(A,2,B)", "w(B,2,A)")),
)


@dataclass
class RelationCheck:
    label: str
    holds: bool
    instances: int
    failures: List[str] = field(default_factory=list)
    chain_is_zero: Optional[bool] = None


def _labels_in(text: str) -> Tuple[str, ...]:
    import re

    found = set()
    for args in re.findall(r"w\(([^)]*)\)", text):
        for a in args.split(","):
            a = a.strip()
            if a in ("A", "At", "B", "Bt"):
                found.add(a)
    return tuple(sorted(found))


def check_relations(kb: KnowledgeBase, relations: Iterable[Relation] = RELATIONS) -> List[RelationCheck]:
    """Check each stated relation on every concrete index instance."""
    fr = kb.frame
    fixed = {"1": 1, "2": 2, "n": fr.n}
    out = []
    for rel in relations:
        if rel.kind == "chain":
            eqs = [f"{a} = {b}" for a, b in zip(rel.items, rel.items[1:])]
            zeros = list(rel.items)
        elif rel.kind == "zero":
            eqs = [f"{a} = 0" for a in rel.items]
            zeros = []
        else:
            eqs = list(rel.items)
            zeros = []
        check = RelationCheck(rel.label, True, 0)
        for text in eqs:
            for env in _class_instances(fr, _labels_in(text)):
                p = parse(text, fr, dict(fixed, **env))
                check.instances += 1
                if not kb.reduce_eq(p).is_zero():
                    check.holds = False
                    check.failures.append(f"{text} at {env}")
        if zeros:
            check.chain_is_zero = all(
                kb.reduce_eq(parse(t, fr, dict(fixed, **env))).is_zero()
                for t in zeros
                for env in _class_instances(fr, _labels_in(t))
            )
        out.append(check)
    return out


# -- reduced connection table ------------------------------------------

# (i, j, excluded p) for each displayed sum nabla_{e_i} e_j = sum_{p not excluded} w(i,j,p) e_p;
# None marks an entry displayed as a single term or as 0 (given by ``only``)
REDUCED_ENTRIES: Tuple[Tuple[str, str, Tuple[str, ...], Optional[Tuple[str, ...]]], ...] = (
    ("1", "1", ("1", "n"), None),
    ("1", "2", ("2", "n"), None),
    ("1", "A", ("A", "n"), None),
    ("1", "n", (), ()),
    ("2", "1", ("1", "n"), None),
    ("2", "2", ("2", "n"), None),
    ("2", "A", ("A", "n"), None),
    ("2", "n", (), ()),
    ("A", "1", ("1", "At", "B", "n"), None),
    ("A", "2", ("2", "At", "B", "n"), None),
    ("A", "A", ("A",), None),
    ("A", "At", ("1", "2", "At", "B", "n"), None),
    ("A", "B", ("1", "2", "At", "B", "n"), None),
    ("A", "n", ("1", "2", "At", "B", "n"), None),
    ("B", "1", ("1", "A", "Bt", "n"), None),
    ("B", "2", ("2", "A", "Bt", "n"), None),
    ("B", "A", ("1", "2", "A", "Bt", "n"), None),
    ("B", "Bt", ("1", "2", "A", "Bt", "n"), None),
    ("B", "B", ("B",), None),
    ("B", "n", ("1", "2", "A", "Bt", "n"), None),
    ("n", "1", (), ("2",)),
    ("n", "2", (), ("1",)),
    ("n", "A", ("1", "2", "A", "B", "n"), None),
    ("n", "B", ("1", "2", "A", "B", "n"), None),
    ("n", "n", (), ()),
    ("2", "B", ("B", "n"), None),
)


def _expand(frame: Frame, label: str, bound: Mapping[str, int]) -> set:
    if label == "1":
        return {1}
    if label == "2":
        return {2}
    if label == "n":
        return {frame.n}
    base = label.rstrip("t")
    cls = set(frame.a_class if base == "A" else frame.b_class)
    if label in bound:
        return {bound[label]}
    if label == base:
        return cls
    return cls - ({bound[base]} if base in bound else set())


def reduced_connection_table(kb: KnowledgeBase) -> Dict[Tuple[str, str], Dict[int, Poly]]:
    """Reduced nabla_{e_i} e_j for every displayed entry, at the representative indices.

    Components are reduced up to a nonzero factor, so only their support is exact.
    """
    fr = kb.frame
    out = {}
    for i, j, _, _ in REDUCED_ENTRIES:
        try:
            ii, jj = fr.idx(i), fr.idx(j)
        except FrameError:
            continue
        comps = {k: kb.reduce_eq(fr.conn(ii, jj, k)) for k in fr.indices}
        out[(i, j)] = {k: c for k, c in comps.items() if not c.is_zero()}
    return out


@dataclass(frozen=True)
class ReducedEntryComparison:
    entry: Tuple[str, str]
    status: str  # MATCH, DIFF, VACUOUS
    engine_support: Tuple[int, ...]
    stated_support: Tuple[int, ...]


def compare_reduced_table(kb: KnowledgeBase) -> List[ReducedEntryComparison]:
    """Compare the surviving index set of each entry with the displayed one."""
    fr = kb.frame
    table = reduced_connection_table(kb)
    out = []
    for i, j, excl, only in REDUCED_ENTRIES:
        if (i, j) not in table:
            out.append(ReducedEntryComparison((i, j), "VACUOUS", (), ()))
            continue
        bound = {i: fr.idx(i), j: fr.idx(j)}
        if only is not None:
            stated = set()
            for l in only:
                stated |= _expand(fr, l, bound)
        else:
            stated = set(fr.indices)
            for l in excl:
                stated -= _expand(fr, l, bound)
        engine = set(table[(i, j)])
        out.append(
            ReducedEntryComparison(
                (i, j), "MATCH" if engine == stated else "DIFF", tuple(sorted(engine)), tuple(sorted(stated))
            )
        )
    return out
