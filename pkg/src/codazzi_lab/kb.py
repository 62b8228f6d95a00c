"""Knowledge base of established facts and linear saturation.

A fact ``u = num / den`` records the value of one symbol (connection
coefficient, derivative symbol or field).  Denominators are always products
of declared-nonzero polynomials, so deduction never divides by anything the
caller has not explicitly declared nonzero.

Saturation is fraction-free Gaussian elimination: equations are reduced by the
current facts (multiplying through by nonzero denominators), nonzero factors
are stripped, and a symbol is solved for only when its coefficient is a
rational multiple of a product of nonzero members.  The pivot chosen at each
step is the global minimum of ``(non-constant coefficient, symbol key,
equation text)``, which makes the result independent of input order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .frame import CONSTANT_SYMBOLS, Frame, FrameError, cancel_inverses, clear_inverses, inverse, is_deriv, is_inverse
from .poly import Poly, Var

__all__ = [
    "Fact",
    "Equation",
    "NonzeroMember",
    "KnowledgeBase",
    "DerivationTrace",
    "Inconsistent",
    "ZeroPolynomial",
    "RationalValue",
    "saturate",
    "solve_block",
    "install_fact",
    "replay",
]


class Inconsistent(Exception):
    """An equation reduced to a nonzero quantity = 0."""

    def __init__(self, equation: Poly, origin: Tuple[str, ...], message: str = "", trace=None):
        self.equation = equation
        self.origin = origin
        self.trace = trace
        super().__init__(message or f"inconsistent: {equation} = 0 (from {', '.join(origin[:6])})")


class ZeroPolynomial(ValueError):
    pass


class RationalValue(ValueError):
    """Exact reduction needed a fact whose denominator is not constant."""


@dataclass(frozen=True)
class NonzeroMember:
    poly: Poly
    anchor: str


@dataclass(frozen=True)
class Fact:
    subject: Var
    num: Poly
    den: Poly
    anchor: str
    provenance: Tuple[str, ...] = ()
    side_conditions: Tuple[Poly, ...] = ()

    @property
    def value(self) -> Poly:
        """Exact value; a monomial denominator is expressed with inverse symbols."""
        if self.den.is_constant():
            return self.num / self.den.constant_value()
        if not self.den.is_monomial():
            raise RationalValue(f"value of {self.subject.name} has denominator {self.den}")
        (mono, c), = self.den.terms.items()
        out = self.num / c
        for v, e in mono:
            out = out * Poly.var(inverse(v)) ** e
        return cancel_inverses(out)


@dataclass(frozen=True)
class Equation:
    """A polynomial asserted to be zero, with its source labels."""

    poly: Poly
    origin: Tuple[str, ...]
    anchor: str = ""


@dataclass
class DerivationTrace:
    steps: List[dict] = field(default_factory=list)

    def add(self, op: str, inputs, output: str, anchor: str, side_conditions=()) -> None:
        self.steps.append(
            {
                "step": len(self.steps) + 1,
                "op": op,
                "inputs": list(inputs),
                "output": output,
                "anchor": anchor,
                "side_conditions": [str(s) for s in side_conditions],
            }
        )

    def extend(self, other: "DerivationTrace") -> None:
        for s in other.steps:
            self.add(s["op"], s["inputs"], s["output"], s["anchor"], s["side_conditions"])

    def to_jsonl(self) -> str:
        return "".join(json.dumps(s, sort_keys=True) + "\n" for s in self.steps)

    @classmethod
    def from_jsonl(cls, text: str) -> "DerivationTrace":
        return cls([json.loads(line) for line in text.splitlines() if line.strip()])


def _subst_frac(p: Poly, u: Var, num: Poly, den: Poly) -> Tuple[Poly, Poly]:
    """Return (den**d * p|u=num/den, den**d) with d = deg_u p."""
    parts = p.as_univariate(u)
    d = max(parts)
    if d == 0:
        return p, Poly.const(1)
    out = Poly()
    for k, a in parts.items():
        out = out + a * num ** k * den ** (d - k)
    return out, den ** d


def _split_monomial(p: Poly) -> Tuple[Tuple[Var, ...], Poly]:
    """Variables dividing every term of ``p``, and ``p`` with them removed."""
    common = None
    for mono in p.terms:
        vs = {v for v, _ in mono}
        common = vs if common is None else common & vs
    out = p
    for v in sorted(common or ()):
        while True:
            q = out.divide_exact(Poly.var(v))
            if q is None:
                break
            out = q
    return tuple(sorted(common or ())), out


class KnowledgeBase:
    """Immutable set of facts, nonzero declarations and unsolved equations."""

    def __init__(
        self,
        frame: Frame,
        facts: Optional[Mapping[Var, Fact]] = None,
        nonzero: Sequence[NonzeroMember] = (),
        pending: Sequence[Equation] = (),
    ):
        self.frame = frame
        self._facts: Dict[Var, Fact] = dict(facts or {})
        self.nonzero: Tuple[NonzeroMember, ...] = tuple(nonzero)
        self.pending: Tuple[Equation, ...] = tuple(pending)

    # -- queries --------------------------------------------------------
    @property
    def facts(self) -> Mapping[Var, Fact]:
        return dict(self._facts)

    def fact(self, v: Var) -> Optional[Fact]:
        return self._facts.get(v)

    def __contains__(self, v: Var) -> bool:
        return v in self._facts

    def nonzero_polys(self) -> List[Poly]:
        return [m.poly for m in self.nonzero]

    def reduce(self, p: Poly, extra: Optional[Mapping[Var, Poly]] = None) -> Poly:
        """Exact value of ``p`` after substituting every known fact."""
        p = Poly.coerce(p)
        for _ in range(64):
            hit = {v: self._facts[v] for v in p.variables() if v in self._facts}
            ext = {v: extra[v] for v in p.variables() if extra and v in extra and v not in hit}
            dvs = {}
            for w in p.variables():
                d = None if w in hit or w in ext else self._derived(w)
                if d is not None and (d[1].is_constant() or d[1].is_monomial()):
                    dvs[w] = Fact(w, d[0], d[1], "").value
            if not hit and not ext and not dvs:
                return p
            binding = {v: f.value for v, f in hit.items()}
            binding.update(ext)
            binding.update(dvs)
            p = cancel_inverses(p.subs(binding))
        raise RuntimeError("fact substitution did not terminate")

    def reduce_eq(self, p: Poly) -> Poly:
        """``p`` modulo the facts, up to a nonzero factor (for equations)."""
        p = clear_inverses(Poly.coerce(p))
        for _ in range(64):
            hit = sorted(v for v in p.variables() if v in self._facts)
            dvs = {w: d for w, d in ((w, self._derived(w)) for w in p.variables() if w not in self._facts) if d is not None}
            if not hit and not dvs:
                return p
            for v in hit:
                f = self._facts[v]
                if f.den.is_constant():
                    p = p.subs({v: f.value})
                else:
                    p, _ = _subst_frac(p, v, f.num, f.den)
            for w in sorted(dvs):
                num, den = dvs[w]
                p, _ = _subst_frac(clear_inverses(p), w, num, den)
        raise RuntimeError("fact substitution did not terminate")

    def _derived(self, w: Var) -> Optional[Tuple[Poly, Poly]]:
        """For w = e_i(u) with u solved, the value (num, den) of w; None otherwise."""
        if not is_deriv(w) or w.meta[2] not in self._facts:
            return None
        f = self._facts[w.meta[2]]
        i = w.meta[1]
        try:
            d_num = self.frame.differentiate(i, f.num)
            d_den = self.frame.differentiate(i, f.den)
        except FrameError:
            return None
        num = f.den * d_num - f.num * d_den
        den = f.den ** 2
        if den.is_constant():
            return num / den.constant_value(), Poly.const(1)
        return num, den

    def split_nonzero(self, p: Poly) -> Tuple[Tuple[Poly, ...], Poly]:
        """Strip every nonzero-member factor from ``p``; return (factors, rest)."""
        used = []
        if p.is_zero():
            return (), p
        for m in self.nonzero:
            while not p.is_constant():
                q = p.divide_exact(m.poly)
                if q is None:
                    break
                used.append(m.poly)
                p = q
        return tuple(used), p

    def is_nonzero(self, p: Poly) -> bool:
        p = self.reduce_eq(p)
        if p.is_zero():
            return False
        _, rest = self.split_nonzero(p)
        return rest.is_constant()

    # -- construction ---------------------------------------------------
    def declare_nonzero(self, p: Poly, anchor: str) -> "KnowledgeBase":
        p = self.reduce_eq(Poly.coerce(p))
        if p.is_zero():
            raise ZeroPolynomial(f"cannot declare zero nonzero ({anchor})")
        if p.is_constant():
            return self
        mono_vars, rest = _split_monomial(p)
        parts = [Poly.var(v) for v in mono_vars]
        if not rest.is_constant():
            parts.append(rest.monic())
        added = tuple(NonzeroMember(q, anchor) for q in parts if all(m.poly != q for m in self.nonzero))
        if not added:
            return self
        return KnowledgeBase(self.frame, self._facts, self.nonzero + added, self.pending)

    def without(self, subjects: Iterable[Var]) -> "KnowledgeBase":
        drop = set(subjects)
        return KnowledgeBase(
            self.frame, {v: f for v, f in self._facts.items() if v not in drop}, self.nonzero, self.pending
        )

    def with_pending(self, eqs: Iterable[Equation]) -> "KnowledgeBase":
        return KnowledgeBase(self.frame, self._facts, self.nonzero, self.pending + tuple(eqs))

    # -- serialization --------------------------------------------------
    def to_dict(self) -> dict:
        fr = self.frame
        facts = []
        for v in sorted(self._facts):
            f = self._facts[v]
            facts.append(
                {
                    "subject": fr.namer()(v),
                    "num": fr.render(f.num),
                    "den": fr.render(f.den),
                    "anchor": f.anchor,
                    "side_conditions": [fr.render(s) for s in f.side_conditions],
                }
            )
        return {
            "n": fr.n,
            "r": fr.r,
            "convention": fr.convention,
            "facts": facts,
            "nonzero": [fr.render(m.poly) for m in self.nonzero],
            "pending": sorted(fr.render(e.poly) for e in self.pending),
        }

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


class _Builder:
    """Mutable working state of one saturation run."""

    def __init__(self, kb: KnowledgeBase, trace: DerivationTrace):
        self.frame = kb.frame
        self.facts: Dict[Var, Fact] = dict(kb._facts)
        self.nonzero: List[NonzeroMember] = list(kb.nonzero)
        self.trace = trace
        self.eqs: Dict[int, Tuple[Poly, Tuple[str, ...], Tuple[Poly, ...]]] = {}
        self._next = 0
        self._cache: Dict[int, object] = {}

    def view(self) -> KnowledgeBase:
        return KnowledgeBase(self.frame, self.facts, self.nonzero, ())

    def split(self, p: Poly):
        used = []
        pvars = p.variables()
        for m in self.nonzero:
            if not m.poly.variables() <= pvars:
                continue
            while not p.is_constant():
                q = p.divide_exact(m.poly)
                if q is None:
                    break
                used.append(m.poly)
                p = q
        return tuple(used), p

    def reduce_eq(self, p: Poly) -> Poly:
        return KnowledgeBase.reduce_eq(self.view_facts(), p)

    def view_facts(self):
        # lightweight object exposing _facts for KnowledgeBase.reduce_eq
        obj = KnowledgeBase.__new__(KnowledgeBase)
        obj._facts = self.facts
        obj.frame = self.frame
        return obj

    def normalize(self, p: Poly, origin, used=()):
        p = self.reduce_eq(p)
        if p.is_zero():
            return None
        factors, rest = self.split(p)
        if rest.is_constant():
            self.trace.add(
                "contradiction",
                origin,
                f"{self.frame.render(p)} = 0",
                "declared nonzero",
                tuple(used) + factors,
            )
            raise Inconsistent(p, tuple(origin), trace=self.trace)
        return rest.monic(), tuple(used) + factors

    def add(self, p: Poly, origin: Sequence[str], used=()) -> None:
        res = self.normalize(p, origin, used)
        if res is None:
            return
        poly, used = res
        for q, _, _ in self.eqs.values():
            if q == poly:
                return
        self.eqs[self._next] = (poly, tuple(origin), used)
        self._next += 1

    def acceptable(self, c: Poly):
        if c.is_zero():
            return None
        factors, rest = self.split(c)
        if not rest.is_constant():
            return None
        return factors

    def local_pivot(self, eid):
        if eid in self._cache:
            return self._cache[eid]
        p, origin, used = self.eqs[eid]
        best = None
        text = str(p)
        for u in sorted(p.variables()):
            if u in CONSTANT_SYMBOLS:
                continue
            parts = p.as_univariate(u)
            if max(parts) != 1:
                continue
            c = parts[1]
            rank = (0 if c.is_constant() else 1, u.key, text)
            if best is not None and rank >= best[0]:
                continue
            factors = self.acceptable(c)
            if factors is None:
                continue
            best = (rank, eid, u, c, factors)
        self._cache[eid] = best
        return best

    def best_pivot(self):
        best = None
        for eid in self.eqs:
            cand = self.local_pivot(eid)
            if cand is not None and (best is None or cand[0] < best[0]):
                best = cand
        return best

    def install(self, u: Var, num: Poly, den: Poly, anchor: str, origin, side) -> Fact:
        # cancel nonzero factors shared by numerator and denominator
        dfactors, dconst = self.split(den)
        for f in dfactors:
            q = num.divide_exact(f)
            if q is not None:
                num = q
                den = den.divide_exact(f)
        if den.is_constant():
            num = num / den.constant_value()
            den = Poly.const(1)
        else:
            lc = den.leading_coefficient()
            num, den = num / lc, den / lc
        fact = Fact(u, num, den, anchor, tuple(sorted(set(origin))), tuple(side))
        # back-substitute into existing facts
        for v, f in list(self.facts.items()):
            if u in f.num.variables():
                nnum, scale = _subst_frac(f.num, u, num, den)
                self.facts[v] = Fact(v, nnum, f.den * scale, f.anchor, f.provenance, f.side_conditions)
                self.facts[v] = self._cancel(self.facts[v])
        self.facts[u] = fact
        # nonzero members stay reduced
        before = [m.poly for m in self.nonzero]
        new_nonzero = []
        for m in self.nonzero:
            if u in m.poly.variables():
                p, _ = _subst_frac(m.poly, u, num, den)
                if p.is_zero():
                    self.trace.add("contradiction", origin, f"{m.poly} reduces to 0", m.anchor)
                    raise Inconsistent(p, tuple(origin), f"declared-nonzero {m.poly} reduced to 0", self.trace)
                if p.is_constant():
                    continue
                # every factor of a nonzero polynomial is nonzero
                mono_vars, rest = _split_monomial(p)
                for v in mono_vars:
                    new_nonzero.append(NonzeroMember(Poly.var(v), m.anchor))
                if not rest.is_constant():
                    new_nonzero.append(NonzeroMember(rest.monic(), m.anchor))
            else:
                new_nonzero.append(m)
        self.nonzero = []
        for m in new_nonzero:
            if self.nonzero:
                _, rest = self.split(m.poly)
                if rest.is_constant():
                    continue
            if all(x.poly != m.poly for x in self.nonzero):
                self.nonzero.append(m)
        if [m.poly for m in self.nonzero] != before:
            self._cache.clear()
        return fact

    def _cancel(self, f: Fact) -> Fact:
        num, den = f.num, f.den
        if num.is_zero():
            return Fact(f.subject, num, Poly.const(1), f.anchor, f.provenance, f.side_conditions)
        dfactors, _ = self.split(den)
        for m in dfactors:
            q = num.divide_exact(m)
            if q is not None:
                num = q
                den = den.divide_exact(m)
        if den.is_constant():
            num, den = num / den.constant_value(), Poly.const(1)
        else:
            lc = den.leading_coefficient()
            num, den = num / lc, den / lc
        return Fact(f.subject, num, den, f.anchor, f.provenance, f.side_conditions)

    def derivative_consequences(self, u: Var, origin) -> None:
        """Installing u = v forces e_i(u) = e_i(v) for every e_i(u) in use."""
        targets = set()
        for v, f in self.facts.items():
            for w in (v,) + tuple(f.num.variables()) + tuple(f.den.variables()):
                if is_deriv(w) and w.meta[2] == u:
                    targets.add(w)
        for p, _, _ in self.eqs.values():
            for w in p.variables():
                if is_deriv(w) and w.meta[2] == u:
                    targets.add(w)
        fu = self.facts[u]
        for w in sorted(targets):
            i = w.meta[1]
            # e_i(num/den) = (den e_i(num) - num e_i(den)) / den^2
            d_num = self.frame.differentiate(i, fu.num)
            d_den = self.frame.differentiate(i, fu.den)
            eq = fu.den ** 2 * Poly.var(w) - (fu.den * d_num - fu.num * d_den)
            self.add(eq, (f"d{i}[{u.name}]",) + tuple(origin))

    def run(self, anchor: str) -> None:
        while True:
            best = self.best_pivot()
            if best is None:
                return
            _, eid, u, c, factors = best
            p, origin, used = self.eqs.pop(eid)
            self._cache.pop(eid, None)
            rest = p - c * Poly.var(u)
            fact = self.install(u, -rest, c, anchor, origin, used + factors)
            self.trace.add(
                "pivot",
                origin,
                f"{self.frame.render(Poly.var(u))} = {self._render_value(fact)}",
                anchor,
                used + factors,
            )
            # re-reduce affected equations
            for k in list(self.eqs):
                q, o, us = self.eqs[k]
                if u in q.variables():
                    del self.eqs[k]
                    self._cache.pop(k, None)
                    self.add(q, o + (f"fact:{u.name}",), us)
            self.derivative_consequences(u, origin)

    def _render_value(self, f: Fact) -> str:
        r = self.frame.render
        if f.den.is_constant():
            return r(f.num)
        return f"({r(f.num)}) / ({r(f.den)})"

    def freeze(self) -> KnowledgeBase:
        pending = [Equation(p, o) for _, (p, o, _) in sorted(self.eqs.items(), key=lambda t: str(t[1][0]))]
        return KnowledgeBase(self.frame, self.facts, self.nonzero, pending)


def saturate(
    kb: KnowledgeBase,
    equations: Iterable,
    anchor: str = "",
    trace: Optional[DerivationTrace] = None,
    include_pending: bool = True,
) -> Tuple[KnowledgeBase, DerivationTrace]:
    """Solve ``equations`` (polynomials = 0) against ``kb`` to a fixed point.

    Each item is an :class:`Equation` or a ``(poly, label)`` pair.  Raises
    :class:`Inconsistent` when an equation reduces to a nonzero quantity.
    """
    trace = trace if trace is not None else DerivationTrace()
    b = _Builder(kb, trace)
    items = list(kb.pending) if include_pending else []
    for e in equations:
        if isinstance(e, Equation):
            items.append(e)
        else:
            p, label = e
            items.append(Equation(Poly.coerce(p), (label,), label))
    for e in items:
        b.add(e.poly, e.origin)
    b.run(anchor)
    return b.freeze(), trace


def solve_block(
    kb: KnowledgeBase,
    equations: Sequence[Poly],
    unknowns: Sequence[Var],
    anchor: str,
    trace: Optional[DerivationTrace] = None,
) -> Tuple[KnowledgeBase, DerivationTrace]:
    """Solve k equations linear in k unknowns by Cramer's rule.

    The determinant of the coefficient matrix must be a rational multiple of a
    product of declared-nonzero polynomials.
    """
    from .poly import PolyMatrix, determinant_fraction_free

    trace = trace if trace is not None else DerivationTrace()
    b = _Builder(kb, trace)
    rows, rhs = [], []
    for eq in equations:
        eq = kb.reduce_eq(eq)
        row = []
        rest = eq
        for u in unknowns:
            parts = eq.as_univariate(u)
            if max(parts) > 1:
                raise ValueError(f"equation is not linear in {u.name}")
            c = parts.get(1, Poly())
            if any(v in c.variables() for v in unknowns):
                raise ValueError("equations are not linear in the block unknowns")
            row.append(c)
            rest = rest - c * Poly.var(u)
        rows.append(row)
        rhs.append(-rest)
    k = len(unknowns)
    if len(rows) != k:
        raise ValueError("solve_block needs as many equations as unknowns")
    det = determinant_fraction_free(PolyMatrix(k, k, [x for row in rows for x in row]))
    factors = b.acceptable(det)
    if factors is None:
        raise ValueError(f"block determinant {kb.frame.render(det)} is not declared nonzero")
    labels = tuple(f"block:{anchor}:{i}" for i in range(k))
    for i, u in enumerate(unknowns):
        cols = [[rhs[a] if c == i else rows[a][c] for c in range(k)] for a in range(k)]
        num = determinant_fraction_free(PolyMatrix(k, k, [x for row in cols for x in row]))
        fact = b.install(u, num, det, anchor, labels, factors)
        trace.add("solve", labels, f"{kb.frame.render(Poly.var(u))} = {b._render_value(fact)}", anchor, factors)
    for u in unknowns:
        for key in list(b.eqs):
            q, o, us = b.eqs[key]
            if u in q.variables():
                del b.eqs[key]
                b._cache.pop(key, None)
                b.add(q, o, us)
    for e in kb.pending:
        b.add(e.poly, e.origin)
    for u in unknowns:
        b.derivative_consequences(u, labels)
    b.run(anchor)
    return b.freeze(), trace


def install_fact(
    kb: KnowledgeBase, subject: Var, value: Poly, anchor: str, trace: Optional[DerivationTrace] = None
) -> Tuple[KnowledgeBase, DerivationTrace]:
    """Assert ``subject = value`` (a hypothesis) and re-saturate the consequences."""
    return saturate(kb, [Equation(Poly.var(subject) - value, (anchor,), anchor)], anchor, trace)


def replay(kb: KnowledgeBase, equations: Iterable, trace: DerivationTrace, anchor: str = "") -> KnowledgeBase:
    """Re-run a saturation and check it reproduces every recorded step."""
    fresh = DerivationTrace()
    try:
        out, fresh = saturate(kb, equations, anchor, fresh)
    except Inconsistent as exc:
        fresh = exc.trace
        out = None
    if [s for s in fresh.steps] != [s for s in trace.steps]:
        raise AssertionError("replayed trace differs from the recorded one")
    return out


# -- evaluation ---------------------------------------------------------


class _Resample(Exception):
    pass


def sample_point(kb: KnowledgeBase, polys: Iterable[Poly], rng, tries: int = 200) -> Dict[Var, Fraction]:
    """A random rational point satisfying every fact of ``kb``.

    Free variables get random rationals; fact subjects, inverse symbols and
    derivatives of fact subjects take the values the facts force.  Points where
    a denominator or a declared-nonzero polynomial vanishes are rejected.
    """
    polys = list(polys)
    for _ in range(tries):
        point: Dict[Var, Fraction] = {}

        def value(v: Var) -> Fraction:
            if v in point:
                return point[v]
            if v in kb._facts:
                f = kb._facts[v]
                val = _ratio(evaluate(f.num, value), evaluate(f.den, value))
            elif is_inverse(v):
                val = _ratio(Fraction(1), value(v.meta[1]))
            else:
                d = kb._derived(v)
                if d is not None:
                    val = _ratio(evaluate(d[0], value), evaluate(d[1], value))
                else:
                    val = Fraction(rng.randint(-30, 30), rng.randint(1, 7))
            point[v] = val
            return val

        try:
            for m in kb.nonzero:
                if evaluate(m.poly, value) == 0:
                    raise _Resample
            for p in polys:
                evaluate(p, value)
        except _Resample:
            continue
        return point
    raise RuntimeError("could not find a point off the excluded set")


def _ratio(a: Fraction, b: Fraction) -> Fraction:
    if b == 0:
        raise _Resample
    return a / b


def evaluate(p: Poly, value) -> Fraction:
    """Evaluate ``p`` with ``value(var)`` supplying each variable."""
    return p.eval({v: value(v) for v in p.variables()})
