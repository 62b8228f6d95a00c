"""Exact sparse multivariate polynomials over the rationals.

Polynomials are immutable maps from monomials to :class:`fractions.Fraction`
coefficients.  Variables carry a structural sort key, so the variable order
(and with it the graded lexicographic monomial order) is fixed independently
of the order in which variables happen to be created.

The module also provides Sylvester matrices, a fraction-free (Bareiss)
determinant over the polynomial ring, and resultants.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Callable, Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

__all__ = [
    "Var",
    "Poly",
    "PolyMatrix",
    "PolyError",
    "BothZero",
    "NotSquare",
    "symbols",
    "coefficients_in",
    "substitute",
    "sylvester_matrix",
    "determinant_fraction_free",
    "determinant_cofactor",
    "resultant",
]


class PolyError(ValueError):
    pass


class BothZero(PolyError):
    pass


class NotSquare(PolyError):
    pass


class Var:
    """An interned polynomial variable.

    ``key`` is a tuple that determines both identity and the global variable
    order (smaller key = earlier = lexicographically larger).  ``name`` is
    only used for display.
    """

    __slots__ = ("key", "name", "meta", "_hash")

    def __init__(self, key: tuple, name: str, meta=None):
        self.key = key
        self.name = name
        self.meta = meta
        self._hash = hash(key)

    @classmethod
    def symbol(cls, name: str) -> "Var":
        # generic symbols sort after every structured kind
        return cls((9, name), name)

    def __eq__(self, other):
        return isinstance(other, Var) and self.key == other.key

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Var") -> bool:
        return self.key < other.key

    def __repr__(self):
        return f"Var({self.name})"

    def __str__(self):
        return self.name


Monomial = Tuple[Tuple[Var, int], ...]
Coeff = Union[int, Fraction]
_ONE: Monomial = ()


def symbols(names: str) -> Tuple["Poly", ...]:
    return tuple(Poly.var(Var.symbol(s)) for s in names.replace(",", " ").split())


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        va, ea = a[i]
        vb, eb = b[j]
        if va.key == vb.key:
            out.append((va, ea + eb))
            i += 1
            j += 1
        elif va.key < vb.key:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def _mono_div(a: Monomial, b: Monomial) -> Optional[Monomial]:
    """a / b if b divides a, else None."""
    if not b:
        return a
    exps = dict(a)
    for v, e in b:
        have = exps.get(v, 0)
        if have < e:
            return None
        if have == e:
            del exps[v]
        else:
            exps[v] = have - e
    return tuple(sorted(exps.items(), key=lambda t: t[0].key))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


_SENTINEL = (float("inf"),)


def _mono_sort_key(m: Monomial):
    """Ascending sort key for *descending* graded lex order."""
    return (-_mono_degree(m), tuple((v.key, -e) for v, e in m) + (_SENTINEL,))


def _mono_str(m: Monomial, namer: Callable[[Var], str]) -> str:
    parts = []
    for v, e in m:
        s = namer(v)
        parts.append(s if e == 1 else f"{s}^{e}")
    return "*".join(parts)


class Poly:
    """Sparse polynomial with exact rational coefficients.

    Instances are treated as immutable; every operation returns a new
    polynomial in canonical form (no zero coefficients).
    """

    __slots__ = ("terms", "_hash", "_vars")

    def __init__(self, terms: Optional[Mapping[Monomial, Coeff]] = None):
        clean: Dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = c if isinstance(c, Fraction) else Fraction(c)
        self.terms = clean
        self._hash = None
        self._vars = None

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Fraction]) -> "Poly":
        p = cls.__new__(cls)
        p.terms = terms
        p._hash = None
        p._vars = None
        return p

    @classmethod
    def const(cls, c: Coeff) -> "Poly":
        return cls._raw({_ONE: Fraction(c)} if c else {})

    @classmethod
    def var(cls, v: Var) -> "Poly":
        return cls._raw({((v, 1),): Fraction(1)})

    @classmethod
    def coerce(cls, x) -> "Poly":
        if isinstance(x, Poly):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.const(x)
        if isinstance(x, Var):
            return cls.var(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Poly")

    # -- ring structure -------------------------------------------------
    def __add__(self, other) -> "Poly":
        other = Poly.coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-Poly.coerce(other))

    def __rsub__(self, other) -> "Poly":
        return Poly.coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly()
            return Poly._raw({m: c * other for m, c in self.terms.items()})
        other = Poly.coerce(other)
        if not self.terms or not other.terms:
            return Poly()
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly":
        """Division by a nonzero rational constant only."""
        if isinstance(other, Poly):
            if not other.is_constant() or other.is_zero():
                raise PolyError("use divide_exact for polynomial division")
            other = other.constant_value()
        other = Fraction(other)
        if not other:
            raise ZeroDivisionError("division by zero")
        return Poly._raw({m: c / other for m, c in self.terms.items()})

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise PolyError("exponent must be a non-negative integer")
        result = Poly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- inspection -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ONE in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise PolyError(f"not a constant: {self}")
        return self.terms.get(_ONE, Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get(_ONE, Fraction(0))

    def variables(self) -> frozenset:
        if self._vars is None:
            self._vars = frozenset(v for m in self.terms for v, _ in m)
        return self._vars

    def degree(self, v: Optional[Var] = None) -> int:
        """Degree in ``v`` (total degree if ``v`` is None); -1 for zero."""
        if not self.terms:
            return -1
        if v is None:
            return max(_mono_degree(m) for m in self.terms)
        return max(dict(m).get(v, 0) for m in self.terms)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: _mono_sort_key(t[0]))

    def leading_term(self) -> Tuple[Monomial, Fraction]:
        if not self.terms:
            raise PolyError("zero polynomial has no leading term")
        return min(self.terms.items(), key=lambda t: _mono_sort_key(t[0]))

    def leading_coefficient(self) -> Fraction:
        return self.leading_term()[1]

    def monic(self) -> "Poly":
        """Scale so the leading coefficient is 1 (zero stays zero)."""
        if not self.terms:
            return self
        return self / self.leading_coefficient()

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def eval(self, point: Mapping[Var, Coeff]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for v, e in m:
                t *= Fraction(point[v]) ** e
            total += t
        return total

    def diff(self, v: Var) -> "Poly":
        """Partial derivative with respect to ``v``."""
        out: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            exps = dict(m)
            e = exps.get(v, 0)
            if not e:
                continue
            if e == 1:
                del exps[v]
            else:
                exps[v] = e - 1
            nm = tuple(sorted(exps.items(), key=lambda t: t[0].key))
            out[nm] = out.get(nm, 0) + c * e
        return Poly(out)

    def subs(self, bindings: Mapping[Var, "Poly"]) -> "Poly":
        return substitute(self, bindings)

    def coefficients_in(self, v: Var) -> list:
        return coefficients_in(self, v)

    def as_univariate(self, v: Var) -> Dict[int, "Poly"]:
        """Map exponent of ``v`` to coefficient polynomial."""
        buckets: Dict[int, Dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            e = 0
            rest = []
            for w, k in m:
                if w == v:
                    e = k
                else:
                    rest.append((w, k))
            buckets.setdefault(e, {})[tuple(rest)] = c
        return {e: Poly._raw(t) for e, t in buckets.items()}

    def divide_exact(self, d: "Poly") -> Optional["Poly"]:
        """Return ``self / d`` if ``d`` divides ``self`` exactly, else None."""
        if d.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if d.is_constant():
            return self / d.constant_value()
        lm_d, lc_d = d.leading_term()
        rem = self
        quot: Dict[Monomial, Fraction] = {}
        while rem.terms:
            lm, lc = rem.leading_term()
            qm = _mono_div(lm, lm_d)
            if qm is None:
                return None
            qc = lc / lc_d
            quot[qm] = quot.get(qm, 0) + qc
            rem = rem - Poly._raw({qm: qc}) * d
        return Poly(quot)

    def content(self) -> Fraction:
        """Positive rational c with self / c having coprime integer coefficients."""
        from math import gcd

        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    # -- display --------------------------------------------------------
    def to_str(self, namer: Optional[Callable[[Var], str]] = None) -> str:
        namer = namer or str
        if not self.terms:
            return "0"
        out = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            sign = "-" if c < 0 else "+"
            a = -c if c < 0 else c
            body = _mono_str(m, namer)
            if not body:
                txt = str(a)
            elif a == 1:
                txt = body
            else:
                txt = f"{a}*{body}"
            if i == 0:
                out.append(txt if sign == "+" else f"-{txt}")
            else:
                out.append(f" {sign} {txt}")
        return "".join(out)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Poly({self.to_str()})"


def coefficients_in(p: Poly, x: Var) -> list:
    """Coefficients ``[a0, ..., am]`` of ``p`` as a polynomial in ``x``.

    ``a0`` is the leading coefficient, so ``p == sum(a_i * x**(m - i))``.
    The zero polynomial gives ``[0]``.
    """
    if p.is_zero():
        return [Poly()]
    buckets = p.as_univariate(x)
    m = max(buckets)
    return [buckets.get(m - i, Poly()) for i in range(m + 1)]


def substitute(p: Poly, bindings: Mapping[Var, Poly]) -> Poly:
    """Simultaneous substitution; unbound variables pass through."""
    if not bindings:
        return p
    bindings = {v: Poly.coerce(q) for v, q in bindings.items()}
    powers: Dict[Tuple[Var, int], Poly] = {}
    out = Poly()
    for m, c in p.terms.items():
        keep = []
        factor = Poly.const(c)
        for v, e in m:
            if v in bindings:
                key = (v, e)
                if key not in powers:
                    powers[key] = bindings[v] ** e
                factor = factor * powers[key]
            else:
                keep.append((v, e))
        out = out + factor * Poly._raw({tuple(keep): Fraction(1)})
    return out


class PolyMatrix:
    """Dense row-major matrix of polynomials."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Sequence):
        if len(entries) != rows * cols:
            raise PolyError("entries length must equal rows * cols")
        self.rows = rows
        self.cols = cols
        self.entries = tuple(Poly.coerce(e) for e in entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "PolyMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise PolyError("ragged rows")
        return cls(len(rows), ncols, [e for r in rows for e in r])

    def __getitem__(self, ij: Tuple[int, int]) -> Poly:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def map(self, fn: Callable[[Poly], Poly]) -> "PolyMatrix":
        return PolyMatrix(self.rows, self.cols, [fn(e) for e in self.entries])

    def __eq__(self, other):
        return (
            isinstance(other, PolyMatrix)
            and (self.rows, self.cols) == (other.rows, other.cols)
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"PolyMatrix({[[str(e) for e in r] for r in self.to_rows()]})"


def sylvester_matrix(f: Poly, g: Poly, x: Var) -> PolyMatrix:
    """Sylvester matrix of ``f`` and ``g`` with respect to ``x``.

    With ``deg f = m`` and ``deg g = n`` the result is ``(m+n) x (m+n)``:
    ``n`` shifted rows of f-coefficients followed by ``m`` shifted rows of
    g-coefficients.
    """
    if f.is_zero() and g.is_zero():
        raise BothZero("sylvester matrix of two zero polynomials")
    a = coefficients_in(f, x)
    b = coefficients_in(g, x)
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([Poly()] * i + a + [Poly()] * (size - m - 1 - i))
    for i in range(m):
        rows.append([Poly()] * i + b + [Poly()] * (size - n - 1 - i))
    return PolyMatrix(size, size, [e for r in rows for e in r])


def determinant_fraction_free(mat: PolyMatrix) -> Poly:
    """Determinant by Bareiss fraction-free elimination over Q[vars]."""
    if mat.rows != mat.cols:
        raise NotSquare(f"{mat.rows}x{mat.cols} matrix has no determinant")
    n = mat.rows
    if n == 0:
        return Poly.const(1)
    a = mat.to_rows()
    sign = 1
    prev = Poly.const(1)
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if swap is None:
                return Poly()
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = pivot * a[i][j] - a[i][k] * a[k][j]
                q = num.divide_exact(prev)
                if q is None:
                    # cannot happen in exact arithmetic; keep the documented fallback
                    if n <= 4:
                        return determinant_cofactor(mat)
                    raise PolyError("Bareiss division was not exact")
                a[i][j] = q
            a[i][k] = Poly()
        prev = pivot
    det = a[n - 1][n - 1]
    return det if sign == 1 else -det


def determinant_cofactor(mat: PolyMatrix) -> Poly:
    """Laplace expansion along the first row; exponential, used as an oracle."""
    if mat.rows != mat.cols:
        raise NotSquare(f"{mat.rows}x{mat.cols} matrix has no determinant")
    rows = mat.to_rows()

    def det(rs):
        if not rs:
            return Poly.const(1)
        if len(rs) == 1:
            return rs[0][0]
        total = Poly()
        for j, e in enumerate(rs[0]):
            if e.is_zero():
                continue
            minor = [r[:j] + r[j + 1:] for r in rs[1:]]
            term = e * det(minor)
            total = total + (term if j % 2 == 0 else -term)
        return total

    return det(rows)


def determinant_leibniz(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Permutation-sum determinant of a small numeric matrix."""
    n = len(rows)
    total = Fraction(0)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = Fraction(1)
        for i, j in enumerate(perm):
            prod *= rows[i][j]
            if not prod:
                break
        total += -prod if inv % 2 else prod
    return total


def resultant(f: Poly, g: Poly, x: Var) -> Poly:
    """Resultant of ``f`` and ``g`` in ``x`` as the Sylvester determinant.

    A nonzero constant ``c`` against a polynomial of degree ``m`` gives
    ``c**m``; two constants give 1.
    """
    if f.is_zero() and g.is_zero():
        raise BothZero("resultant of two zero polynomials")
    return determinant_fraction_free(sylvester_matrix(f, g, x))


def iter_vars(polys: Iterable[Poly]) -> Iterator[Var]:
    seen = set()
    for p in polys:
        for v in sorted(p.variables()):
            if v not in seen:
                seen.add(v)
                yield v
