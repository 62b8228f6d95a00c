"""Frame calculus on an orthonormal Lorentz frame ``e_1, ..., e_n``.

Every computation is done on concrete indices ``1..n`` for a fixed pair
``(n, r)``: ``e_1`` is timelike, ``e_1, e_2`` span the rotation block of the
shape operator, indices ``3..r`` form the A-class (eigenvalue ``lam3``),
``r+1..n-1`` the B-class (eigenvalue ``lamN1``) and ``e_n`` is the direction
of ``grad H`` with eigenvalue ``-n H / 2``.

Class-level statements (``e_A``, ``e_At``, ...) are obtained by binding each
index class to a representative concrete index; see :class:`Binding`.

Connection symbols ``w(k,i,j)`` stand for the coefficient of ``e_j`` in
``nabla_{e_k} e_i``.  Only one orientation of each pair ``(i, j)`` is a
variable; the other is rewritten through a compatibility rule:

* ``"antisymmetric"``: ``w(k,j,i) = -w(k,i,j)`` for every ``i != j``;
* ``"metric"``: ``w(k,j,i) = -eps_i eps_j w(k,i,j)``, which is what
  ``e_k g(e_i, e_j) = 0`` gives when ``g(e_1, e_1) = -1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple

from .poly import Poly, Var

__all__ = [
    "CONVENTIONS",
    "IndexClass",
    "Binding",
    "Frame",
    "LinExpr",
    "FrameError",
    "H",
    "LAM",
    "MU",
    "LAM3",
    "LAMN1",
    "ALPHA",
    "FIELDS",
    "CONSTANT_SYMBOLS",
    "is_unknown",
    "is_conn",
    "is_deriv",
    "inverse",
    "is_inverse",
    "cancel_inverses",
    "clear_inverses",
]


CONVENTIONS = ("antisymmetric", "metric")


class FrameError(ValueError):
    pass


class IndexClass(str, Enum):
    E1 = "1"
    E2 = "2"
    A = "A"
    ATILDE = "At"
    B = "B"
    BTILDE = "Bt"
    EN = "n"

    @classmethod
    def parse(cls, s: str) -> "IndexClass":
        for c in cls:
            if c.value == s or c.name == s:
                return c
        raise FrameError(f"unknown index class {s!r}")


def _field(rank: int, name: str) -> Var:
    return Var((2, rank), name, ("field", name))


# the rank doubles as elimination preference: lam first, H last
LAM = _field(0, "lam")
LAMN1 = _field(1, "lamN1")
LAM3 = _field(2, "lam3")
MU = _field(3, "mu")
H = _field(4, "H")
ALPHA = _field(5, "alpha")

FIELDS = {v.name: v for v in (H, LAM, MU, LAM3, LAMN1, ALPHA)}
# symbols whose frame derivatives vanish identically
CONSTANT_SYMBOLS = frozenset({ALPHA})


def is_conn(v: Var) -> bool:
    return v.key[0] == 1


def is_deriv(v: Var) -> bool:
    return v.key[0] == 0


def is_unknown(v: Var) -> bool:
    return v.key[0] in (0, 1)


_INVERSES: Dict[Var, Var] = {}


def inverse(v: Var) -> Var:
    """Symbol standing for ``1/v``; only used for variables declared nonzero."""
    u = _INVERSES.get(v)
    if u is None:
        u = Var((3, v.key), f"1/{v.name}", ("inv", v))
        _INVERSES[v] = u
    return u


def is_inverse(v: Var) -> bool:
    return v.key[0] == 3


def cancel_inverses(p: Poly) -> Poly:
    """Rewrite ``v * (1/v)`` to 1 in every monomial."""
    if not any(is_inverse(v) for v in p.variables()):
        return p
    out: Dict[tuple, Fraction] = {}
    for m, c in p.terms.items():
        exps = dict(m)
        for v in list(exps):
            if is_inverse(v):
                base = v.meta[1]
                k = min(exps[v], exps.get(base, 0))
                if k:
                    exps[v] -= k
                    exps[base] -= k
        mono = tuple(sorted(((v, e) for v, e in exps.items() if e), key=lambda t: t[0].key))
        s = out.get(mono, 0) + c
        if s:
            out[mono] = s
        else:
            out.pop(mono, None)
    return Poly(out)


def clear_inverses(p: Poly) -> Poly:
    """Multiply by the smallest power product of nonzero variables removing all inverses."""
    p = cancel_inverses(p)
    factor = Poly.const(1)
    for v in sorted(p.variables()):
        if is_inverse(v):
            factor = factor * Poly.var(v.meta[1]) ** p.degree(v)
    if factor.is_constant():
        return p
    return cancel_inverses(p * factor)


def deriv_depth(v: Var) -> int:
    d = 0
    while is_deriv(v):
        d += 1
        v = v.meta[2]
    return d


def deriv_base(v: Var) -> Var:
    while is_deriv(v):
        v = v.meta[2]
    return v


@dataclass(frozen=True)
class Binding:
    """Representative concrete index for each index class."""

    n: int
    r: int

    def index(self, c: IndexClass) -> int:
        i = {
            IndexClass.E1: 1,
            IndexClass.E2: 2,
            IndexClass.A: 3,
            IndexClass.ATILDE: 4,
            IndexClass.B: self.r + 1,
            IndexClass.BTILDE: self.r + 2,
            IndexClass.EN: self.n,
        }[c]
        if c is IndexClass.ATILDE and not self.has_atilde:
            raise FrameError(f"class At is empty for r={self.r}")
        if c is IndexClass.BTILDE and not self.has_btilde:
            raise FrameError(f"class Bt is empty for n={self.n}, r={self.r}")
        return i

    @property
    def has_atilde(self) -> bool:
        return self.r >= 4

    @property
    def has_btilde(self) -> bool:
        return self.r <= self.n - 3

    def label(self, i: int) -> str:
        if i == 1:
            return "1"
        if i == 2:
            return "2"
        if i == self.n:
            return "n"
        if i == 3:
            return "A"
        if i == 4 and self.has_atilde:
            return "At"
        if i == self.r + 1:
            return "B"
        if i == self.r + 2 and self.has_btilde:
            return "Bt"
        return str(i)


class LinExpr:
    """Linear view of a polynomial in the unknowns (connection and derivative symbols).

    ``terms`` maps each unknown to its coefficient (a polynomial in the
    fields); ``constant`` collects the unknown-free part.
    """

    __slots__ = ("terms", "constant")

    def __init__(self, terms: Mapping[Var, Poly], constant: Poly):
        self.terms = {u: c for u, c in terms.items() if not c.is_zero()}
        self.constant = constant

    @classmethod
    def from_poly(cls, p: Poly) -> "LinExpr":
        terms: Dict[Var, Dict] = {}
        const = {}
        for m, c in p.terms.items():
            unk = [(v, e) for v, e in m if is_unknown(v)]
            if not unk:
                const[m] = c
                continue
            if len(unk) > 1 or unk[0][1] != 1:
                raise FrameError(f"expression is not linear in the unknowns: {p}")
            u = unk[0][0]
            rest = tuple((v, e) for v, e in m if v != u)
            terms.setdefault(u, {})[rest] = c
        return cls({u: Poly(t) for u, t in terms.items()}, Poly(const))

    def to_poly(self) -> Poly:
        out = self.constant
        for u, c in self.terms.items():
            out = out + c * Poly.var(u)
        return out

    def unknowns(self) -> list:
        return sorted(self.terms)

    def __eq__(self, other):
        return isinstance(other, LinExpr) and self.to_poly() == other.to_poly()

    def __repr__(self):
        return f"LinExpr({self.to_poly()})"


VectorExpr = Dict[int, Poly]


def _vadd(a: VectorExpr, b: VectorExpr, scale=1) -> VectorExpr:
    out = dict(a)
    for k, c in b.items():
        s = out.get(k, Poly()) + c * scale
        if s.is_zero():
            out.pop(k, None)
        else:
            out[k] = s
    return out


def _vscale(a: VectorExpr, c: Poly) -> VectorExpr:
    out = {}
    for k, v in a.items():
        p = v * c
        if not p.is_zero():
            out[k] = p
    return out


class _Identity:
    """Reducer that leaves expressions untouched."""

    def reduce(self, p: Poly) -> Poly:
        return p


IDENTITY = _Identity()


class Frame:
    """Concrete frame for dimension ``n`` and A-class end index ``r``."""

    def __init__(self, n: int, r: int, convention: str = "antisymmetric"):
        if n < 5:
            raise FrameError(f"n must be >= 5 (got {n})")
        if not 3 <= r <= n - 2:
            raise FrameError(f"r must satisfy 3 <= r <= n-2 (got r={r}, n={n})")
        if convention not in CONVENTIONS:
            raise FrameError(f"unknown convention {convention!r}")
        self.n = n
        self.r = r
        self.convention = convention
        self.binding = Binding(n, r)
        self._conn_cache: Dict[Tuple[int, int, int], Var] = {}
        self._deriv_cache: Dict[Tuple[int, Var], Var] = {}

    # -- indices --------------------------------------------------------
    @property
    def indices(self) -> range:
        return range(1, self.n + 1)

    @property
    def a_class(self) -> range:
        return range(3, self.r + 1)

    @property
    def b_class(self) -> range:
        return range(self.r + 1, self.n)

    def class_of(self, i: int) -> IndexClass:
        if i == 1:
            return IndexClass.E1
        if i == 2:
            return IndexClass.E2
        if i == self.n:
            return IndexClass.EN
        if 3 <= i <= self.r:
            return IndexClass.A
        if self.r < i < self.n:
            return IndexClass.B
        raise FrameError(f"index {i} out of range 1..{self.n}")

    def members(self, c: IndexClass) -> range:
        if c in (IndexClass.A, IndexClass.ATILDE):
            return self.a_class
        if c in (IndexClass.B, IndexClass.BTILDE):
            return self.b_class
        i = self.binding.index(c)
        return range(i, i + 1)

    def idx(self, c) -> int:
        if isinstance(c, int):
            return c
        if isinstance(c, str) and not isinstance(c, IndexClass):
            c = IndexClass.parse(c)
        return self.binding.index(c)

    def eps(self, i: int) -> int:
        return -1 if i == 1 else 1

    def metric_sign(self, i, j) -> int:
        i, j = self.idx(i), self.idx(j)
        if i != j:
            return 0
        return self.eps(i)

    # -- symbols --------------------------------------------------------
    @property
    def lam_n(self) -> Poly:
        return Poly.var(H) * Fraction(-self.n, 2)

    def _conn_var(self, k: int, i: int, j: int) -> Var:
        key = (k, i, j)
        v = self._conn_cache.get(key)
        if v is None:
            v = Var((1, -k, -i, -j), f"w({k},{i},{j})", ("w", k, i, j))
            self._conn_cache[key] = v
        return v

    def conn(self, k, i, j) -> Poly:
        """The symbol w(k,i,j): coefficient of e_j in nabla_{e_k} e_i."""
        k, i, j = self.idx(k), self.idx(i), self.idx(j)
        if i == j:
            return Poly()
        if i < j:
            return Poly.var(self._conn_var(k, i, j))
        base = Poly.var(self._conn_var(k, j, i))
        if self.convention == "antisymmetric":
            return -base
        return base * (-self.eps(i) * self.eps(j))

    def conn_raw_var(self, k, i, j) -> Var:
        """The variable behind w(k,i,j) regardless of orientation (i != j)."""
        k, i, j = self.idx(k), self.idx(i), self.idx(j)
        if i == j:
            raise FrameError("w(k,i,i) is identically zero")
        return self._conn_var(k, min(i, j), max(i, j))

    def deriv_var(self, i, target: Var) -> Var:
        i = self.idx(i)
        key = (i, target)
        v = self._deriv_cache.get(key)
        if v is None:
            if is_deriv(target) and is_conn(deriv_base(target)):
                raise FrameError(f"second derivative of a connection symbol: e({i},{target.name})")
            v = Var((0, i, target.key), f"e({i},{target.name})", ("e", i, target))
            self._deriv_cache[key] = v
        return v

    def d(self, i, target) -> Poly:
        """The derivative symbol e_i(target) for a field/unknown variable."""
        if isinstance(target, Poly):
            return self.differentiate(i, target)
        if target in CONSTANT_SYMBOLS:
            return Poly()
        return Poly.var(self.deriv_var(i, target))

    def differentiate(self, i, p: Poly) -> Poly:
        """Apply the frame vector field e_i to ``p`` by the chain rule."""
        i = self.idx(i)
        out = Poly()
        for v in sorted(p.variables()):
            if v in CONSTANT_SYMBOLS:
                continue
            dp = p.diff(v)
            if is_inverse(v):
                dv = -(Poly.var(v) ** 2) * self.d(i, v.meta[1])
            else:
                dv = Poly.var(self.deriv_var(i, v))
            out = out + dp * dv
        return cancel_inverses(out)

    # -- shape operator -------------------------------------------------
    def shape_entry(self, j: int, m: int) -> Poly:
        """Coefficient of e_m in S(e_j)."""
        if j in (1, 2) and m in (1, 2):
            if j == m:
                return Poly.var(LAM)
            return Poly.var(MU) if j == 1 else -Poly.var(MU)
        if j != m:
            return Poly()
        if j == self.n:
            return self.lam_n
        if j in self.a_class:
            return Poly.var(LAM3)
        return Poly.var(LAMN1)

    def shape_image(self, i) -> VectorExpr:
        i = self.idx(i)
        out = {}
        for m in ((1, 2) if i in (1, 2) else (i,)):
            c = self.shape_entry(i, m)
            if not c.is_zero():
                out[m] = c
        return out

    def g(self, u: VectorExpr, v: VectorExpr) -> Poly:
        out = Poly()
        for k, c in u.items():
            if k in v:
                out = out + c * v[k] * self.eps(k)
        return out

    def basis(self, i) -> VectorExpr:
        return {self.idx(i): Poly.const(1)}

    def trace_shape(self) -> Poly:
        return sum((self.shape_entry(i, i) for i in self.indices), Poly())

    def trace_shape_squared(self) -> Poly:
        out = Poly()
        for i in self.indices:
            for m in self.shape_image(i):
                out = out + self.shape_entry(i, m) * self.shape_entry(m, i)
        return out

    # -- connection -----------------------------------------------------
    def covariant_derivative(self, i, j, kb=IDENTITY) -> VectorExpr:
        """nabla_{e_i} e_j = sum_k w(i,j,k) e_k, reduced by ``kb``."""
        i, j = self.idx(i), self.idx(j)
        out = {}
        for k in self.indices:
            c = kb.reduce(self.conn(i, j, k))
            if not c.is_zero():
                out[k] = c
        return out

    def nabla(self, i: int, vec: VectorExpr, kb=IDENTITY) -> VectorExpr:
        """nabla_{e_i} of a vector field given by frame components."""
        out: VectorExpr = {}
        for k, c in vec.items():
            dc = kb.reduce(self.differentiate(i, c))
            if not dc.is_zero():
                out = _vadd(out, {k: dc})
            out = _vadd(out, _vscale(self.covariant_derivative(i, k, kb), c))
        return {k: kb.reduce(v) for k, v in out.items() if not kb.reduce(v).is_zero()}

    def nabla_along(self, x: VectorExpr, vec: VectorExpr, kb=IDENTITY) -> VectorExpr:
        out: VectorExpr = {}
        for i, c in x.items():
            out = _vadd(out, _vscale(self.nabla(i, vec, kb), c))
        return out

    # -- Codazzi --------------------------------------------------------
    def nabla_s(self, x: int, y: int, z: int) -> Poly:
        """g((nabla_{e_x} S) e_y, e_z)."""
        ez = self.eps(z)
        out = self.differentiate(x, self.shape_entry(y, z))
        for m in self.shape_image(y):
            out = out + self.shape_entry(y, m) * self.conn(x, m, z)
        for p in self.indices:
            s = self.shape_entry(p, z)
            if not s.is_zero():
                out = out - self.conn(x, y, p) * s
        return out * ez

    def codazzi_residual(self, x, y, z, kb=IDENTITY) -> Poly:
        """g((nabla_X S)Y - (nabla_Y S)X, Z) expanded in frame symbols."""
        x, y, z = self.idx(x), self.idx(y), self.idx(z)
        return kb.reduce(self.nabla_s(x, y, z) - self.nabla_s(y, x, z))

    # -- curvature ------------------------------------------------------
    def curvature_vector(self, x, y, z, kb=IDENTITY) -> VectorExpr:
        """R(e_x, e_y) e_z = nabla_x nabla_y e_z - nabla_y nabla_x e_z - nabla_[x,y] e_z."""
        x, y, z = self.idx(x), self.idx(y), self.idx(z)
        if x == y:
            return {}
        nyz = self.covariant_derivative(y, z, kb)
        nxz = self.covariant_derivative(x, z, kb)
        out = self.nabla(x, nyz, kb)
        out = _vadd(out, self.nabla(y, nxz, kb), -1)
        bracket = _vadd(self.covariant_derivative(x, y, kb), self.covariant_derivative(y, x, kb), -1)
        out = _vadd(out, self.nabla_along(bracket, self.basis(z), kb), -1)
        return out

    def gauss_rhs(self, x, y, z, w) -> Poly:
        """g(SY, Z) g(SX, W) - g(SX, Z) g(SY, W) for frame vectors."""
        x, y, z, w = (self.idx(t) for t in (x, y, z, w))
        sx, sy = self.shape_image(x), self.shape_image(y)
        ez, ew = self.basis(z), self.basis(w)
        return self.g(sy, ez) * self.g(sx, ew) - self.g(sx, ez) * self.g(sy, ew)

    def curvature_residual(self, x, y, z, w, kb=IDENTITY) -> Poly:
        """g(R(X,Y)Z, W) minus the Gauss-equation value; zero on the hypersurface."""
        vec = self.curvature_vector(x, y, z, kb)
        lhs = self.g(vec, self.basis(w))
        return kb.reduce(lhs - self.gauss_rhs(x, y, z, w))

    # -- Laplacian and brackets -----------------------------------------
    def laplacian(self, f: Poly, kb=IDENTITY) -> Poly:
        """-sum_i eps_i (e_i e_i f - (nabla_{e_i} e_i) f)."""
        out = Poly()
        for i in self.indices:
            first = kb.reduce(self.differentiate(i, kb.reduce(f)))
            second = kb.reduce(self.differentiate(i, first))
            along = Poly()
            for k, c in self.covariant_derivative(i, i, kb).items():
                along = along + c * kb.reduce(self.differentiate(k, kb.reduce(f)))
            out = out - (second - along) * self.eps(i)
        return kb.reduce(out)

    laplacian_expr = laplacian

    def bracket_residual(self, i, j, f: Poly, kb=IDENTITY) -> Poly:
        """e_i e_j f - e_j e_i f - sum_k (w(i,j,k) - w(j,i,k)) e_k f."""
        i, j = self.idx(i), self.idx(j)

        def dd(a, b):
            inner = kb.reduce(self.differentiate(b, kb.reduce(f)))
            return kb.reduce(self.differentiate(a, inner))

        out = dd(i, j) - dd(j, i)
        for k in self.indices:
            c = self.conn(i, j, k) - self.conn(j, i, k)
            if c.is_zero():
                continue
            out = out - kb.reduce(c) * kb.reduce(self.differentiate(k, kb.reduce(f)))
        return kb.reduce(out)

    def compatibility_residual(self, k, i, j) -> Poly:
        """e_k g(e_i, e_j) expanded through the connection: eps_j w(k,i,j) + eps_i w(k,j,i)."""
        k, i, j = self.idx(k), self.idx(i), self.idx(j)
        return self.conn(k, i, j) * self.eps(j) + self.conn(k, j, i) * self.eps(i)

    # -- display --------------------------------------------------------
    def namer(self, binding: Optional[Binding] = None) -> Callable[[Var], str]:
        b = binding or self.binding

        def name(v: Var) -> str:
            meta = v.meta
            if meta is None:
                return v.name
            if meta[0] == "field":
                return meta[1]
            if meta[0] == "w":
                _, k, i, j = meta
                return f"w({b.label(k)},{b.label(i)},{b.label(j)})"
            if meta[0] == "e":
                _, i, t = meta
                return f"e({b.label(i)},{name(t)})"
            if meta[0] == "inv":
                return f"1/{name(meta[1])}"
            return v.name

        return name

    def render(self, p: Poly, binding: Optional[Binding] = None) -> str:
        return p.to_str(self.namer(binding))

    def render_vector(self, vec: VectorExpr, binding: Optional[Binding] = None) -> str:
        b = binding or self.binding
        if not vec:
            return "0"
        parts = []
        for k in sorted(vec):
            parts.append(f"({self.render(vec[k], b)})*e({b.label(k)})")
        return " + ".join(parts)
