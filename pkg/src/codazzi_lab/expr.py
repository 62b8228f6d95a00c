"""Parser for frame expressions written in a compact text notation.

Grammar (whitespace insensitive)::

    equation := expr ['=' expr]
    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary | unary)*     juxtaposition multiplies
    unary    := ('-' | '+') unary | power
    power    := atom ['^' INT]
    atom     := NUMBER | NAME | 'w(' idx ',' idx ',' idx ')' | 'e(' idx ',' expr ')'
              | '(' expr ')' | '[' expr ']'

``w(i,j,k)`` is the connection symbol (coefficient of e_k in nabla_{e_i} e_j),
``e(i, f)`` applies the frame field e_i.  Index labels are ``1``, ``2``,
``A``, ``At``, ``B``, ``Bt``, ``n`` or plain integers.  Names are the fields
``H lam mu lam3 lamN1 alpha``, ``lamn`` (the value -nH/2) and the integer
parameters ``n`` and ``r``.
"""

from __future__ import annotations

import re
from typing import Dict, List, Mapping, Optional, Tuple

from .frame import FIELDS, Frame
from .poly import Poly

__all__ = ["ParseError", "parse", "parse_equation"]


class ParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str) -> List[Tuple[str, str]]:
    out = []
    for num, name, op in _TOKEN.findall(text):
        if num:
            out.append(("num", num))
        elif name:
            out.append(("name", name))
        elif op.strip():
            out.append(("op", op))
    return out


class _Parser:
    def __init__(self, text: str, frame: Frame, labels: Mapping[str, int], names: Mapping[str, Poly]):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0
        self.frame = frame
        self.labels = labels
        self.names = names

    def peek(self) -> Optional[Tuple[str, str]]:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, value: Optional[str] = None) -> Tuple[str, str]:
        tok = self.peek()
        if tok is None or (value is not None and tok[1] != value):
            raise ParseError(f"expected {value or 'token'} at position {self.pos} in {self.text!r}")
        self.pos += 1
        return tok

    def equation(self) -> Poly:
        lhs = self.expr()
        if self.peek() == ("op", "="):
            self.take("=")
            lhs = lhs - self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()[1]!r} in {self.text!r}")
        return lhs

    def expr(self) -> Poly:
        out = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            out = out + t if op == "+" else out - t
        return out

    def _starts_atom(self) -> bool:
        tok = self.peek()
        return tok is not None and (tok[0] in ("num", "name") or tok[1] in ("(", "["))

    def term(self) -> Poly:
        out = self.unary()
        while True:
            tok = self.peek()
            if tok == ("op", "*"):
                self.take()
                out = out * self.unary()
            elif tok == ("op", "/"):
                self.take()
                d = self.unary()
                if not d.is_constant() or d.is_zero():
                    raise ParseError(f"division by non-constant {d} in {self.text!r}")
                out = out / d.constant_value()
            elif self._starts_atom():
                out = out * self.power()
            else:
                return out

    def unary(self) -> Poly:
        tok = self.peek()
        if tok == ("op", "-"):
            self.take()
            return -self.unary()
        if tok == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ParseError(f"exponent must be an integer in {self.text!r}")
            base = base ** int(val)
        return base

    def index(self) -> int:
        kind, val = self.take()
        if kind == "num":
            return int(val)
        if val in self.labels:
            return self.labels[val]
        raise ParseError(f"unknown index label {val!r} in {self.text!r}")

    def atom(self) -> Poly:
        kind, val = self.take()
        if kind == "num":
            return Poly.const(int(val))
        if kind == "op":
            if val in "([":
                inner = self.expr()
                self.take(")" if val == "(" else "]")
                return inner
            raise ParseError(f"unexpected {val!r} in {self.text!r}")
        if val == "w" and self.peek() == ("op", "("):
            self.take("(")
            k = self.index()
            self.take(",")
            i = self.index()
            self.take(",")
            j = self.index()
            self.take(")")
            return self.frame.conn(k, i, j)
        if val == "e" and self.peek() == ("op", "("):
            self.take("(")
            i = self.index()
            self.take(",")
            inner = self.expr()
            self.take(")")
            return self.frame.differentiate(i, inner)
        if val in self.names:
            return self.names[val]
        raise ParseError(f"unknown name {val!r} in {self.text!r}")


def default_labels(frame: Frame) -> Dict[str, int]:
    b = frame.binding
    labels = {"1": 1, "2": 2, "n": frame.n, "A": 3, "B": frame.r + 1}
    if b.has_atilde:
        labels["At"] = 4
    if b.has_btilde:
        labels["Bt"] = frame.r + 2
    return labels


def default_names(frame: Frame) -> Dict[str, Poly]:
    names = {k: Poly.var(v) for k, v in FIELDS.items()}
    names["lamn"] = frame.lam_n
    names["n"] = Poly.const(frame.n)
    names["r"] = Poly.const(frame.r)
    return names


def parse(
    text: str,
    frame: Frame,
    labels: Optional[Mapping[str, int]] = None,
    names: Optional[Mapping[str, Poly]] = None,
) -> Poly:
    """Parse ``text`` (an expression or ``lhs = rhs``) into ``lhs - rhs``."""
    lab = default_labels(frame)
    if labels:
        lab.update(labels)
    nm = default_names(frame)
    if names:
        nm.update(names)
    return _Parser(text, frame, lab, nm).equation()


parse_equation = parse
