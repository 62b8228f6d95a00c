import random

import pytest
import sympy as sp

from codazzi_lab.poly import Poly, symbols

X, Y, Z, W = symbols("x y z w")
XV = next(iter(X.variables()))


def to_sympy(p: Poly):
    return sp.sympify(p.to_str().replace("^", "**")) if not p.is_zero() else sp.Integer(0)


def random_poly(rng: random.Random, deg_x: int, extra, terms: int = 4) -> Poly:
    """Random polynomial of exact degree ``deg_x`` in x with 0/1 powers of ``extra``."""
    while True:
        p = Poly()
        for _ in range(terms):
            m = X ** rng.randint(0, deg_x)
            for v in extra:
                m = m * v ** rng.randint(0, 1)
            p = p + m * rng.randint(-5, 5)
        p = p + X ** deg_x * rng.choice([1, 2, -3])
        if p.degree(XV) == deg_x:
            return p


def lemma_pairs(count: int, seed: int):
    """(f, g, planted) triples: half share a planted factor, the rest are coprime in x."""
    rng = random.Random(seed)
    xs = sp.Symbol("x")
    out = []
    for k in range(count):
        extra = [Y, Z, W][: rng.randint(0, 3)]
        if k % 2 == 0:
            h = random_poly(rng, rng.randint(1, 2), extra, 2)
            f = h * random_poly(rng, rng.randint(0, 3), extra, 3)
            g = h * random_poly(rng, rng.randint(0, 3), extra, 3)
            out.append((f, g, True))
        else:
            while True:
                f = random_poly(rng, rng.randint(1, 5), extra)
                g = random_poly(rng, rng.randint(1, 5), extra)
                if sp.degree(sp.gcd(to_sympy(f), to_sympy(g)), xs) == 0:
                    break
            out.append((f, g, False))
    return out


@pytest.fixture
def xyz():
    return X, Y, Z


# -- acceptance summary ---------------------------------------------------------

_ACCEPTANCE = {}


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion; printed in the terminal summary."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])
