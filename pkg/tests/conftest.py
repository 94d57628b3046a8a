from __future__ import annotations

from pathlib import Path

import pytest
import sympy

from merodecomp.algebra import Poly

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def symbols(n):
    return sympy.symbols("x y z")[:n] if n <= 3 else sympy.symbols(f"x1:{n + 1}")


def to_sympy(p: Poly, syms=None):
    syms = syms or symbols(p.nvars)
    total = sympy.Integer(0)
    for m, c in p.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, e in zip(syms, m):
            term *= s**e
        total += term
    return sympy.expand(total)


def from_sympy(expr, nvars: int) -> Poly:
    syms = symbols(nvars)
    sp = sympy.Poly(sympy.expand(expr), *syms)
    from fractions import Fraction

    return Poly(nvars, {m: Fraction(int(c.p), int(c.q)) for m, c in sp.terms()})


@pytest.fixture
def problems_dir():
    return PROBLEMS


ACCEPTANCE: list[str] = []


def record_acceptance(criterion: str, passed: bool, detail: str) -> None:
    ACCEPTANCE.append(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
