from __future__ import annotations

import random
from dataclasses import replace
from fractions import Fraction

import pytest
import sympy

from merodecomp.algebra import LinearMapSpec, Poly
from merodecomp.corpus import random_instance, random_poly
from merodecomp.decompose import decompose
from merodecomp.forms import MeroOneForm, OneForm, PoleDivisor, synthesize_form
from merodecomp.frontend.parser import parse_polynomial
from merodecomp.residue import (
    DEGENERATE_PLANE,
    OK,
    PlaneSpec,
    QuadratureError,
    ResidueError,
    contour_estimate,
    line_multiplicity_check,
    numeric_contour_residue,
    pencil_constancy_check,
    restrict_to_line,
    _restricted_sample,
    restrict_to_plane,
    univariate_residue_at_origin,
)

from conftest import to_sympy

U = ["x"]
XY = ["x", "y"]


def P(text, names=XY):
    return parse_polynomial(text, names)


def test_univariate_examples():
    assert univariate_residue_at_origin(P("1", U), P("x", U), 0) == 1
    assert univariate_residue_at_origin(P("3*x - 1", U), P("x*(x - 1)", U), 2) == 1
    assert univariate_residue_at_origin(P("1", U), P("x^2", U), 1) == 0


def test_univariate_errors():
    with pytest.raises(ResidueError):
        univariate_residue_at_origin(P("1", U), P("1 + x", U), 3)
    with pytest.raises(ResidueError):
        univariate_residue_at_origin(P("1", U), Poly.zero(1), 3)
    with pytest.raises(ResidueError):
        univariate_residue_at_origin(P("1", U), P("x^4", U), 2)


def test_univariate_against_sympy():
    rng = random.Random(9)
    x = sympy.Symbol("x")
    for _ in range(20):
        num = random_poly(rng, 1, 5, 4)
        unit = random_poly(rng, 1, 3, 3) + Poly.const(rng.randint(1, 5), 1)
        if not unit.constant_term():
            continue
        m = rng.randint(1, 4)
        Q = unit * Poly.monomial((m,))
        expected = sympy.residue(to_sympy(num, [x]) / to_sympy(Q, [x]), x, 0)
        assert univariate_residue_at_origin(num, Q, m - 1) == Fraction(str(expected))


def test_restrict_to_line():
    assert restrict_to_line(P("x^2 + y^3"), (2, 1)) == P("4*x^2 + x^3", U)


def test_plane_spec_rejects_dependent_columns():
    with pytest.raises(ValueError):
        PlaneSpec(LinearMapSpec([[1, 2], [1, 2], [0, 0]]))


def test_restrict_to_plane():
    X, Y, Z = (Poly.var(i, 3) for i in range(3))
    w = MeroOneForm(OneForm.differential(Z), PoleDivisor.of((Z, 1)))
    r = restrict_to_plane(w, PlaneSpec(LinearMapSpec([[1, 0], [0, 1], [1, 1]])))
    assert r.divisor.functions == [P("x + y")]
    assert r.eta.coeffs == (P("1"), P("1"))


def test_line_check_examples():
    cusp = MeroOneForm(OneForm((P("2*x"), P("3*y^2"))), PoleDivisor.of((P("x^2 + y^3"), 1)))
    d, _ = decompose(cusp)
    rep = line_multiplicity_check(cusp, d, 20, 0)
    assert rep.ok and rep.expected == 2
    w = synthesize_form([2, 3], P("x + y"), PoleDivisor.of((P("x"), 2), (P("y"), 2)))
    d, _ = decompose(w)
    rep = line_multiplicity_check(w, d, 20, 0)
    assert rep.ok and rep.expected == 5


def test_line_check_detects_wrong_lambdas():
    w = synthesize_form([2, 3], P("x + y"), PoleDivisor.of((P("x"), 2), (P("y"), 2)))
    d, _ = decompose(w)
    rep = line_multiplicity_check(w, replace(d, lambdas=(Fraction(2), Fraction(4))), 10, 0)
    assert not rep.ok and len(rep.failures) == 10


def test_pencil_constancy():
    rng = random.Random(5)
    inst = random_instance(rng, 3)
    rep = pencil_constancy_check(inst.form, 10, 3, 10)
    assert rep.verdict == "constant"
    assert len(rep.usable) >= 8
    assert rep.lambdas == inst.lambdas


def test_pencil_reports_degenerate_planes():
    # z restricts to zero on the plane z = 0
    Z = Poly.var(2, 3)
    w = synthesize_form([1], Poly.zero(3), PoleDivisor.of((Z, 1)))
    plane = PlaneSpec(LinearMapSpec([[1, 0], [0, 1], [0, 0]]))
    assert _restricted_sample(w, plane, 6, 0).status == DEGENERATE_PLANE
    plane = PlaneSpec(LinearMapSpec([[1, 0], [0, 1], [1, 2]]))
    sample = _restricted_sample(w, plane, 6, 0)
    assert sample.status == OK and sample.lambdas == (1,)


def test_pencil_needs_three_variables():
    w = synthesize_form([1], Poly.zero(2), PoleDivisor.of((P("x"), 1)))
    with pytest.raises(ResidueError):
        pencil_constancy_check(w)


def test_contour_examples():
    cusp = synthesize_form([1], Poly.zero(2), PoleDivisor.of((P("y^2 - x^3"), 1)))
    assert abs(numeric_contour_residue(cusp, 0, (1, 1)) - 1) < 1e-10
    w = synthesize_form([2], Poly.zero(2), PoleDivisor.of((P("x"), 1)))
    assert abs(numeric_contour_residue(w, 0, (0, 1)) - 2) < 1e-10
    axes = synthesize_form([2, 3], P("x + y"), PoleDivisor.of((P("x"), 2), (P("y"), 2)))
    assert abs(numeric_contour_residue(axes, 0, (0, 1), (1, 0)) - 2) < 1e-10
    assert abs(numeric_contour_residue(axes, 1, (1, 0)) - 3) < 1e-10


def test_contour_errors():
    w = synthesize_form([2], Poly.zero(2), PoleDivisor.of((P("x"), 1)))
    with pytest.raises(ResidueError):
        numeric_contour_residue(w, 0, (0.5, 1))
    cusp = synthesize_form([1], Poly.zero(2), PoleDivisor.of((P("y^2 - x^3"), 1)))
    with pytest.raises(ResidueError):
        numeric_contour_residue(cusp, 0, (0, 0))
    # the circle passes just outside the pole of y = 0: trapezoid sums at 8 and 16 nodes disagree
    axes = synthesize_form([2, 3], P("x + y"), PoleDivisor.of((P("x"), 2), (P("y"), 2)))
    with pytest.raises(QuadratureError):
        numeric_contour_residue(axes, 0, (0, 0.02), (1, 1), radius=0.021, points=8)


def test_contour_estimate_is_deterministic():
    w = synthesize_form([2], Poly.zero(2), PoleDivisor.of((P("x"), 1)))
    a = contour_estimate(w, 0, (0, 1), (1, 0), 0.05, 64)
    b = contour_estimate(w, 0, (0, 1), (1, 0), 0.05, 64)
    assert a == b
