"""Exact arithmetic core: rationals, sparse polynomials, jets, linear substitution."""
from __future__ import annotations

from fractions import Fraction

from .coprime import COMMON_FACTOR_DETECTED, COPRIME_PROBABLE, coprimality_probe, random_plane
from .jet import Jet, NotAUnitError, inverse_unit_poly, jet_inverse_unit, order_of_vanishing
from .linalg import FractionFreeEliminator, bareiss_determinant, solve_linear_system
from .linear_map import LinearMapSpec, substitute_linear
from .poly import (
    INFINITE,
    DimensionError,
    Monomial,
    Poly,
    as_rational,
    format_poly,
    format_rational,
    grlex_key,
    monomials_of_degree,
    monomials_up_to,
)

Rational = Fraction


def poly_arith(a: Poly, b: Poly, kind: str) -> Poly:
    if a.nvars != b.nvars:
        raise DimensionError(f"variable-count mismatch: {a.nvars} vs {b.nvars}")
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown operation {kind!r}")


def partial_derivative(p: Poly, var_index: int) -> Poly:
    return p.derivative(var_index)


__all__ = [
    "COMMON_FACTOR_DETECTED",
    "COPRIME_PROBABLE",
    "DimensionError",
    "FractionFreeEliminator",
    "INFINITE",
    "Jet",
    "LinearMapSpec",
    "Monomial",
    "NotAUnitError",
    "Poly",
    "Rational",
    "as_rational",
    "bareiss_determinant",
    "coprimality_probe",
    "format_poly",
    "format_rational",
    "grlex_key",
    "inverse_unit_poly",
    "jet_inverse_unit",
    "monomials_of_degree",
    "monomials_up_to",
    "order_of_vanishing",
    "partial_derivative",
    "poly_arith",
    "random_plane",
    "solve_linear_system",
    "substitute_linear",
]
