"""Truncated power series (jets) over Q."""
from __future__ import annotations

from fractions import Fraction

from .poly import INFINITE, DimensionError, Poly, Scalar, as_rational, format_poly


class NotAUnitError(ValueError):
    """Raised when inverting a jet whose constant term vanishes."""


class Jet:
    """A power series known modulo terms of total degree > ``order``."""

    __slots__ = ("poly", "order")

    def __init__(self, poly: Poly, order: int):
        if order < 0:
            raise ValueError("jet order must be >= 0")
        self.poly = poly.truncate(order)
        self.order = int(order)

    @classmethod
    def from_poly(cls, poly: Poly, order: int) -> "Jet":
        return cls(poly, order)

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise DimensionError("variable-count mismatch")
            return other
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionError("variable-count mismatch")
            return Jet(other, self.order)
        return Jet(Poly.const(as_rational(other), self.nvars), self.order)

    def __add__(self, other) -> "Jet":
        other = self._coerce(other)
        order = min(self.order, other.order)
        return Jet(self.poly.truncate(order) + other.poly.truncate(order), order)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet(-self.poly, self.order)

    def __sub__(self, other) -> "Jet":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, (Jet, Poly)):
            return Jet(self.poly.scale(other), self.order)
        other = self._coerce(other)
        order = min(self.order, other.order)
        return Jet(self.poly.mul(other.poly, order), order)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Jet":
        return Jet(self.poly.pow_truncated(k, self.order), self.order)

    def derivative(self, var_index: int) -> "Jet":
        """Partial derivative; the result is valid one degree less."""
        if self.order == 0:
            raise ValueError("derivative of an order-0 jet carries no information")
        return Jet(self.poly.derivative(var_index), self.order - 1)

    def truncate(self, order: int) -> "Jet":
        return Jet(self.poly, min(order, self.order))

    def constant_term(self) -> Fraction:
        return self.poly.constant_term()

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def vanishing_order(self) -> float | int:
        """Lowest degree present; ``inf`` when zero up to ``order``."""
        return self.poly.order()

    def compose(self, images: list["Jet"]) -> "Jet":
        """Substitute jets with zero constant term for the variables."""
        if any(j.constant_term() for j in images):
            raise ValueError("substituted jets must vanish at the origin")
        order = min([self.order] + [j.order for j in images])
        return Jet(self.poly.compose([j.poly for j in images], order), order)

    def __eq__(self, other) -> bool:
        if isinstance(other, Jet):
            return self.order == other.order and self.poly == other.poly
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.poly, self.order))

    def equals_up_to(self, other: "Jet | Poly", order: int) -> bool:
        other_poly = other.poly if isinstance(other, Jet) else other
        return self.poly.truncate(order) == other_poly.truncate(order)

    def __repr__(self) -> str:
        return f"Jet({format_poly(self.poly)!r}, order={self.order})"

    def __str__(self) -> str:
        return f"{format_poly(self.poly)} + O({self.order + 1})"


def jet_inverse_unit(u: Jet) -> Jet:
    """Inverse of a unit jet: ``u * v == 1`` modulo degrees above ``u.order``."""
    c = u.constant_term()
    if not c:
        raise NotAUnitError("jet has zero constant term; not a unit")
    n, order = u.nvars, u.order
    # u = c (1 + w) with w in the maximal ideal
    w = (u.poly.scale(1 / c) - 1).truncate(order)
    result = Poly.const(1, n)
    power = Poly.const(1, n)
    neg_w = -w
    for _ in range(order):
        power = power.mul(neg_w, order)
        if power.is_zero():
            break
        result = result + power
    return Jet(result.scale(1 / c), order)


def inverse_unit_poly(u: Poly, order: int) -> Poly:
    """Degree-``order`` truncation of ``1/u`` for a polynomial unit ``u``."""
    return jet_inverse_unit(Jet(u, order)).poly


def order_of_vanishing(p: Poly | Jet) -> float | int:
    return p.vanishing_order() if isinstance(p, Jet) else p.order()


__all__ = [
    "INFINITE",
    "Jet",
    "NotAUnitError",
    "Scalar",
    "inverse_unit_poly",
    "jet_inverse_unit",
    "order_of_vanishing",
]
