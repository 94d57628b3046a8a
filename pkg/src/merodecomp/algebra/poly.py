"""Sparse multivariate polynomials with exact rational coefficients.

Monomials are exponent tuples of fixed length ``nvars``.  Terms are kept in a
dict with no stored zeros; the canonical term order is graded lexicographic
(total degree first, then lexicographic with ``x0 > x1 > ...``).
"""
from __future__ import annotations

import math
from bisect import bisect_right
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Union

Monomial = tuple[int, ...]
Scalar = Union[int, Fraction]

_SHIFT = 20
_MASK = (1 << _SHIFT) - 1

INFINITE = math.inf


class DimensionError(ValueError):
    """Raised when operands live in different ambient dimensions."""


def as_rational(value) -> Fraction:
    """Convert ints, Fractions and exact decimal strings to ``Fraction``.

    Floats and complex numbers are rejected: coefficients must be exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"non-rational coefficient {value!r}")


def grlex_key(m: Monomial) -> tuple[int, Monomial]:
    return (sum(m), m)


def display_key(m: Monomial) -> tuple[int, tuple[int, ...]]:
    # ascending degree, x0 before x1 within a degree
    return (sum(m), tuple(-e for e in m))


def monomials_of_degree(nvars: int, degree: int) -> list[Monomial]:
    """All exponent tuples of the given total degree, in decreasing lex order."""
    if nvars == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials_of_degree(nvars - 1, degree - first):
            out.append((first,) + rest)
    return out


def monomials_up_to(nvars: int, degree: int) -> list[Monomial]:
    out: list[Monomial] = []
    for d in range(degree + 1):
        out.extend(monomials_of_degree(nvars, d))
    return out


def _pack(m: Monomial) -> int:
    key = 0
    for i, e in enumerate(m):
        key |= e << (_SHIFT * i)
    return key


def _unpack(key: int, nvars: int) -> Monomial:
    return tuple((key >> (_SHIFT * i)) & _MASK for i in range(nvars))


def _integer_terms(terms: Mapping[Monomial, Fraction]) -> tuple[int, list[tuple[int, int, int]]]:
    """Common denominator plus (packed monomial, degree, integer numerator) triples."""
    den = 1
    for c in terms.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    out = [(_pack(m), sum(m), c.numerator * (den // c.denominator)) for m, c in terms.items()]
    return den, out


class Poly:
    """Immutable sparse polynomial over Q in ``nvars`` variables."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Monomial, Scalar] | Iterable[tuple[Monomial, Scalar]] = ()):
        if nvars < 1:
            raise ValueError("nvars must be >= 1")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Monomial, Fraction] = {}
        for m, c in items:
            m = tuple(int(e) for e in m)
            if len(m) != nvars or any(e < 0 for e in m):
                raise DimensionError(f"monomial {m} does not fit {nvars} variables")
            c = as_rational(c)
            if c:
                total = clean.get(m, 0) + c
                if total:
                    clean[m] = total
                else:
                    clean.pop(m, None)
        self.nvars = nvars
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Monomial, Fraction]) -> "Poly":
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, value: Scalar, nvars: int) -> "Poly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def var(cls, index: int, nvars: int) -> "Poly":
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        m = tuple(1 if i == index else 0 for i in range(nvars))
        return cls._raw(nvars, {m: Fraction(1)})

    @classmethod
    def monomial(cls, exponents: Monomial, coeff: Scalar = 1) -> "Poly":
        return cls(len(exponents), {tuple(exponents): coeff})

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, m: Monomial) -> Fraction:
        return self._terms.get(tuple(m), Fraction(0))

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def order(self) -> float | int:
        """Smallest total degree of a nonzero term (``inf`` for zero)."""
        return min((sum(m) for m in self._terms), default=INFINITE)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in decreasing graded-lex order."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_monomial(self) -> Monomial:
        if not self._terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self._terms, key=grlex_key)

    def homogeneous_part(self, degree: int) -> "Poly":
        return Poly._raw(self.nvars, {m: c for m, c in self._terms.items() if sum(m) == degree})

    def truncate(self, degree: int | float) -> "Poly":
        """Drop every term of total degree > ``degree``."""
        if degree == INFINITE:
            return self
        return Poly._raw(self.nvars, {m: c for m, c in self._terms.items() if sum(m) <= degree})

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self._terms}) <= 1

    def variables(self) -> set[int]:
        return {i for m in self._terms for i, e in enumerate(m) if e}

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionError(f"variable-count mismatch: {self.nvars} vs {other.nvars}")
            return other
        return Poly.const(as_rational(other), self.nvars)

    def __add__(self, other) -> "Poly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def scale(self, c: Scalar) -> "Poly":
        c = as_rational(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly._raw(self.nvars, {m: v * c for m, v in self._terms.items()})

    def __mul__(self, other) -> "Poly":
        if isinstance(other, Poly):
            return self.mul(other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def mul(self, other: "Poly", max_degree: int | float = INFINITE) -> "Poly":
        """Product, optionally dropping terms of degree > ``max_degree``."""
        other = self._coerce(other)
        if not self._terms or not other._terms:
            return Poly.zero(self.nvars)
        a, b = self, other
        if len(a._terms) > len(b._terms):
            a, b = b, a
        den_a, ta = _integer_terms(a._terms)
        den_b, tb = _integer_terms(b._terms)
        acc: dict[int, int] = {}
        get = acc.get
        if max_degree == INFINITE:
            for ka, _, ca in ta:
                for kb, _, cb in tb:
                    k = ka + kb
                    acc[k] = get(k, 0) + ca * cb
        else:
            tb.sort(key=lambda t: t[1])
            degs = [t[1] for t in tb]
            for ka, da, ca in ta:
                stop = bisect_right(degs, max_degree - da)
                for kb, _, cb in tb[:stop]:
                    k = ka + kb
                    acc[k] = get(k, 0) + ca * cb
        den = den_a * den_b
        n = self.nvars
        return Poly._raw(n, {_unpack(k, n): Fraction(v, den) for k, v in acc.items() if v})

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Poly.const(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def pow_truncated(self, k: int, max_degree: int | float) -> "Poly":
        result = Poly.const(1, self.nvars).truncate(max_degree)
        base = self.truncate(max_degree)
        while k:
            if k & 1:
                result = result.mul(base, max_degree)
            k >>= 1
            if k:
                base = base.mul(base, max_degree)
        return result

    def derivative(self, var_index: int) -> "Poly":
        if not 0 <= var_index < self.nvars:
            raise IndexError(f"variable index {var_index} out of range for {self.nvars} variables")
        out = {}
        for m, c in self._terms.items():
            e = m[var_index]
            if e:
                out[m[:var_index] + (e - 1,) + m[var_index + 1:]] = c * e
        return Poly._raw(self.nvars, out)

    def gradient(self) -> list["Poly"]:
        return [self.derivative(i) for i in range(self.nvars)]

    def divmod_by(self, divisor: "Poly") -> tuple["Poly", "Poly"]:
        """Multivariate division by a single polynomial in graded-lex order.

        Returns ``(q, r)`` with ``self = q*divisor + r`` and no term of ``r``
        divisible by the leading monomial of ``divisor``; ``r == 0`` exactly
        when ``divisor`` divides ``self``.
        """
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lm = divisor.leading_monomial()
        lc = divisor._terms[lm]
        rest = [(m, c) for m, c in divisor._terms.items() if m != lm]
        work = dict(self._terms)
        quotient: dict[Monomial, Fraction] = {}
        remainder: dict[Monomial, Fraction] = {}
        while work:
            m = max(work, key=grlex_key)
            c = work.pop(m)
            shift = tuple(a - b for a, b in zip(m, lm))
            if min(shift) < 0:
                remainder[m] = c
                continue
            q = c / lc
            quotient[shift] = quotient.get(shift, 0) + q
            for dm, dc in rest:
                t = tuple(a + b for a, b in zip(shift, dm))
                v = work.get(t, 0) - q * dc
                if v:
                    work[t] = v
                else:
                    work.pop(t, None)
        return Poly(self.nvars, quotient), Poly._raw(self.nvars, remainder)

    def evaluate(self, point) -> object:
        """Evaluate at a point; works for any numeric type supporting ``*``/``+``/``**``."""
        if len(point) != self.nvars:
            raise DimensionError("point dimension mismatch")
        total = 0
        for m, c in self._terms.items():
            term = c
            for x, e in zip(point, m):
                if e:
                    term = term * x ** e
            total = total + term
        return total

    def compose(self, images: list["Poly"], max_degree: int | float = INFINITE) -> "Poly":
        """Substitute ``x_i -> images[i]`` (all images share one ring)."""
        if len(images) != self.nvars:
            raise DimensionError("need one image per variable")
        target = images[0].nvars
        if any(p.nvars != target for p in images):
            raise DimensionError("images live in different rings")
        cache: list[dict[int, Poly]] = [{0: Poly.const(1, target)} for _ in images]

        def power(i: int, e: int) -> Poly:
            table = cache[i]
            if e not in table:
                k = max(table)
                while k < e:
                    table[k + 1] = table[k].mul(images[i], max_degree)
                    k += 1
            return table[e]

        acc: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            term = Poly.const(c, target)
            for i, e in enumerate(m):
                if e:
                    term = term.mul(power(i, e), max_degree)
            for tm, tc in term._terms.items():
                acc[tm] = acc.get(tm, 0) + tc
        return Poly(target, acc)

    # -- comparison ---------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._terms == other._terms
        try:
            return self._terms == Poly.const(as_rational(other), self.nvars)._terms
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({self.nvars}, {format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)


def default_names(nvars: int) -> list[str]:
    if nvars <= 3:
        return ["x", "y", "z"][:nvars]
    return [f"x{i + 1}" for i in range(nvars)]


def format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly, names: list[str] | None = None) -> str:
    """Render ascending by degree, ``x`` before ``y`` within a degree.

    Output re-parses with the frontend grammar (explicit ``*`` and ``^``).
    """
    names = names or default_names(p.nvars)
    if p.is_zero():
        return "0"
    pieces = []
    for m, c in sorted(p.items(), key=lambda t: display_key(t[0])):
        factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e]
        mag = abs(c)
        if not factors:
            body = format_rational(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = format_rational(mag) + "*" + "*".join(factors)
        pieces.append(("-" if c < 0 else "+", body))
    sign, body = pieces[0]
    text = ("-" if sign == "-" else "") + body
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text
