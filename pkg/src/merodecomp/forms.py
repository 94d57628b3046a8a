"""Polynomial and jet-valued differential forms, pole divisors and meromorphic 1-forms.

A form carries an optional validity ``order``: ``None`` means the coefficients
are exact polynomials, an integer ``N`` means only total degrees ``<= N`` are
meaningful (jet-valued form).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import (
    INFINITE,
    DimensionError,
    Jet,
    LinearMapSpec,
    Poly,
    as_rational,
    coprimality_probe,
    substitute_linear,
)
from .algebra.coprime import COMMON_FACTOR_DETECTED


class DegeneratePlaneError(ValueError):
    """A pole component restricts identically to zero."""


class DivisorError(ValueError):
    """A pole divisor violates its invariants."""


def _min_order(*orders: int | None) -> int | None:
    known = [o for o in orders if o is not None]
    return min(known) if known else None


def _cap(order: int | None) -> float | int:
    return INFINITE if order is None else order


@dataclass(frozen=True)
class OneForm:
    coeffs: tuple[Poly, ...]
    order: int | None = None

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if not coeffs:
            raise DimensionError("a 1-form needs at least one coefficient")
        n = coeffs[0].nvars
        if len(coeffs) != n or any(c.nvars != n for c in coeffs):
            raise DimensionError("a 1-form on C^n has n coefficients in n variables")
        if self.order is not None:
            coeffs = tuple(c.truncate(self.order) for c in coeffs)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_jets(cls, jets: Sequence[Jet]) -> "OneForm":
        order = min(j.order for j in jets)
        return cls(tuple(j.poly for j in jets), order)

    @classmethod
    def zero(cls, nvars: int, order: int | None = None) -> "OneForm":
        return cls(tuple(Poly.zero(nvars) for _ in range(nvars)), order)

    @classmethod
    def differential(cls, h: Poly | Jet) -> "OneForm":
        """``dh``, the gradient as a 1-form."""
        if isinstance(h, Jet):
            return cls(tuple(h.poly.derivative(k) for k in range(h.nvars)), h.order - 1)
        return cls(tuple(h.gradient()))

    @classmethod
    def basis(cls, k: int, nvars: int) -> "OneForm":
        return cls(tuple(Poly.const(1 if i == k else 0, nvars) for i in range(nvars)))

    @property
    def nvars(self) -> int:
        return self.coeffs[0].nvars

    def jets(self) -> tuple[Jet, ...]:
        if self.order is None:
            raise ValueError("exact form has no jet order")
        return tuple(Jet(c, self.order) for c in self.coeffs)

    def truncate(self, order: int) -> "OneForm":
        return OneForm(self.coeffs, min(order, _cap(self.order)))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __add__(self, other: "OneForm") -> "OneForm":
        if other.nvars != self.nvars:
            raise DimensionError("dimension mismatch")
        return OneForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), _min_order(self.order, other.order))

    def __neg__(self) -> "OneForm":
        return OneForm(tuple(-c for c in self.coeffs), self.order)

    def __sub__(self, other: "OneForm") -> "OneForm":
        return self + (-other)

    def scale(self, c) -> "OneForm":
        return OneForm(tuple(p.scale(c) for p in self.coeffs), self.order)

    def times(self, h: Poly) -> "OneForm":
        """Multiply by a polynomial function (exact ``h`` keeps the order)."""
        cap = _cap(self.order)
        return OneForm(tuple(c.mul(h, cap) for c in self.coeffs), self.order)

    def contract(self, vector: Sequence[Poly]) -> Poly:
        """Interior product with a polynomial vector field."""
        total = Poly.zero(self.nvars)
        for c, v in zip(self.coeffs, vector):
            total = total + c * v
        return total


@dataclass(frozen=True)
class TwoForm:
    nvars: int
    coeffs: dict = field(default_factory=dict)
    order: int | None = None

    def __post_init__(self):
        clean = {}
        for (j, k), p in self.coeffs.items():
            if j == k:
                continue
            if j > k:
                j, k, p = k, j, -p
            if self.order is not None:
                p = p.truncate(self.order)
            if not p.is_zero():
                clean[(j, k)] = clean.get((j, k), Poly.zero(self.nvars)) + p
        object.__setattr__(self, "coeffs", {key: p for key, p in clean.items() if not p.is_zero()})

    def coefficient(self, j: int, k: int) -> Poly:
        if j == k:
            return Poly.zero(self.nvars)
        if j > k:
            return -self.coefficient(k, j)
        return self.coeffs.get((j, k), Poly.zero(self.nvars))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, TwoForm):
            return NotImplemented
        return self.nvars == other.nvars and self.coeffs == other.coeffs and self.order == other.order

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.coeffs.items()), self.order))

    def __neg__(self) -> "TwoForm":
        return TwoForm(self.nvars, {k: -p for k, p in self.coeffs.items()}, self.order)

    def __add__(self, other: "TwoForm") -> "TwoForm":
        if other.nvars != self.nvars:
            raise DimensionError("dimension mismatch")
        out = dict(self.coeffs)
        for key, p in other.coeffs.items():
            out[key] = out.get(key, Poly.zero(self.nvars)) + p
        return TwoForm(self.nvars, out, _min_order(self.order, other.order))

    def __sub__(self, other: "TwoForm") -> "TwoForm":
        return self + (-other)

    def truncate(self, order: int) -> "TwoForm":
        return TwoForm(self.nvars, self.coeffs, min(order, _cap(self.order)))


def exterior_derivative(w: OneForm) -> TwoForm:
    """``d(sum a_k dx_k)``: coefficient of ``dx_j^dx_k`` is ``d_j a_k - d_k a_j``."""
    n = w.nvars
    coeffs = {}
    for j in range(n):
        for k in range(j + 1, n):
            coeffs[(j, k)] = w.coeffs[k].derivative(j) - w.coeffs[j].derivative(k)
    order = None if w.order is None else w.order - 1
    return TwoForm(n, coeffs, order)


def wedge(a: OneForm, b: OneForm) -> TwoForm:
    if a.nvars != b.nvars:
        raise DimensionError("dimension mismatch")
    order = _min_order(a.order, b.order)
    cap = _cap(order)
    n = a.nvars
    coeffs = {}
    for j in range(n):
        for k in range(j + 1, n):
            coeffs[(j, k)] = a.coeffs[j].mul(b.coeffs[k], cap) - a.coeffs[k].mul(b.coeffs[j], cap)
    return TwoForm(n, coeffs, order)


@dataclass(frozen=True)
class PoleDivisor:
    """Factored pole divisor ``prod f_i^(m_i)`` with ``m_i = n_i + 1 >= 1``."""

    components: tuple[tuple[Poly, int], ...]

    def __post_init__(self):
        comps = tuple((f, int(m)) for f, m in self.components)
        if not comps:
            raise DivisorError("a pole divisor needs at least one component")
        n = comps[0][0].nvars
        for i, (f, m) in enumerate(comps):
            if f.nvars != n:
                raise DimensionError("pole components live in different rings")
            if f.is_zero():
                raise DivisorError(f"pole component {i + 1} is zero")
            if f.constant_term():
                raise DivisorError(f"pole component {i + 1} is a unit (does not vanish at the origin)")
            if m < 1:
                raise DivisorError(f"pole multiplicity must be >= 1, got {m}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, *pairs: tuple[Poly, int]) -> "PoleDivisor":
        return cls(tuple(pairs))

    @property
    def nvars(self) -> int:
        return self.components[0][0].nvars

    @property
    def functions(self) -> list[Poly]:
        return [f for f, _ in self.components]

    @property
    def multiplicities(self) -> list[int]:
        return [m for _, m in self.components]

    @property
    def exponents(self) -> list[int]:
        """``n_i = m_i - 1``."""
        return [m - 1 for _, m in self.components]

    def __len__(self) -> int:
        return len(self.components)

    def product(self, shift: int = 0, skip: int | None = None, max_degree=INFINITE) -> Poly:
        """``prod_j f_j^(n_j + shift)``, optionally leaving out component ``skip``."""
        out = Poly.const(1, self.nvars)
        for j, (f, m) in enumerate(self.components):
            if j == skip:
                continue
            e = m - 1 + shift
            if e:
                out = out.mul(f.pow_truncated(e, max_degree), max_degree)
        return out

    def reduced_equation(self, max_degree=INFINITE) -> Poly:
        """``g = f_1 ... f_p``."""
        out = Poly.const(1, self.nvars)
        for f in self.functions:
            out = out.mul(f, max_degree)
        return out

    def exact_denominator(self, max_degree=INFINITE) -> Poly:
        """``F = prod f_i^(n_i)``, the denominator of the exact part."""
        return self.product(0, max_degree=max_degree)

    def denominator(self, max_degree=INFINITE) -> Poly:
        """``F+ = prod f_i^(n_i + 1)``."""
        return self.product(1, max_degree=max_degree)

    def substitute(self, linear_map: LinearMapSpec) -> "PoleDivisor":
        comps = []
        for i, (f, m) in enumerate(self.components):
            fr = substitute_linear(f, linear_map)
            if fr.is_zero():
                raise DegeneratePlaneError(f"pole component {i + 1} vanishes identically on the plane")
            comps.append((fr, m))
        return PoleDivisor(tuple(comps))

    def pairwise_coprime(self, trials: int = 3, seed: int = 0) -> list[tuple[int, int]]:
        """Index pairs (0-based) whose components are detected to share a factor."""
        bad = []
        fs = self.functions
        for i in range(len(fs)):
            for j in range(i + 1, len(fs)):
                if coprimality_probe(fs[i], fs[j], trials, seed) == COMMON_FACTOR_DETECTED:
                    bad.append((i, j))
        return bad


@dataclass(frozen=True)
class MeroOneForm:
    """``omega = eta / F+`` with the divisor kept in factored form."""

    eta: OneForm
    divisor: PoleDivisor

    def __post_init__(self):
        if self.eta.nvars != self.divisor.nvars:
            raise DimensionError("numerator and divisor live in different dimensions")

    @property
    def nvars(self) -> int:
        return self.eta.nvars

    @property
    def order(self) -> int | None:
        return self.eta.order

    def truncate(self, order: int) -> "MeroOneForm":
        return MeroOneForm(self.eta.truncate(order), self.divisor)


@dataclass(frozen=True)
class ClosednessResult:
    status: str
    witness: TwoForm | None = None
    valid_order: int | None = None

    @property
    def closed(self) -> bool:
        return self.status == "closed"


def _log_derivative_numerator(divisor: PoleDivisor, weights: Sequence[int], max_degree=INFINITE) -> list[Poly]:
    """Coefficients of ``sum_i w_i (g/f_i) df_i``."""
    n = divisor.nvars
    out = [Poly.zero(n) for _ in range(n)]
    fs = divisor.functions
    for i, f in enumerate(fs):
        if not weights[i]:
            continue
        cofactor = Poly.const(weights[i], n)
        for j, h in enumerate(fs):
            if j != i:
                cofactor = cofactor.mul(h, max_degree)
        for k in range(n):
            out[k] = out[k] + cofactor.mul(f.derivative(k), max_degree)
    return out


def closedness_check(w: MeroOneForm) -> ClosednessResult:
    """Decide ``d(eta/F+) = 0`` through ``F+ d(eta) - dF+ ^ eta``.

    The decision uses the equivalent identity divided by ``F+/g`` (smaller
    products); the reported witness is the full cleared-denominator 2-form.
    """
    div = w.divisor
    eta = w.eta
    g = div.reduced_equation()
    s = g.order()
    cap = INFINITE if eta.order is None else eta.order - 1 + s
    weights = div.multiplicities
    log_num = OneForm(tuple(_log_derivative_numerator(div, weights, cap)))
    d_eta = exterior_derivative(eta)
    n = w.nvars
    reduced = {}
    for (j, k), p in d_eta.coeffs.items():
        reduced[(j, k)] = p.mul(g, cap)
    wedge_part = {}
    for j in range(n):
        for k in range(j + 1, n):
            wedge_part[(j, k)] = (log_num.coeffs[j].mul(eta.coeffs[k], cap)
                                  - log_num.coeffs[k].mul(eta.coeffs[j], cap))
    total = {}
    for key in set(reduced) | set(wedge_part):
        p = reduced.get(key, Poly.zero(n)) - wedge_part.get(key, Poly.zero(n))
        if cap != INFINITE:
            p = p.truncate(cap)
        total[key] = p
    reduced_form = TwoForm(n, total)
    full_order = None if eta.order is None else eta.order - 1 + div.denominator().order()
    if reduced_form.is_zero():
        return ClosednessResult("closed", None, full_order)
    # F+/g = prod f_i^(n_i)
    cofactor = div.exact_denominator()
    full_cap = INFINITE if full_order is None else full_order
    witness = TwoForm(n, {key: p.mul(cofactor, full_cap) for key, p in reduced_form.coeffs.items()}, full_order)
    return ClosednessResult("not_closed", witness, full_order)


def pullback_form(w: OneForm | MeroOneForm, linear_map: LinearMapSpec) -> OneForm | MeroOneForm:
    """Pull back along ``u -> M u``: ``dx_k -> sum_a M[k][a] du_a``."""
    if isinstance(w, MeroOneForm):
        divisor = w.divisor.substitute(linear_map)
        return MeroOneForm(pullback_form(w.eta, linear_map), divisor)
    if w.nvars != linear_map.n_target:
        raise DimensionError("form and map dimensions differ")
    m = linear_map.n_source
    pulled = []
    for k, c in enumerate(w.coeffs):
        if w.order is None:
            pulled.append(substitute_linear(c, linear_map))
        else:
            pulled.append(substitute_linear(Jet(c, w.order), linear_map).poly)
    coeffs = []
    for a in range(m):
        total = Poly.zero(m)
        for k in range(w.nvars):
            entry = linear_map.matrix[k][a]
            if entry and not pulled[k].is_zero():
                total = total + pulled[k].scale(entry)
        coeffs.append(total)
    return OneForm(tuple(coeffs), w.order)


def master_identity(
    lambdas: Sequence, G: Poly, divisor: PoleDivisor, max_degree=INFINITE
) -> list[Poly]:
    """Numerator ``eta`` of ``sum lambda_i df_i/f_i + d(G/F)`` over ``F+``.

    eta = sum_i lambda_i (F+/f_i) df_i + g dG - G sum_i n_i (g/f_i) df_i
    """
    n = divisor.nvars
    if len(lambdas) != len(divisor):
        raise ValueError(f"expected {len(divisor)} residues, got {len(lambdas)}")
    lambdas = [as_rational(v) for v in lambdas]
    eta = [Poly.zero(n) for _ in range(n)]
    fs = divisor.functions
    for i, lam in enumerate(lambdas):
        if not lam:
            continue
        cofactor = divisor.product(1, skip=i, max_degree=max_degree)
        cofactor = cofactor.mul(fs[i].pow_truncated(divisor.exponents[i], max_degree), max_degree).scale(lam)
        for k in range(n):
            eta[k] = eta[k] + cofactor.mul(fs[i].derivative(k), max_degree)
    if not G.is_zero():
        g = divisor.reduced_equation(max_degree)
        shift = _log_derivative_numerator(divisor, divisor.exponents, max_degree)
        for k in range(n):
            eta[k] = eta[k] + g.mul(G.derivative(k), max_degree) - G.mul(shift[k], max_degree)
    return eta


def synthesize_form(lambdas: Sequence, G: Poly | Jet, divisor: PoleDivisor) -> MeroOneForm:
    """Build the closed form ``sum lambda_i df_i/f_i + d(G/F)`` as ``eta/F+``."""
    if len(lambdas) != len(divisor):
        raise ValueError(f"expected {len(divisor)} residues, got {len(lambdas)}")
    if isinstance(G, Jet):
        s = divisor.reduced_equation().order()
        order = G.order + s - 1
        eta = master_identity(lambdas, G.poly, divisor, order)
        return MeroOneForm(OneForm(tuple(eta), order), divisor)
    return MeroOneForm(OneForm(tuple(master_identity(lambdas, G, divisor))), divisor)
