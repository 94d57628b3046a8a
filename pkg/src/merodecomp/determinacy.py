"""Finite determinacy of plane curve germs on jets.

Membership in ``m^c * <g_1, ..., g_r>`` is decided degree by degree as an exact
linear system in the coefficients of the multipliers.  A germ ``g`` is
certified ``k``-determined when every monomial of degree ``k + 1`` lies in
``m^2 J(g)``; the conjugation to the ``k``-jet is then built by repeatedly
removing the lowest tail term ``h = a_1 g_x + a_2 g_y`` through the
substitution ``(x, y) -> (x - a_1, y - a_2)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import FractionFreeEliminator, Jet, Poly, monomials_of_degree

_RHS = "rhs"


class NormalizationError(RuntimeError):
    def __init__(self, message: str, degree: int):
        super().__init__(message)
        self.degree = degree


@dataclass(frozen=True)
class MembershipWitness:
    coefficients: tuple[Jet, ...]
    target: Jet
    order: int

    def check(self, generators: Sequence[Jet | Poly]) -> bool:
        """Recompute ``sum a_i g_i`` and compare with the target up to ``order``."""
        total = Poly.zero(self.target.nvars)
        for a, g in zip(self.coefficients, generators):
            gp = g.poly if isinstance(g, Jet) else g
            total = total + a.poly.mul(gp, self.order)
        return total.truncate(self.order) == self.target.poly.truncate(self.order)


@dataclass(frozen=True)
class DeterminacyCertificate:
    k: int
    witnesses: dict
    checked_order: int


@dataclass(frozen=True)
class Conjugation:
    component_maps: tuple[Jet, Jet]
    order: int

    def __post_init__(self):
        for i, c in enumerate(self.component_maps):
            if c.poly.constant_term():
                raise ValueError("conjugation must fix the origin")
            linear = c.poly.homogeneous_part(1)
            if linear != Poly.var(i, len(self.component_maps)):
                raise ValueError("conjugation must be tangent to the identity")

    @classmethod
    def identity(cls, order: int, nvars: int = 2) -> "Conjugation":
        return cls(tuple(Jet(Poly.var(i, nvars), order) for i in range(nvars)), order)

    @property
    def is_identity(self) -> bool:
        return all(c.poly == Poly.var(i, len(self.component_maps)) for i, c in enumerate(self.component_maps))


def _poly(p: Jet | Poly) -> Poly:
    return p.poly if isinstance(p, Jet) else p


class _MembershipSystem:
    """Elimination of ``sum a_i g_i = sum_j t_j h_j`` modulo degrees above ``order``."""

    def __init__(self, generators: Sequence[Poly], order: int, constraint: int, targets: Sequence[Poly]):
        self.generators = list(generators)
        self.nvars = generators[0].nvars
        self.order = order
        self.constraint = constraint
        self.unknowns: list[tuple[int, tuple]] = []
        for i, g in enumerate(self.generators):
            if g.is_zero():
                continue
            top = order - int(g.order())
            for deg in range(constraint, top + 1):
                self.unknowns.extend((i, m) for m in monomials_of_degree(self.nvars, deg))
        rows: dict[tuple, dict] = {}
        for col, (i, m) in enumerate(self.unknowns):
            for gm, c in self.generators[i].items():
                mu = tuple(a + b for a, b in zip(m, gm))
                if sum(mu) <= order:
                    rows.setdefault(mu, {})[col] = c
        for j, h in enumerate(targets):
            for mu, c in h.truncate(order).items():
                rows.setdefault(mu, {})[(_RHS, j)] = -c
        self.elim = FractionFreeEliminator(lambda c: isinstance(c, int))
        self.blocked: set[int] = set()
        for mu in sorted(rows):
            leftover = self.elim.add_row(rows[mu])
            if leftover:
                self.blocked.update(k[1] for k in leftover)
        self.equations = len(rows)

    def witness(self, j: int, target: Poly) -> MembershipWitness | None:
        if j in self.blocked:
            return None
        key = (_RHS, j)
        coeffs = [dict() for _ in self.generators]
        for col, expr in self.elim.solution().items():
            v = expr.get(key, Fraction(0))
            if v:
                i, m = self.unknowns[col]
                coeffs[i][m] = coeffs[i].get(m, 0) + v
        jets = tuple(Jet(Poly(self.nvars, c), self.order) for c in coeffs)
        w = MembershipWitness(jets, Jet(target.truncate(self.order), self.order), self.order)
        if not w.check(self.generators):
            raise AssertionError("membership witness failed re-verification")
        return w


def jet_ideal_membership(
    h: Jet | Poly,
    generators: Sequence[Jet | Poly],
    order: int,
    coefficient_constraint: int = 0,
) -> MembershipWitness | None:
    """Find ``a_i`` of order >= ``coefficient_constraint`` with ``sum a_i g_i = h``
    modulo degrees above ``order``; ``None`` when the truncated system is infeasible.

    Free unknowns are set to zero, so the witness is canonical for the input.
    """
    gens = [_poly(g) for g in generators]
    if not gens:
        raise ValueError("at least one generator is required")
    system = _MembershipSystem(gens, order, coefficient_constraint, [_poly(h)])
    return system.witness(0, _poly(h))


def jacobian_generators(g: Poly) -> list[Poly]:
    return [g.derivative(0), g.derivative(1)]


def _certifies(g: Poly, k: int, order: int) -> dict | None:
    targets = [Poly.monomial(m) for m in monomials_of_degree(2, k + 1)]
    system = _MembershipSystem(jacobian_generators(g), order, 2, targets)
    out = {}
    for j, t in enumerate(targets):
        w = system.witness(j, t)
        if w is None:
            return None
        out[next(iter(t.terms))] = w
    return out


def determinacy_bound(g: Poly | Jet, max_k: int = 12, slack: int = 4,
                      max_escalations: int = 4) -> DeterminacyCertificate | None:
    """Smallest ``k <= max_k`` with ``m^(k+1)`` inside ``m^2 J(g)``.

    Each ``k`` is checked at jet order ``k + 1 + slack`` and again two orders
    higher; the check escalates until two consecutive verdicts agree.
    """
    g = _poly(g)
    if g.nvars != 2:
        raise ValueError("determinacy is implemented for two variables")
    if g.constant_term():
        raise ValueError("g must vanish at the origin")
    for k in range(1, max_k + 1):
        order = k + 1 + slack
        prev = _certifies(g, k, order)
        for _ in range(max_escalations):
            order += 2
            cur = _certifies(g, k, order)
            if (prev is None) == (cur is None):
                break
            prev = cur
        if prev is not None and cur is not None:
            return DeterminacyCertificate(k, cur, order)
    return None


def _compose_map(phi: Sequence[Poly], psi: Sequence[Poly], order: int) -> list[Poly]:
    """Components of ``phi o psi``."""
    return [c.compose(list(psi), order) for c in phi]


def normalize_to_finite_jet(g: Jet | Poly, k: int, order: int) -> tuple[Poly, Conjugation]:
    """Return ``g0 = j^k g`` and ``phi`` tangent to the identity with ``g o phi = g0``
    modulo degrees above ``order``."""
    gp = _poly(g)
    if gp.nvars != 2:
        raise ValueError("normalization is implemented for two variables")
    if isinstance(g, Jet) and g.order < order:
        raise ValueError(f"g is only known to order {g.order}")
    g0 = gp.truncate(k)
    x, y = Poly.var(0, 2), Poly.var(1, 2)
    phi = [x, y]
    current = gp.truncate(order)
    last = k
    while True:
        tail = (current - g0).truncate(order)
        if tail.is_zero():
            break
        d = int(tail.order())
        if d <= last:
            raise NormalizationError(f"tail order did not increase (degree {d})", d)
        last = d
        h = tail.homogeneous_part(d)
        gens = jacobian_generators(current)
        lowest = min(int(p.order()) for p in gens if not p.is_zero())
        witness = None
        for c in range(d - lowest, 1, -1):
            witness = jet_ideal_membership(h, gens, d, c)
            if witness is not None:
                break
        if witness is None:
            raise NormalizationError(f"no witness for the degree-{d} tail term in m^2 J(g)", d)
        a1, a2 = (w.poly for w in witness.coefficients)
        phi = _compose_map(phi, [x - a1, y - a2], order)
        current = gp.compose(phi, order)
    conj = Conjugation(tuple(Jet(c, order) for c in phi), order)
    if not verify_conjugation(Jet(gp, order), g0, conj, order):
        raise AssertionError("conjugation failed re-verification")
    return g0, conj


def verify_conjugation(g: Jet | Poly, g0: Poly, phi: Conjugation, order: int) -> bool:
    gp = _poly(g)
    images = [c.poly for c in phi.component_maps]
    return gp.compose(images, order) == g0.truncate(order)
