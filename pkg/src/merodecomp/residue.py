"""Independent checks of the residues found by the solver.

Restriction to generic lines and planes reduces the question to a univariate
or a two-variable decomposition; the contour integral is a floating-point
cross-check at smooth points of a pole component.
"""
from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import Jet, LinearMapSpec, Poly, jet_inverse_unit
from .decompose import Decomposition, decompose
from .forms import DegeneratePlaneError, DivisorError, MeroOneForm, closedness_check, pullback_form

OK = "ok"
DEGENERATE_PLANE = "degenerate_plane"
SOLVER_FAILED = "solver_failed"


class ResidueError(ValueError):
    pass


class QuadratureError(ResidueError):
    pass


@dataclass(frozen=True)
class PlaneSpec:
    embedding: LinearMapSpec
    label: str = ""

    def __post_init__(self):
        if not self.embedding.has_independent_columns():
            raise ValueError("plane embedding has dependent columns")

    @property
    def dimension(self) -> int:
        return self.embedding.n_source


@dataclass(frozen=True)
class ResidueSample:
    plane: PlaneSpec
    lambdas: tuple[Fraction, ...] | None
    status: str
    detail: str = ""


def univariate_residue_at_origin(P: Poly, Q: Poly, order: int) -> Fraction:
    """Coefficient of ``x^-1`` in the Laurent expansion of ``P/Q`` at 0."""
    if P.nvars != 1 or Q.nvars != 1:
        raise ResidueError("univariate polynomials expected")
    if Q.is_zero():
        raise ResidueError("denominator is zero")
    m = int(Q.order())
    if m == 0:
        raise ResidueError("denominator is a unit; no pole at the origin")
    if order < m - 1:
        raise ResidueError(f"order {order} too low; need at least {m - 1}")
    unit = Poly(1, {(e - m,): c for (e,), c in Q.items()})
    inv = jet_inverse_unit(Jet(unit, m - 1)).poly
    return P.mul(inv, m - 1).coefficient((m - 1,))


def restrict_to_line(p: Poly, direction: Sequence[Fraction]) -> Poly:
    """``u -> p(u * direction)`` as a univariate polynomial."""
    out: dict = {}
    for m, c in p.items():
        v = c
        for x, e in zip(direction, m):
            if e:
                v *= Fraction(x) ** e
        d = (sum(m),)
        out[d] = out.get(d, 0) + v
    return Poly(1, out)


def restrict_to_plane(w: MeroOneForm, plane: PlaneSpec) -> MeroOneForm:
    return pullback_form(w, plane.embedding)


def _line_residue(w: MeroOneForm, direction: Sequence[Fraction]) -> Fraction:
    P = Poly.zero(1)
    for c, v in zip(w.eta.coeffs, direction):
        if v:
            P = P + restrict_to_line(c, direction).scale(v)
    Q = Poly.const(1, 1)
    for f, m in w.divisor.components:
        Q = Q * restrict_to_line(f, direction) ** m
    order = int(Q.order()) - 1
    if w.eta.order is not None and w.eta.order < order:
        raise ResidueError("jet order of eta too low for the line residue")
    return univariate_residue_at_origin(P, Q, max(order, 0))


@dataclass
class LineCheckReport:
    expected: Fraction
    residues: list[tuple[tuple[Fraction, ...], Fraction]] = field(default_factory=list)
    failures: list[tuple[tuple[Fraction, ...], Fraction]] = field(default_factory=list)
    skipped: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures and bool(self.residues)


def _is_generic_direction(w: MeroOneForm, v: Sequence[Fraction]) -> bool:
    for f in w.divisor.functions:
        lowest = f.homogeneous_part(int(f.order()))
        if lowest.evaluate(v) == 0:
            return False
    return True


def line_multiplicity_check(w: MeroOneForm, d: Decomposition, trials: int = 50, seed: int = 0,
                            bound: int = 9) -> LineCheckReport:
    """Residue of ``omega`` on random lines equals ``sum lambda_i * mult(f_i)``."""
    expected = sum((lam * int(f.order()) for lam, f in zip(d.lambdas, w.divisor.functions)), Fraction(0))
    report = LineCheckReport(expected)
    rng = random.Random(seed)
    attempts = 0
    while len(report.residues) < trials and attempts < 20 * trials:
        attempts += 1
        v = tuple(Fraction(rng.randint(-bound, bound)) for _ in range(w.nvars))
        if not any(v) or not _is_generic_direction(w, v):
            report.skipped += 1
            continue
        res = _line_residue(w, v)
        report.residues.append((v, res))
        if res != expected:
            report.failures.append((v, res))
    if not report.residues:
        raise ResidueError("all sampled lines were degenerate")
    return report


@dataclass
class PencilReport:
    axis: tuple[Fraction, ...]
    samples: list[ResidueSample]
    verdict: str
    violation: tuple[int, int] | None = None

    @property
    def usable(self) -> list[ResidueSample]:
        return [s for s in self.samples if s.status == OK]

    @property
    def lambdas(self) -> tuple[Fraction, ...] | None:
        usable = self.usable
        return usable[0].lambdas if usable else None


def _random_vector(rng: random.Random, n: int, bound: int) -> list[Fraction]:
    return [Fraction(rng.randint(-bound, bound)) for _ in range(n)]


def pencil_planes(n: int, samples: int, seed: int, bound: int = 5) -> tuple[tuple[Fraction, ...], list[PlaneSpec]]:
    """Rational 2-planes ``span(a, b0 + t b1)`` through a random axis ``a``."""
    rng = random.Random(seed)
    while True:
        a = _random_vector(rng, n, bound)
        b0 = _random_vector(rng, n, bound)
        b1 = _random_vector(rng, n, bound)
        if LinearMapSpec.from_columns([a, b0, b1]).rank() == 3:
            break
    planes = []
    used = set()
    while len(planes) < samples:
        t = Fraction(rng.randint(-20, 20), rng.randint(1, 7))
        if t in used:
            continue
        used.add(t)
        b = [x + t * y for x, y in zip(b0, b1)]
        planes.append(PlaneSpec(LinearMapSpec.from_columns([a, b]), label=f"t={t}"))
    return tuple(a), planes


def _restricted_sample(w: MeroOneForm, plane: PlaneSpec, order: int, seed: int) -> ResidueSample:
    try:
        divisor = w.divisor.substitute(plane.embedding)
    except DegeneratePlaneError as exc:
        return ResidueSample(plane, None, DEGENERATE_PLANE, str(exc))
    bad = divisor.pairwise_coprime(trials=2, seed=seed)
    if bad:
        return ResidueSample(plane, None, DEGENERATE_PLANE, "restricted components share a factor")
    s = int(divisor.reduced_equation().order())
    cap = order + 2 + s - 1
    if w.eta.order is not None:
        cap = min(cap, w.eta.order)
    eta = pullback_form(w.eta.truncate(cap), plane.embedding)
    restricted = MeroOneForm(eta, divisor)
    if not closedness_check(restricted).closed:
        return ResidueSample(plane, None, SOLVER_FAILED, "restriction is not closed")
    try:
        dec, rep = decompose(restricted, order, check_closed=False, check_coprime=False)
    except DivisorError as exc:
        return ResidueSample(plane, None, DEGENERATE_PLANE, str(exc))
    if not rep.solved:
        return ResidueSample(plane, None, SOLVER_FAILED, f"{rep.status}: {rep.message}")
    return ResidueSample(plane, dec.lambdas, OK)


def pencil_constancy_check(w: MeroOneForm, samples: int = 10, seed: int = 0, order: int = 10) -> PencilReport:
    """Decompose the restriction to each plane of a pencil and compare residues."""
    if w.nvars < 3:
        raise ResidueError("pencil check needs at least 3 variables")
    axis, planes = pencil_planes(w.nvars, samples, seed)
    results = [_restricted_sample(w, plane, order, seed + i) for i, plane in enumerate(planes)]
    usable = [i for i, s in enumerate(results) if s.status == OK]
    if len(usable) < 2:
        raise ResidueError(f"only {len(usable)} usable pencil samples")
    first = usable[0]
    for j in usable[1:]:
        if results[j].lambdas != results[first].lambdas:
            return PencilReport(axis, results, "violated", (first, j))
    return PencilReport(axis, results, "constant")


class _Evaluator:
    """Vectorized complex evaluation of a polynomial."""

    def __init__(self, p: Poly):
        items = list(p.items())
        self.exps = np.array([m for m, _ in items], dtype=float).reshape(len(items), p.nvars)
        self.coeffs = np.array([float(c) for _, c in items], dtype=complex)

    def __call__(self, Z: np.ndarray) -> np.ndarray:
        if not len(self.coeffs):
            return np.zeros(Z.shape[0], dtype=complex)
        powers = np.prod(Z[:, None, :] ** self.exps[None, :, :], axis=2)
        return powers @ self.coeffs


def _contour(w: MeroOneForm, point: np.ndarray, direction: np.ndarray, radius: float, nodes: int) -> complex:
    theta = 2 * math.pi * np.arange(nodes) / nodes
    e = np.exp(1j * theta)
    Z = point[None, :] + radius * e[:, None] * direction[None, :]
    num = np.zeros(nodes, dtype=complex)
    for c, v in zip(w.eta.coeffs, direction):
        if v != 0 and not c.is_zero():
            num += _Evaluator(c)(Z) * v
    den = np.ones(nodes, dtype=complex)
    for f, m in w.divisor.components:
        den *= _Evaluator(f)(Z) ** m
    return complex(radius * np.sum(e * num / den) / nodes)


def numeric_contour_residue(
    w: MeroOneForm,
    component: int,
    point: Sequence[complex],
    transversal: Sequence[complex] | None = None,
    radius: float = 0.05,
    points: int = 512,
) -> complex:
    """Trapezoid estimate of ``(1/2 pi i) \\oint omega`` on a small circle
    ``theta -> point + radius e^(i theta) transversal`` around ``f_component = 0``."""
    f = w.divisor.functions[component]
    p = np.array([complex(z) for z in point], dtype=complex)
    if len(p) != w.nvars:
        raise ResidueError("point has the wrong dimension")
    value = complex(_Evaluator(f)(p[None, :])[0])
    if abs(value) >= 1e-12:
        raise ResidueError(f"point is not on the pole component (|f| = {abs(value):.3e})")
    grad = np.array([complex(_Evaluator(f.derivative(k))(p[None, :])[0]) for k in range(w.nvars)])
    if np.linalg.norm(grad) < 1e-12:
        raise ResidueError("pole component is singular at the point")
    if transversal is None:
        v = np.conj(grad) / np.linalg.norm(grad)
    else:
        v = np.array([complex(z) for z in transversal], dtype=complex)
    if abs(np.dot(grad, v)) < 1e-12:
        raise ResidueError("transversal direction is tangent to the pole component")
    estimate = _contour(w, p, v, radius, points)
    finer = _contour(w, p, v, radius, 2 * points)
    if not (cmath.isfinite(estimate) and cmath.isfinite(finer)) or abs(finer - estimate) > 1e-6:
        raise QuadratureError(f"quadrature did not converge (change {abs(finer - estimate):.3e} on doubling)")
    return estimate


def contour_estimate(w: MeroOneForm, component: int, point, transversal, radius: float, points: int) -> complex:
    """Single trapezoid evaluation without the convergence guard."""
    v = np.array([complex(z) for z in transversal], dtype=complex)
    return _contour(w, np.array([complex(z) for z in point]), v, radius, points)
