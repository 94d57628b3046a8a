"""Residues and exact part of a closed meromorphic 1-form.

Given ``omega = eta / prod f_i^(n_i+1)`` closed, find rationals ``lambda_i`` and
a jet ``G`` with

    omega = sum_i lambda_i df_i/f_i + d(G / prod f_i^(n_i)).

After clearing denominators the identity is linear in ``(lambda, G)``.  It is
solved one homogeneous degree of ``G`` at a time.  With ``g = prod f_i`` of
order ``s`` and ``F = prod f_i^(n_i)`` of order ``r``, the degree-``d`` part of
``G`` enters the numerator first in degree ``d + s - 1`` through

    L_d(G_d) = g_s dG_d - G_d H_(s-1),     H = sum_i n_i (g/f_i) df_i,

and contracting with the Euler field gives ``(d - r) g_s G_d``.  For ``d != r``
the degree-``d`` part is therefore an exact quotient by ``g_s``; at ``d = r``
the map has the one-dimensional kernel spanned by the leading form of ``F``
and a small exact linear solve is done instead.  Unknown residues are carried
as symbolic parameters until the accumulated constraints determine them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import INFINITE, FractionFreeEliminator, Jet, Monomial, Poly, grlex_key, monomials_of_degree
from .forms import (
    ClosednessResult,
    DivisorError,
    MeroOneForm,
    OneForm,
    PoleDivisor,
    _log_derivative_numerator,
    closedness_check,
    master_identity,
)

SOLVED = "solved"
INCONSISTENT = "inconsistent"
ORDER_TOO_LOW = "order_too_low"

CONST = -1  # column of the constant term in affine expressions

Affine = dict[int, Poly]  # parameter id (or CONST) -> polynomial coefficient


class NotClosedError(ValueError):
    """The input form is not closed; carries the closedness witness."""

    def __init__(self, result: ClosednessResult):
        super().__init__("input form is not closed: F+ d(eta) - dF+ ^ eta != 0")
        self.result = result


@dataclass(frozen=True)
class Decomposition:
    lambdas: tuple[Fraction, ...]
    G: Jet
    normalization: Monomial | None
    valid_order: int
    g_is_polynomial: bool = False

    @property
    def order(self) -> int:
        return self.G.order


@dataclass(frozen=True)
class SolveReport:
    status: str
    residual: OneForm
    equations: int
    unknowns: int
    lambda_stable_from_order: int | None = None
    message: str = ""

    @property
    def solved(self) -> bool:
        return self.status == SOLVED


def normalization_monomial(F: Poly, max_degree: int) -> Monomial | None:
    """Graded-lex leading monomial of ``F``, restricted to degrees <= ``max_degree``."""
    candidates = [m for m in F.terms if sum(m) <= max_degree]
    return max(candidates, key=grlex_key) if candidates else None


def renormalize(G: Poly, F: Poly, monomial: Monomial, max_degree: int | float = INFINITE) -> Poly:
    """Subtract the multiple of ``F`` that zeroes ``G``'s coefficient at ``monomial``."""
    c = F.coefficient(monomial)
    if not c:
        raise ValueError("normalization monomial does not occur in F")
    t = G.coefficient(monomial) / c
    if not t:
        return G.truncate(max_degree)
    return (G - F.scale(t)).truncate(max_degree)


def _parts(p: Poly, top: int | float) -> dict[int, Poly]:
    out: dict[int, dict] = {}
    for m, c in p.items():
        d = sum(m)
        if d <= top:
            out.setdefault(d, {})[m] = c
    return {d: Poly(p.nvars, t) for d, t in out.items()}


def _aff_add(target: Affine, key: int, p: Poly, sign: int = 1) -> None:
    if p.is_zero():
        return
    cur = target.get(key)
    new = (p if sign > 0 else -p) if cur is None else (cur + p if sign > 0 else cur - p)
    if new.is_zero():
        target.pop(key, None)
    else:
        target[key] = new


def _aff_constraints(aff_parts: Sequence[Affine]) -> list[dict[int, Fraction]]:
    """One linear constraint per monomial appearing in any of the affine polynomials."""
    rows: dict[tuple, dict[int, Fraction]] = {}
    for idx, aff in enumerate(aff_parts):
        for key, p in aff.items():
            for m, c in p.items():
                rows.setdefault((idx, m), {})[key] = c
    return list(rows.values())


@dataclass
class _Raw:
    status: str
    lambdas: tuple[Fraction, ...] | None
    G: Poly
    g_order: int
    eq_order: int
    normalization: Monomial | None
    equations: int
    unknowns: int
    determined_at: int | None
    message: str = ""
    residual: OneForm | None = None
    extras: dict = field(default_factory=dict)


class _DegreeSolver:
    def __init__(self, w: MeroOneForm, order: int):
        self.w = w
        div = w.divisor
        self.n = n = w.nvars
        self.p = len(div)
        g_full = div.reduced_equation()
        self.s = s = g_full.order()
        self.r = sum(e * f.order() for f, e in zip(div.functions, div.exponents))
        E = order + s - 1
        if w.eta.order is not None:
            E = min(E, w.eta.order)
        self.E = E
        self.N = E - s + 1
        self.F = div.exact_denominator()
        self.g_parts = _parts(g_full, E + 1)
        H = _log_derivative_numerator(div, div.exponents, E)
        self.H_parts = [_parts(h, E) for h in H]
        self.eta_parts = [_parts(c, E) for c in w.eta.coeffs]
        self.lam_parts = []
        for i, f in enumerate(div.functions):
            cof = div.product(1, skip=i, max_degree=E)
            cof = cof.mul(f.pow_truncated(div.exponents[i], E), E)
            self.lam_parts.append([_parts(cof.mul(f.derivative(k), E), E) for k in range(n)])
        self.params = FractionFreeEliminator(lambda c: c != CONST)
        self.values: dict[int, Fraction] = {}
        self.next_param = self.p
        self.G_parts: dict[int, Affine] = {}
        self.inconsistent = False
        self.message = ""

    # -- parameter bookkeeping -------------------------------------
    def _constrain(self, rows: list[dict[int, Fraction]]) -> None:
        for row in rows:
            row = self._substitute_row(row)
            if not row:
                continue
            left = self.params.add_row(row)
            if left:
                self.inconsistent = True
        self._refresh_values()

    def _substitute_row(self, row: dict[int, Fraction]) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for key, c in row.items():
            if key in self.values:
                out[CONST] = out.get(CONST, 0) + c * self.values[key]
            else:
                out[key] = out.get(key, 0) + c
        return {k: v for k, v in out.items() if v}

    def _refresh_values(self) -> None:
        changed = False
        for col, expr in self.params.solution().items():
            if col in self.values:
                continue
            if all(k == CONST for k in expr):
                self.values[col] = expr.get(CONST, Fraction(0))
                changed = True
        if changed:
            for d, aff in self.G_parts.items():
                self.G_parts[d] = self._substitute_aff(aff)

    def _substitute_aff(self, aff: Affine) -> Affine:
        out: Affine = {}
        for key, p in aff.items():
            if key in self.values:
                val = self.values[key]
                if val:
                    _aff_add(out, CONST, p.scale(val))
            else:
                _aff_add(out, key, p)
        return out

    def lambdas_known(self) -> bool:
        return all(i in self.values for i in range(self.p))

    # -- the degree loop --------------------------------------------
    def rhs(self, d: int) -> list[Affine]:
        """Degree-``e`` numerator equations with everything but ``G_d`` moved right."""
        e = d + self.s - 1
        out: list[Affine] = []
        for k in range(self.n):
            aff: Affine = {}
            _aff_add(aff, CONST, self.eta_parts[k].get(e, Poly.zero(self.n)))
            for i in range(self.p):
                part = self.lam_parts[i][k].get(e)
                if part is None:
                    continue
                if i in self.values:
                    if self.values[i]:
                        _aff_add(aff, CONST, part.scale(self.values[i]), -1)
                else:
                    _aff_add(aff, i, part, -1)
            for dp, gaff in self.G_parts.items():
                gpart = self.g_parts.get(e - dp + 1)
                hpart = self.H_parts[k].get(e - dp)
                for key, Gp in gaff.items():
                    if gpart is not None:
                        _aff_add(aff, key, gpart * Gp.derivative(k), -1)
                    if hpart is not None:
                        _aff_add(aff, key, Gp * hpart)
            out.append(aff)
        return out

    def leading(self, Gd: Poly, k: int) -> Poly:
        gs = self.g_parts[self.s]
        out = gs * Gd.derivative(k)
        h = self.H_parts[k].get(self.s - 1)
        if h is not None:
            out = out - Gd * h
        return out

    def solve_generic(self, d: int, R: list[Affine]) -> Affine:
        gs = self.g_parts[self.s]
        scale = Fraction(1, d - self.r)
        keys = set().union(*R)
        Gd: Affine = {}
        for key in keys:
            Q = Poly.zero(self.n)
            for k in range(self.n):
                part = R[k].get(key)
                if part is not None:
                    Q = Q + part * Poly.var(k, self.n)
            q, _ = Q.divmod_by(gs)
            _aff_add(Gd, key, q.scale(scale))
        residual = []
        for k in range(self.n):
            res = dict(R[k])
            for key, Gp in Gd.items():
                _aff_add(res, key, self.leading(Gp, k), -1)
            residual.append(res)
        self._constrain(_aff_constraints(residual))
        return Gd

    def solve_kernel_block(self, d: int, R: list[Affine]) -> Affine:
        mons = monomials_of_degree(self.n, d)
        rows: dict[tuple, dict] = {}
        for u in mons:
            xu = Poly.monomial(u)
            for k in range(self.n):
                for m, c in self.leading(xu, k).items():
                    rows.setdefault((k, m), {})[("G", u)] = c
        for k in range(self.n):
            for key, p in R[k].items():
                for m, c in p.items():
                    rows.setdefault((k, m), {})[key] = -c
        block = FractionFreeEliminator(lambda c: isinstance(c, tuple))
        leftovers = []
        for row in rows.values():
            left = block.add_row(row)
            if left:
                leftovers.append({k: Fraction(v) for k, v in left.items()})
        self._constrain(leftovers)
        Gd: Affine = {}
        free = {}
        for u in mons:
            if ("G", u) not in block.rows:
                free[("G", u)] = self.next_param
                _aff_add(Gd, self.next_param, Poly.monomial(u))
                self.next_param += 1
        for (_, u), expr in block.solution().items():
            for key, coef in expr.items():
                pid = free.get(key, key)
                _aff_add(Gd, pid, Poly.monomial(u, coef))
        return self._substitute_aff(Gd)

    def run(self) -> _Raw:
        n = self.n
        for e in range(0, min(self.s - 1, self.E + 1)):
            rows = [{CONST: c} for k in range(n) for c in self.eta_parts[k].get(e, Poly.zero(n)).terms.values()]
            if rows:
                self._constrain(rows)
        norm = normalization_monomial(self.F, self.N) if self.r <= self.N else None
        determined_at = None
        for d in range(0, self.N + 1):
            R = self.rhs(d)
            if d == self.r:
                Gd = self.solve_kernel_block(d, R)
            else:
                Gd = self.solve_generic(d, R)
            self.G_parts[d] = Gd
            if norm is not None and sum(norm) == d:
                row = {key: p.coefficient(norm) for key, p in Gd.items()}
                self._constrain([{k: v for k, v in row.items() if v}])
            self.G_parts[d] = self._substitute_aff(self.G_parts[d])
            if determined_at is None and self.lambdas_known():
                determined_at = d
        return self._finish(norm, determined_at)

    def _finish(self, norm, determined_at) -> _Raw:
        n = self.n
        eq = n * sum(len(monomials_of_degree(n, e)) for e in range(self.E + 1))
        unk = self.p + sum(len(monomials_of_degree(n, d)) for d in range(self.N + 1))
        lambdas = tuple(self.values.get(i, Fraction(0)) for i in range(self.p))
        G = Poly.zero(n)
        for aff in self.G_parts.values():
            for key, p in aff.items():
                if key == CONST:
                    G = G + p
                elif self.values.get(key):
                    G = G + p.scale(self.values[key])
        status = SOLVED
        message = ""
        if self.inconsistent:
            status = INCONSISTENT
            message = (
                "the cleared-denominator identity has no solution; a pole component may be "
                "reducible with branch-dependent residues, or eta is corrupted"
            )
        elif not self.lambdas_known():
            status = ORDER_TOO_LOW
            message = f"residues are not determined by the equations up to degree {self.E}"
        synth = master_identity(lambdas, G, self.w.divisor, self.E)
        residual = OneForm(tuple(a - b for a, b in zip(self.w.eta.coeffs, synth)), self.E)
        if status == SOLVED and not residual.is_zero():
            status = INCONSISTENT
            message = "recomputed numerator differs from the input"
        return _Raw(status, lambdas, G, self.N, self.E, norm, eq, unk, determined_at, message, residual)


def _solve(w: MeroOneForm, order: int) -> _Raw:
    solver = _DegreeSolver(w, order)
    if solver.N < 0:
        zero = OneForm.zero(w.nvars, max(solver.E, 0))
        return _Raw(ORDER_TOO_LOW, None, Poly.zero(w.nvars), solver.N, solver.E, None, 0, 0, None,
                    "jet order of eta is below the first equation degree", zero)
    return solver.run()


def decompose(
    w: MeroOneForm,
    order: int = 10,
    *,
    check_closed: bool = True,
    check_coprime: bool = True,
    seed: int = 0,
) -> tuple[Decomposition, SolveReport]:
    """Solve for residues and exact part up to ``G`` degree ``order``.

    Raises ``NotClosedError`` for non-closed input and ``DivisorError`` when
    two pole components are detected to share a factor.
    """
    if check_closed:
        result = closedness_check(w)
        if not result.closed:
            raise NotClosedError(result)
    if check_coprime:
        bad = w.divisor.pairwise_coprime(trials=2, seed=seed)
        if bad:
            i, j = bad[0]
            raise DivisorError(f"pole components {i + 1} and {j + 1} share a common factor")
    first = _solve(w, order)
    status, message = first.status, first.message
    stable_from = first.determined_at
    g_poly = False
    if status == SOLVED:
        second = _solve(w, order + 2)
        if second.status != SOLVED or second.lambdas != first.lambdas:
            status = ORDER_TOO_LOW
            message = f"residues changed between orders {order} and {order + 2}"
            stable_from = None
        elif first.normalization is not None:
            G2 = renormalize(second.G, w.divisor.exact_denominator(), first.normalization, second.g_order)
            g_poly = first.G.degree() <= first.g_order - 3 and G2 == first.G
        else:
            g_poly = first.G.degree() <= first.g_order - 3 and second.G == first.G
    lambdas = first.lambdas if first.lambdas is not None else tuple(Fraction(0) for _ in range(len(w.divisor)))
    decomposition = Decomposition(
        lambdas=lambdas,
        G=Jet(first.G, max(first.g_order, 0)),
        normalization=first.normalization,
        valid_order=first.eq_order,
        g_is_polynomial=g_poly,
    )
    report = SolveReport(status, first.residual, first.equations, first.unknowns,
                         stable_from if status == SOLVED else None, message)
    return decomposition, report


def verify_decomposition(w: MeroOneForm, d: Decomposition) -> SolveReport:
    """Recompute the numerator from ``d`` and compare with ``eta`` up to ``d.valid_order``."""
    if len(d.lambdas) != len(w.divisor):
        raise ValueError(f"{len(d.lambdas)} residues for {len(w.divisor)} pole components")
    if d.G.nvars != w.nvars:
        raise ValueError("G and the form live in different numbers of variables")
    top = d.valid_order
    synth = master_identity(d.lambdas, d.G.poly, w.divisor, top)
    residual = OneForm(tuple(a.truncate(top) - b for a, b in zip(w.eta.coeffs, synth)), top)
    n = w.nvars
    eq = n * sum(len(monomials_of_degree(n, e)) for e in range(top + 1))
    status = SOLVED if residual.is_zero() else INCONSISTENT
    message = "" if status == SOLVED else "eta differs from the recomputed numerator"
    return SolveReport(status, residual, eq, 0, None, message)


EXACT = "exact"
NOT_EXACT = "not_exact"


@dataclass(frozen=True)
class ExactnessResult:
    status: str
    decomposition: Decomposition
    report: SolveReport
    nonzero_lambdas: dict[int, Fraction] = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.status == EXACT

    @property
    def primitive(self) -> Decomposition | None:
        """Meromorphic primitive ``G / F`` (up to a constant) when exact."""
        return self.decomposition if self.exact else None


def is_exact_form(w: MeroOneForm, order: int = 10, **kwargs) -> ExactnessResult:
    """A closed form has a meromorphic primitive iff all residues vanish."""
    d, report = decompose(w, order, **kwargs)
    if not report.solved:
        return ExactnessResult(report.status, d, report)
    nonzero = {i: lam for i, lam in enumerate(d.lambdas) if lam}
    return ExactnessResult(NOT_EXACT if nonzero else EXACT, d, report, nonzero)
