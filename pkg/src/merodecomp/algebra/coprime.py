"""Probabilistic check that two germs share no common factor."""
from __future__ import annotations

import random
from fractions import Fraction

from .linalg import bareiss_determinant
from .linear_map import LinearMapSpec, substitute_linear
from .poly import Poly

COPRIME_PROBABLE = "coprime_probable"
COMMON_FACTOR_DETECTED = "common_factor_detected"


def random_plane(rng: random.Random, nvars: int, bound: int = 7) -> LinearMapSpec:
    """A random rational embedding of a 2-plane (a coordinate change if ``nvars == 2``)."""
    while True:
        cols = [[Fraction(rng.randint(-bound, bound)) for _ in range(nvars)] for _ in range(2)]
        spec = LinearMapSpec.from_columns(cols)
        if spec.has_independent_columns():
            return spec


def _coefficients_in_last(p: Poly) -> dict[int, Poly]:
    """Write a bivariate ``p(u, v)`` as ``sum_j c_j(u) v^j``."""
    out: dict[int, dict] = {}
    for (a, b), c in p.items():
        out.setdefault(b, {})[(a,)] = c
    return {j: Poly(1, t) for j, t in out.items()}


def _sylvester(a: list[Fraction], b: list[Fraction]) -> list[list[Fraction]]:
    # a, b are coefficient lists from the leading coefficient down
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + a + [Fraction(0)] * (size - m - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + b + [Fraction(0)] * (size - n - 1 - i))
    return rows


def resultant_vanishes_identically(f: Poly, g: Poly) -> bool:
    """Whether ``Res_v(f, g)`` is the zero polynomial in ``u`` (bivariate inputs)."""
    if f.is_zero() or g.is_zero():
        return True
    cf, cg = _coefficients_in_last(f), _coefficients_in_last(g)
    df, dg = max(cf), max(cg)
    if df == 0 and dg == 0:
        return False
    if df == 0 or dg == 0:
        # resultant is a power of the v-free polynomial, nonzero
        return False
    bound = max(f.degree(), 1) * max(g.degree(), 1) + 1
    zero = Poly.zero(1)
    for u0 in range(1, bound + 2):
        point = (Fraction(u0),)
        a = [cf.get(j, zero).evaluate(point) for j in range(df, -1, -1)]
        b = [cg.get(j, zero).evaluate(point) for j in range(dg, -1, -1)]
        a = [Fraction(x) for x in a]
        b = [Fraction(x) for x in b]
        if bareiss_determinant(_sylvester(a, b)) != 0:
            return False
    return True


def coprimality_probe(f: Poly, g: Poly, trials: int = 3, seed: int = 0) -> str:
    """Restrict to random 2-planes and test resultants.

    ``common_factor_detected`` is certain; ``coprime_probable`` can be wrong
    only for an unlucky choice of planes.
    """
    if f.nvars != g.nvars:
        raise ValueError("variable-count mismatch")
    for name, p in (("f", f), ("g", g)):
        if p.is_zero() or p.constant_term():
            raise ValueError(f"{name} must be a non-unit vanishing at the origin")
    rng = random.Random(seed)
    for _ in range(max(1, trials)):
        plane = random_plane(rng, f.nvars)
        fr = substitute_linear(f, plane)
        gr = substitute_linear(g, plane)
        if not resultant_vanishes_identically(fr, gr):
            return COPRIME_PROBABLE
    return COMMON_FACTOR_DETECTED
