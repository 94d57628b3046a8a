"""Curated pole components and a seeded generator of synthesized instances.

The components are irreducible germs of degree <= 4 whose tangent cones have
pairwise disjoint irreducible factors, so any choice of distinct components is
pairwise coprime and the residues are already visible in the lowest-order
equations.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Poly, monomials_up_to
from .forms import MeroOneForm, PoleDivisor, synthesize_form
from .frontend.parser import parse_polynomial

CURATED = {
    2: [
        "x + y^2",
        "y - x^2 + x*y^2",
        "x + y + x^3",
        "x - y + x*y^2",
        "x^2 + 4*x*y + 4*y^2 - y^3",
        "4*x^2 - 4*x*y + y^2 + x^3",
        "x^2 - 6*x*y + 9*y^2 + x^3*y",
        "3*x + y + x^2*y^2",
    ],
    3: [
        "x + y^2 + z^3",
        "y - z^2 + x*z",
        "z + x*y",
        "x + y + z + x^4",
        "x^2 + y^2 + z^2 + x^3",
        "x*y - z^2 + y^4",
        "x^2 - 2*y*z + z^3",
        "x - 2*y + x*z^2",
    ],
}

VARIABLES = {2: ["x", "y"], 3: ["x", "y", "z"]}


def curated_components(nvars: int) -> list[Poly]:
    return [parse_polynomial(text, VARIABLES[nvars]) for text in CURATED[nvars]]


@dataclass(frozen=True)
class Instance:
    lambdas: tuple[Fraction, ...]
    G: Poly
    divisor: PoleDivisor
    form: MeroOneForm


def random_rational(rng: random.Random, bound: int = 100) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_poly(rng: random.Random, nvars: int, degree: int, terms: int, bound: int = 9) -> Poly:
    pool = monomials_up_to(nvars, degree)
    chosen = rng.sample(pool, min(terms, len(pool)))
    return Poly(nvars, {m: Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) for m in chosen})


def random_instance(
    rng: random.Random,
    nvars: int,
    *,
    max_components: int = 3,
    max_exponent: int = 2,
    max_g_degree: int = 6,
    zero_residues: bool = False,
) -> Instance:
    comps = curated_components(nvars)
    p = rng.randint(1, max_components)
    fs = rng.sample(comps, p)
    divisor = PoleDivisor(tuple((f, rng.randint(0, max_exponent) + 1) for f in fs))
    if zero_residues:
        lambdas = tuple(Fraction(0) for _ in fs)
    else:
        lambdas = tuple(random_rational(rng) for _ in fs)
    G = random_poly(rng, nvars, rng.randint(0, max_g_degree), rng.randint(0, 5))
    return Instance(lambdas, G, divisor, synthesize_form(lambdas, G, divisor))
