"""Rational linear maps and linear substitution into polynomials and jets."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .jet import Jet
from .poly import DimensionError, Monomial, Poly, as_rational


@dataclass(frozen=True)
class LinearMapSpec:
    """An ``n_target x n_source`` rational matrix.

    Column ``a`` is the image of the ``a``-th source basis vector, so a point
    ``u`` of the source maps to ``M u`` and ``x_k = sum_a M[k][a] u_a``.
    """

    matrix: tuple[tuple[Fraction, ...], ...]

    def __init__(self, matrix: Sequence[Sequence]):
        rows = tuple(tuple(as_rational(v) for v in row) for row in matrix)
        if not rows or not rows[0]:
            raise ValueError("empty matrix")
        if len({len(r) for r in rows}) != 1:
            raise ValueError("ragged matrix")
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> "LinearMapSpec":
        n_target = len(columns[0])
        return cls([[columns[a][k] for a in range(len(columns))] for k in range(n_target)])

    @property
    def n_target(self) -> int:
        return len(self.matrix)

    @property
    def n_source(self) -> int:
        return len(self.matrix[0])

    def column(self, a: int) -> tuple[Fraction, ...]:
        return tuple(row[a] for row in self.matrix)

    def compose(self, inner: "LinearMapSpec") -> "LinearMapSpec":
        """Matrix product ``self @ inner`` (apply ``inner`` first)."""
        if self.n_source != inner.n_target:
            raise DimensionError("inner map lands in the wrong dimension")
        return LinearMapSpec(
            [
                [sum((self.matrix[i][k] * inner.matrix[k][j] for k in range(self.n_source)), Fraction(0))
                 for j in range(inner.n_source)]
                for i in range(self.n_target)
            ]
        )

    def rank(self) -> int:
        rows = [list(r) for r in self.matrix]
        rank, col = 0, 0
        ncols = self.n_source
        while rank < len(rows) and col < ncols:
            pivot = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
            if pivot is None:
                col += 1
                continue
            rows[rank], rows[pivot] = rows[pivot], rows[rank]
            for i in range(rank + 1, len(rows)):
                f = rows[i][col] / rows[rank][col]
                if f:
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
            rank += 1
            col += 1
        return rank

    def has_independent_columns(self) -> bool:
        return self.rank() == self.n_source

    def coordinate_images(self) -> list[Poly]:
        """The linear forms ``x_k = sum_a M[k][a] u_a`` in the source ring."""
        n = self.n_source
        out = []
        for row in self.matrix:
            terms = {}
            for a, v in enumerate(row):
                if v:
                    terms[tuple(1 if i == a else 0 for i in range(n))] = v
            out.append(Poly(n, terms))
        return out


def _substitute_homogeneous(p: Poly, images: list[Poly], max_degree) -> Poly:
    # powers are cached per variable; each homogeneous degree stays homogeneous
    n_src = images[0].nvars
    cache: list[list[Poly]] = [[Poly.const(1, n_src)] for _ in images]

    def power(i: int, e: int) -> Poly:
        table = cache[i]
        while len(table) <= e:
            table.append(table[-1] * images[i])
        return table[e]

    acc: dict[Monomial, Fraction] = {}
    for m, c in p.items():
        if sum(m) > max_degree:
            continue
        term = None
        for i, e in enumerate(m):
            if e:
                term = power(i, e) if term is None else term * power(i, e)
        if term is None:
            acc[(0,) * n_src] = acc.get((0,) * n_src, 0) + c
            continue
        for tm, tc in term.items():
            acc[tm] = acc.get(tm, 0) + c * tc
    return Poly(n_src, acc)


def substitute_linear(p: Poly | Jet, linear_map: LinearMapSpec) -> Poly | Jet:
    """Exact composition ``p o M``; jets keep their order."""
    if p.nvars != linear_map.n_target:
        raise DimensionError(
            f"polynomial has {p.nvars} variables but the map lands in dimension {linear_map.n_target}"
        )
    images = linear_map.coordinate_images()
    if isinstance(p, Jet):
        return Jet(_substitute_homogeneous(p.poly, images, p.order), p.order)
    return _substitute_homogeneous(p, images, float("inf"))
