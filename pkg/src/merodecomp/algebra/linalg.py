"""Exact linear algebra over Q without floating point.

Rows are stored as sparse integer vectors kept primitive (content 1), and every
elimination step is the fraction-free cross-multiplication
``r <- p*r - a*pivot_row`` followed by removal of the row content.  Pivots are
chosen among the admissible entries of a new row by smallest bit size.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

Row = dict[Hashable, int]


def primitive_row(row: Mapping[Hashable, object]) -> Row:
    """Scale a rational row to coprime integers (zero entries dropped)."""
    den = 1
    items = []
    for k, v in row.items():
        v = Fraction(v)
        if v:
            items.append((k, v))
            den = den * v.denominator // math.gcd(den, v.denominator)
    out = {k: v.numerator * (den // v.denominator) for k, v in items}
    return _make_primitive(out)


def _make_primitive(row: Row) -> Row:
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {k: v // g for k, v in row.items()}
    return row


def _combine(p: int, row: Row, a: int, pivot_row: Row, col: Hashable) -> Row:
    """``p*row - a*pivot_row`` with ``col`` cancelled, made primitive."""
    out = {k: p * v for k, v in row.items()} if p != 1 else dict(row)
    for k, v in pivot_row.items():
        s = out.get(k, 0) - a * v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    out.pop(col, None)
    return _make_primitive(out)


class FractionFreeEliminator:
    """Incremental reduced row echelon form over Z.

    Columns are arbitrary hashable keys.  Only columns accepted by
    ``pivotable`` can become pivots; the others (parameters, the constant)
    stay on the right-hand side.  A row equation reads ``sum_c a_c * v_c = 0``.
    """

    def __init__(self, pivotable: Callable[[Hashable], bool] = lambda c: True):
        self.pivotable = pivotable
        self.rows: dict[Hashable, Row] = {}
        self._occurs: dict[Hashable, set] = {}
        self.rows_seen = 0

    def _index(self, pivot: Hashable, row: Row) -> None:
        for k in row:
            if k != pivot:
                self._occurs.setdefault(k, set()).add(pivot)

    def _unindex(self, pivot: Hashable, row: Row) -> None:
        for k in row:
            if k != pivot:
                s = self._occurs.get(k)
                if s is not None:
                    s.discard(pivot)

    def reduce(self, row: Mapping[Hashable, object]) -> Row:
        """Reduce a row against the current pivots without storing it."""
        r = primitive_row(row)
        for col in [c for c in r if c in self.rows]:
            a = r.get(col)
            if not a:
                continue
            prow = self.rows[col]
            p = prow[col]
            g = math.gcd(p, a)
            r = _combine(p // g, r, a // g, prow, col)
        return r

    def add_row(self, row: Mapping[Hashable, object]) -> Row | None:
        """Insert an equation.

        Returns ``None`` if the row became a pivot or was redundant, otherwise
        the reduced row, which involves only non-pivotable columns.
        """
        self.rows_seen += 1
        r = self.reduce(row)
        if not r:
            return None
        candidates = [c for c in r if self.pivotable(c)]
        if not candidates:
            return r
        col = min(candidates, key=lambda c: (abs(r[c]).bit_length(), _order_key(c)))
        p = r[col]
        for other in list(self._occurs.get(col, ())):
            orow = self.rows[other]
            a = orow.get(col)
            if not a:
                continue
            g = math.gcd(p, a)
            self._unindex(other, orow)
            new = _combine(p // g, orow, a // g, r, col)
            self.rows[other] = new
            self._index(other, new)
        self._occurs.pop(col, None)
        self.rows[col] = r
        self._index(col, r)
        return None

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivot_columns(self) -> set:
        return set(self.rows)

    def expression(self, col: Hashable) -> dict[Hashable, Fraction]:
        """``col`` as a combination of the non-pivot columns."""
        row = self.rows[col]
        p = row[col]
        return {k: Fraction(-v, p) for k, v in row.items() if k != col}

    def solution(self) -> dict[Hashable, dict[Hashable, Fraction]]:
        return {c: self.expression(c) for c in self.rows}


def _order_key(c: Hashable):
    return (0, c) if isinstance(c, int) else (1, repr(c))


def solve_linear_system(
    matrix: Sequence[Sequence], rhs: Sequence, free_value: Fraction = Fraction(0)
) -> list[Fraction] | None:
    """Solve ``A x = b`` exactly; free variables are set to ``free_value``.

    Returns ``None`` when the system is inconsistent.
    """
    ncols = len(matrix[0]) if matrix else 0
    const = "rhs"
    elim = FractionFreeEliminator(lambda c: c != const)
    for row, b in zip(matrix, rhs):
        entry = {j: v for j, v in enumerate(row) if v}
        if b:
            entry[const] = -Fraction(b)
        leftover = elim.add_row(entry)
        if leftover:
            return None
    values = [Fraction(free_value)] * ncols
    for col, expr in elim.solution().items():
        total = Fraction(0)
        for k, v in expr.items():
            total += v * (1 if k == const else values[k] if k not in elim.rows else 0)
        values[col] = total
    return values


def bareiss_determinant(matrix: Sequence[Sequence]) -> Fraction:
    """Determinant by Bareiss fraction-free elimination."""
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    den = 1
    for row in matrix:
        for v in row:
            v = Fraction(v)
            den = den * v.denominator // math.gcd(den, v.denominator)
    a = [[int(Fraction(v) * den) for v in row] for row in matrix]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], den ** n)


def rank(rows: Iterable[Mapping[Hashable, object]]) -> int:
    elim = FractionFreeEliminator()
    for r in rows:
        elim.add_row(r)
    return elim.rank
