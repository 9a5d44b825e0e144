"""Exact matrix algebra over GF(q).

The hot path is :func:`rref_rows`, which works on plain tuples of integer
encodings.  :class:`MatrixGF` wraps it for callers that want a value type.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Sequence

from .field import GF

Row = tuple[int, ...]

_DIGITS = string.digits + string.ascii_lowercase


def rref_rows(F: GF, rows: Sequence[Sequence[int]], ncols: int) -> tuple[tuple[Row, ...], tuple[int, ...]]:
    """Gauss-Jordan elimination with leftmost pivots.

    Returns the nonzero rows of the reduced row echelon form and the pivot
    columns.  Zero rows are dropped.
    """
    mul, sub, inv = F.mul_table, F.sub_table, F.inv_table
    work = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    nrows = len(work)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if work[i][c]:
                piv = i
                break
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        prow = work[r]
        lead = prow[c]
        if lead != 1:
            s = mul[inv[lead]]
            prow = work[r] = [s[x] for x in prow]
        for i in range(nrows):
            if i != r:
                f = work[i][c]
                if f:
                    mf = mul[f]
                    row = work[i]
                    work[i] = [sub[row[j]][mf[prow[j]]] for j in range(ncols)]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in work[:r]), tuple(pivots)


def rank_rows(F: GF, rows: Sequence[Sequence[int]], ncols: int) -> int:
    return len(rref_rows(F, rows, ncols)[1])


def nullspace_rows(F: GF, rows: Sequence[Sequence[int]], ncols: int) -> tuple[Row, ...]:
    """Basis of {x : M x = 0}, one basis vector per free column, in RREF."""
    R, pivots = rref_rows(F, rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for row, pc in zip(R, pivots):
            v[pc] = F.neg(row[fc])
        basis.append(v)
    return rref_rows(F, basis, ncols)[0]


def combine(F: GF, coeffs: Sequence[int], rows: Sequence[Sequence[int]], ncols: int) -> Row:
    """The linear combination sum_i coeffs[i] * rows[i]."""
    out = [0] * ncols
    mul, add = F.mul_table, F.add_table
    for c, row in zip(coeffs, rows):
        if c:
            mc = mul[c]
            out = [add[o][mc[x]] for o, x in zip(out, row)]
    return tuple(out)


def intersection_rows(F: GF, a: Sequence[Row], b: Sequence[Row], ncols: int) -> tuple[Row, ...]:
    """RREF basis of rowspace(a) ∩ rowspace(b) via the kernel of [a; -b]^T."""
    if not a or not b:
        return ()
    # x in both iff x = sum u_i a_i = sum w_j b_j, i.e. (u, w) in ker of the
    # column-stacked system [a^T | -b^T].
    m = len(a) + len(b)
    system = []
    for col in range(ncols):
        system.append([r[col] for r in a] + [F.neg(r[col]) for r in b])
    kernel = nullspace_rows(F, system, m)
    vectors = [combine(F, k[: len(a)], a, ncols) for k in kernel]
    return rref_rows(F, vectors, ncols)[0]


def row_to_text(row: Sequence[int]) -> str:
    return "".join(_DIGITS[x] for x in row)


def rows_to_text(rows: Sequence[Sequence[int]]) -> str:
    """Rows as semicolon-separated digit strings, e.g. ``"102;011"``.

    Digits above 9 use lowercase letters (base 36), enough for q <= 31.
    """
    return ";".join(row_to_text(r) for r in rows)


def rows_from_text(text: str) -> tuple[Row, ...]:
    if not text:
        return ()
    return tuple(tuple(_DIGITS.index(ch) for ch in part.strip().lower()) for part in text.split(";"))


@dataclass(frozen=True)
class MatrixGF:
    field: GF
    rows: tuple[Row, ...]
    ncols: int

    def __post_init__(self):
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError(f"row {r} has length {len(r)}, expected {self.ncols}")
            if any(not 0 <= x < self.field.q for x in r):
                raise ValueError(f"row {r} has entries outside GF({self.field.q})")

    @classmethod
    def from_lists(cls, field: GF, rows: Sequence[Sequence[int]], ncols: int | None = None) -> MatrixGF:
        rows = tuple(tuple(r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(field, rows, ncols)

    @classmethod
    def from_text(cls, field: GF, text: str, ncols: int | None = None) -> MatrixGF:
        return cls.from_lists(field, rows_from_text(text), ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    def rref(self) -> tuple[MatrixGF, int, tuple[int, ...]]:
        """(R, rank, pivots); R keeps the input shape, zero rows at the bottom."""
        R, pivots = rref_rows(self.field, self.rows, self.ncols)
        padded = R + tuple((0,) * self.ncols for _ in range(self.nrows - len(R)))
        return MatrixGF(self.field, padded, self.ncols), len(pivots), pivots

    def rank(self) -> int:
        return rank_rows(self.field, self.rows, self.ncols)

    def to_text(self) -> str:
        return rows_to_text(self.rows)


def rref(M: MatrixGF) -> tuple[MatrixGF, int, tuple[int, ...]]:
    return M.rref()


def rank(M: MatrixGF) -> int:
    return M.rank()


def stack(A: MatrixGF, B: MatrixGF) -> MatrixGF:
    if A.ncols != B.ncols:
        raise ValueError(f"column mismatch: {A.ncols} vs {B.ncols}")
    if A.field is not B.field:
        raise ValueError(f"field mismatch: {A.field} vs {B.field}")
    return MatrixGF(A.field, A.rows + B.rows, A.ncols)


def dim_sum(A: MatrixGF, B: MatrixGF) -> int:
    """dim(rowspace A + rowspace B)."""
    return stack(A, B).rank()


def dim_intersection(A: MatrixGF, B: MatrixGF) -> int:
    """dim(A ∩ B) by the modular identity dim A + dim B - dim(A + B)."""
    return A.rank() + B.rank() - dim_sum(A, B)


def intersection_basis(A: MatrixGF, B: MatrixGF) -> MatrixGF:
    if A.ncols != B.ncols:
        raise ValueError(f"column mismatch: {A.ncols} vs {B.ncols}")
    a = rref_rows(A.field, A.rows, A.ncols)[0]
    b = rref_rows(B.field, B.rows, B.ncols)[0]
    return MatrixGF(A.field, intersection_rows(A.field, a, b, A.ncols), A.ncols)
