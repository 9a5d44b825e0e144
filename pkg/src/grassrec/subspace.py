"""Subspaces of F_q^n in canonical (RREF) form.

A subspace is identified by the nonzero rows of its reduced row echelon
basis, so two bases span the same subspace exactly when their canonical row
tuples are equal.  Coordinates are 0-based in code; the coordinate hyperplane
index ``i`` in :func:`coordinate_hyperplane` and degeneracy witnesses is
1-based to match the usual C_1..C_n labelling.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .field import GF
from .linalg import Row, intersection_rows, rank_rows, rows_from_text, rows_to_text, rref_rows

DEFAULT_SUBSPACE_CAP = 2_000_000


class EnumerationCapExceeded(RuntimeError):
    def __init__(self, count: int, cap: int, what: str = "subspaces"):
        super().__init__(f"refusing to enumerate {count} {what} (cap {cap}); raise the cap to override")
        self.count = count
        self.cap = cap


def count_points(t: int, q: int) -> int:
    """[t]_q = (q^t - 1) / (q - 1), the number of points of PG(t-1, q)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return sum(q**i for i in range(t))


def gaussian_binomial(n: int, d: int, q: int) -> int:
    if d < 0 or d > n:
        return 0
    num = den = 1
    for i in range(d):
        num *= q ** (n - i) - 1
        den *= q ** (d - i) - 1
    return num // den


@dataclass(frozen=True)
class AmbientSpec:
    n: int
    q: int
    k: int | None = None

    @property
    def field(self) -> GF:
        return GF(self.q)

    def require_recovery_range(self) -> None:
        if self.k is None or not 1 < self.k < self.n - 1:
            raise ValueError(f"need 1 < k < n-1, got n={self.n}, k={self.k}")

    def to_json(self) -> dict:
        out = {"n": self.n, "q": self.q}
        if self.k is not None:
            out["k"] = self.k
        return out


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_q^n held as its canonical RREF rows."""

    field: GF
    n: int
    rows: tuple[Row, ...]

    @classmethod
    def span(cls, field: GF, n: int, vectors: Iterable[Sequence[int]]) -> Subspace:
        return cls(field, n, rref_rows(field, list(vectors), n)[0])

    @classmethod
    def from_text(cls, field: GF, n: int, text: str) -> Subspace:
        return cls.span(field, n, rows_from_text(text))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def q(self) -> int:
        return self.field.q

    def to_text(self) -> str:
        return rows_to_text(self.rows)

    def degenerate_witness(self) -> tuple[int, ...]:
        """1-based indices i with this subspace inside C_i (its zero columns)."""
        return tuple(j + 1 for j in range(self.n) if all(r[j] == 0 for r in self.rows))

    def is_degenerate(self) -> bool:
        return bool(self.degenerate_witness())

    def __add__(self, other: Subspace) -> Subspace:
        return sum_(self, other)

    def __and__(self, other: Subspace) -> Subspace:
        return intersect(self, other)

    def __contains__(self, other: Subspace) -> bool:
        return contains(self, other)

    def __repr__(self) -> str:
        return f"Subspace(q={self.q}, n={self.n}, {self.to_text() or '0'})"


def is_degenerate(S: Subspace) -> tuple[bool, tuple[int, ...]]:
    witness = S.degenerate_witness()
    return bool(witness), witness


def row_is_degenerate(rows: Sequence[Row], n: int) -> bool:
    """Degeneracy test on raw canonical rows."""
    for j in range(n):
        for r in rows:
            if r[j]:
                break
        else:
            return True
    return False


def coordinate_hyperplane(field: GF, n: int, i: int) -> Subspace:
    """C_i = {x : x_i = 0}, with i 1-based."""
    if not 1 <= i <= n:
        raise ValueError(f"coordinate index {i} outside 1..{n}")
    basis = []
    for j in range(n):
        if j != i - 1:
            v = [0] * n
            v[j] = 1
            basis.append(v)
    return Subspace.span(field, n, basis)


def zero_subspace(field: GF, n: int) -> Subspace:
    return Subspace(field, n, ())


def full_space(field: GF, n: int) -> Subspace:
    return Subspace.span(field, n, [[int(i == j) for j in range(n)] for i in range(n)])


@lru_cache(maxsize=None)
def rref_matrices(q: int, n: int, d: int) -> tuple[tuple[Row, ...], ...]:
    """Every d x n RREF matrix of rank d over GF(q), sorted lexicographically.

    Built from pivot-column choices plus every fill of the free entries.
    """
    out = []
    for pivots in itertools.combinations(range(n), d):
        slots = [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, n) if j not in pivots]
        for fill in itertools.product(range(q), repeat=len(slots)):
            m = [[0] * n for _ in range(d)]
            for i, p in enumerate(pivots):
                m[i][p] = 1
            for (i, j), v in zip(slots, fill):
                m[i][j] = v
            out.append(tuple(tuple(r) for r in m))
    out.sort()
    return tuple(out)


def enumerate_subspaces(field: GF, n: int, d: int, cap: int = DEFAULT_SUBSPACE_CAP) -> list[Subspace]:
    if not 0 <= d <= n:
        raise ValueError(f"dimension {d} outside 0..{n}")
    count = gaussian_binomial(n, d, field.q)
    if count > cap:
        raise EnumerationCapExceeded(count, cap)
    return [Subspace(field, n, rows) for rows in rref_matrices(field.q, n, d)]


def _check_same(A: Subspace, B: Subspace) -> None:
    if A.n != B.n or A.field is not B.field:
        raise ValueError(f"ambient mismatch: GF({A.q})^{A.n} vs GF({B.q})^{B.n}")


def sum_(A: Subspace, B: Subspace) -> Subspace:
    _check_same(A, B)
    return Subspace(A.field, A.n, rref_rows(A.field, A.rows + B.rows, A.n)[0])


def intersect(A: Subspace, B: Subspace) -> Subspace:
    _check_same(A, B)
    return Subspace(A.field, A.n, intersection_rows(A.field, A.rows, B.rows, A.n))


def contains(A: Subspace, B: Subspace) -> bool:
    """True when B is a subspace of A."""
    _check_same(A, B)
    if B.dim > A.dim:
        return False
    return rank_rows(A.field, A.rows + B.rows, A.n) == A.dim


def dim_sum(A: Subspace, B: Subspace) -> int:
    _check_same(A, B)
    return rank_rows(A.field, A.rows + B.rows, A.n)


def dim_intersection(A: Subspace, B: Subspace) -> int:
    return A.dim + B.dim - dim_sum(A, B)


def _image(F: GF, coeff_rows: Sequence[Row], basis: Sequence[Row], n: int) -> list[list[int]]:
    mul, add = F.mul_table, F.add_table
    out = []
    for coeffs in coeff_rows:
        v = [0] * n
        for c, b in zip(coeffs, basis):
            if c:
                mc = mul[c]
                v = [add[x][mc[y]] for x, y in zip(v, b)]
        out.append(v)
    return out


def subspaces_of_rows(F: GF, rows: tuple[Row, ...], n: int, d: int) -> list[tuple[Row, ...]]:
    """Canonical rows of all d-subspaces of span(rows)."""
    s = len(rows)
    return [rref_rows(F, _image(F, m, rows, n), n)[0] for m in rref_matrices(F.q, s, d)]


def superspaces_rows(F: GF, rows: tuple[Row, ...], n: int, d: int) -> list[tuple[Row, ...]]:
    """Canonical rows of all d-superspaces of span(rows).

    The non-pivot unit vectors form a complement W, and superspaces correspond
    one-to-one to (d - dim S)-subspaces of W.
    """
    s = len(rows)
    pivots = set()
    for r in rows:
        pivots.add(next(j for j, x in enumerate(r) if x))
    comp = [tuple(int(i == j) for i in range(n)) for j in range(n) if j not in pivots]
    out = []
    for m in rref_matrices(F.q, n - s, d - s):
        out.append(rref_rows(F, list(rows) + _image(F, m, comp, n), n)[0])
    return out


def superspaces(S: Subspace, d: int) -> list[Subspace]:
    if d <= S.dim or d > S.n:
        return []
    return sorted((Subspace(S.field, S.n, r) for r in superspaces_rows(S.field, S.rows, S.n, d)),
                  key=lambda T: T.rows)


def subspaces_of(S: Subspace, d: int) -> list[Subspace]:
    if d < 0 or d >= S.dim:
        return [] if d != S.dim else [S]
    return sorted((Subspace(S.field, S.n, r) for r in subspaces_of_rows(S.field, S.rows, S.n, d)),
                  key=lambda T: T.rows)


def enumeration_to_json(field: GF, n: int, d: int, spaces: Sequence[Subspace]) -> dict:
    return {"n": n, "q": field.q, "d": d, "bases": [S.to_text() for S in spaces]}
