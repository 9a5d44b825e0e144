from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from grassrec.field import GF, supported_orders
from grassrec.linalg import (
    MatrixGF,
    dim_intersection,
    dim_sum,
    intersection_basis,
    intersection_rows,
    nullspace_rows,
    rank_rows,
    rows_from_text,
    rows_to_text,
    rref,
    rref_rows,
    stack,
)

ORDERS = [q for q in supported_orders() if q <= 9]


def _det(F, M):
    """Leibniz determinant, independent of elimination."""
    n = len(M)
    total = 0
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = 1
        for i in range(n):
            term = F.mul(term, M[i][perm[i]])
        total = F.sub(total, term) if inversions % 2 else F.add(total, term)
    return total


def _minor_rank(F, rows, ncols):
    """Largest r with a non-zero r x r minor."""
    for r in range(min(len(rows), ncols), 0, -1):
        for ri in itertools.combinations(range(len(rows)), r):
            for ci in itertools.combinations(range(ncols), r):
                if _det(F, [[rows[i][j] for j in ci] for i in ri]):
                    return r
    return 0


def _span_set(F, rows, n):
    """Every vector of the row space, by brute force."""
    out = set()
    for coeffs in itertools.product(range(F.q), repeat=len(rows)):
        v = [0] * n
        for c, r in zip(coeffs, rows):
            v = [F.add(x, F.mul(c, y)) for x, y in zip(v, r)]
        out.add(tuple(v))
    return out


def matrices(max_rows=4, max_cols=4):
    @st.composite
    def build(draw):
        q = draw(st.sampled_from(ORDERS))
        m = draw(st.integers(1, max_rows))
        n = draw(st.integers(1, max_cols))
        rows = draw(st.lists(st.lists(st.integers(0, q - 1), min_size=n, max_size=n), min_size=m, max_size=m))
        return GF(q), rows, n

    return build()


@given(matrices())
def test_rank_matches_minor_oracle(data):
    F, rows, n = data
    assert rank_rows(F, rows, n) == _minor_rank(F, rows, n)


@given(matrices(3, 4))
def test_rref_spans_same_space(data):
    F, rows, n = data
    R, pivots = rref_rows(F, rows, n)
    assert _span_set(F, R, n) == _span_set(F, rows, n)
    for i, p in enumerate(pivots):
        assert R[i][p] == 1
        assert all(R[j][p] == 0 for j in range(len(R)) if j != i)
        assert all(x == 0 for x in R[i][:p])
    assert list(pivots) == sorted(pivots)


@given(matrices(), st.randoms(use_true_random=False))
def test_rref_idempotent_and_unique(data, rnd):
    F, rows, n = data
    R = rref_rows(F, rows, n)[0]
    assert rref_rows(F, R, n)[0] == R
    mixed = [list(r) for r in rows]
    for _ in range(5):
        i, j = rnd.randrange(len(mixed)), rnd.randrange(len(mixed))
        c = rnd.randrange(1, F.q)
        if i == j:
            mixed[i] = [F.mul(c, x) for x in mixed[i]]
        else:
            mixed[i] = [F.add(x, F.mul(c, y)) for x, y in zip(mixed[i], mixed[j])]
    rnd.shuffle(mixed)
    assert rref_rows(F, mixed, n)[0] == R


@pytest.mark.parametrize("q", ORDERS)
def test_modular_identity_random_pairs(q):
    F = GF(q)
    rng = random.Random(q)
    n = 5
    for _ in range(10_000):
        a = rref_rows(F, [[rng.randrange(q) for _ in range(n)] for _ in range(rng.randint(1, n))], n)[0]
        b = rref_rows(F, [[rng.randrange(q) for _ in range(n)] for _ in range(rng.randint(1, n))], n)[0]
        meet = intersection_rows(F, a, b, n)
        assert rank_rows(F, a + b, n) + len(meet) == len(a) + len(b)
        assert rank_rows(F, a + meet, n) == len(a)
        assert rank_rows(F, b + meet, n) == len(b)


@given(matrices(3, 4), matrices(3, 4))
def test_intersection_against_vector_sets(d1, d2):
    F, a, n = d1
    _, b, n2 = d2
    if F.q != d2[0].q or n != n2:
        return
    meet = intersection_rows(F, rref_rows(F, a, n)[0], rref_rows(F, b, n)[0], n)
    assert _span_set(F, meet, n) == _span_set(F, a, n) & _span_set(F, b, n)


def test_nullspace():
    F = GF(5)
    rows = [[1, 2, 3, 4], [0, 1, 1, 1]]
    ker = nullspace_rows(F, rows, 4)
    assert len(ker) == 2
    for v in ker:
        for r in rows:
            assert sum(F.mul(x, y) for x, y in zip(v, r)) % 5 == 0


def test_matrix_wrapper():
    F = GF(3)
    M = MatrixGF.from_text(F, "120;210;001")
    R, r, piv = rref(M)
    assert r == 2 and piv == (0, 2)
    assert R.shape == (3, 3) and R.rows[2] == (0, 0, 0)
    A = MatrixGF.from_text(F, "100;010")
    B = MatrixGF.from_text(F, "010;001")
    assert dim_sum(A, B) == 3
    assert dim_intersection(A, B) == 1
    assert intersection_basis(A, B).rows == ((0, 1, 0),)
    with pytest.raises(ValueError):
        stack(A, MatrixGF.from_text(F, "10"))
    with pytest.raises(ValueError):
        stack(A, MatrixGF.from_text(GF(5), "100"))
    with pytest.raises(ValueError):
        MatrixGF.from_lists(F, [[0, 3]])


def test_text_round_trip():
    rows = ((1, 0, 10), (0, 1, 30))
    assert rows_to_text(rows) == "10a;01u"
    assert rows_from_text("10a;01u") == rows
    assert rows_from_text("") == ()
