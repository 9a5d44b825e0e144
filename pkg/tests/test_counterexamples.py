from __future__ import annotations

from itertools import product

import pytest

from conftest import delta_of
from grassrec.counterexamples import (
    ExampleConstraintError,
    construct,
    example_2_pair,
    example_3_pair,
    free_coordinates,
    lemma_S_pair,
    run_example,
)
from grassrec.field import GF
from grassrec.subspace import gaussian_binomial


# vector-set oracle: subspaces as frozensets of vectors, no row reduction


def span_set(F, vectors):
    vectors = [tuple(v) for v in vectors]
    n = len(vectors[0]) if vectors else 0
    out = {tuple([0] * n)}
    for coeffs in product(range(F.q), repeat=len(vectors)):
        w = [0] * n
        for c, v in zip(coeffs, vectors):
            w = [F.add(x, F.mul(c, y)) for x, y in zip(w, v)]
        out.add(tuple(w))
    return frozenset(out)


def dim(F, S):
    d = 0
    while F.q ** d < len(S):
        d += 1
    return d


def degenerate(S, n):
    return any(all(w[j] == 0 for w in S) for j in range(n))


def between(F, X, Y):
    """Subspaces X < A < Y with dim A = dim X + 1."""
    out = set()
    for v in Y - X:
        out.add(span_set(F, [*basis_of(F, X), v]))
    return out


def basis_of(F, S):
    basis, seen = [], {tuple([0] * len(next(iter(S))))}
    for v in sorted(S):
        if v not in seen:
            basis.append(v)
            seen = span_set(F, basis)
    return basis


def as_set(F, rows, n):
    return span_set(F, rows) if rows else frozenset({tuple([0] * n)})


@pytest.mark.parametrize("n,k,q", [(5, 3, 3), (6, 4, 3)])
def test_example_1(n, k, q):
    F = GF(q)
    rep = run_example(1, n, k, q)
    assert rep["ok"], rep
    inst = construct(1, n, k, q)
    X, Y = as_set(F, inst.X, n), as_set(F, inst.Y, n)
    assert dim(F, Y) == k + 1 and not degenerate(Y, n)
    nondeg = [A for A in between(F, X, Y) if not degenerate(A, n)]
    assert nondeg == [span_set(F, [*inst.X, *inst.P])]


@pytest.mark.parametrize("n,k,q", [(5, 2, 3), (6, 3, 3)])
def test_example_2(n, k, q):
    F = GF(q)
    rep = run_example(2, n, k, q)
    assert rep["ok"]
    assert rep["default"]["templated"]["count"] == q + 1
    inst = construct(2, n, k, q)
    X, Y = as_set(F, inst.X, n), as_set(F, inst.Y, n)
    assert not degenerate(Y, n)
    mids = between(F, X, Y)
    assert len(mids) == q + 1 and all(degenerate(A, n) for A in mids)


@pytest.mark.parametrize("n,k,q", [(5, 2, 3), (6, 3, 3)])
def test_example_3(n, k, q):
    F = GF(q)
    rep = run_example(3, n, k, q)
    assert rep["ok"]
    inst = construct(3, n, k, q)
    X1 = as_set(F, inst.extra["X1"], n)
    A2 = as_set(F, inst.extra["A2"], n)
    assert not degenerate(A2, n)
    star = {span_set(F, [*basis_of(F, X1), v]) for v in product(range(q), repeat=n) if v not in X1}
    nbrs = [A for A in star if not degenerate(A, n) and dim(F, A & A2) == k - 1]
    assert star and nbrs == []


@pytest.mark.parametrize("which,n,k,q", [(1, 5, 3, 3), (2, 5, 2, 3), (3, 5, 2, 3), (3, 6, 3, 3)])
def test_completion_sweeps(which, n, k, q):
    sweep = run_example(which, n, k, q, sweep=True)["sweep"]
    assert sweep["completion_independent"] and sweep["failures"] == 0
    # example 3 also ranges over every (k-2)-subspace X' of X
    choices = gaussian_binomial(k - 1, k - 2, q) if which == 3 else 1
    assert sweep["instances"] == q ** free_coordinates(which, n, k, q) * choices


def test_example_pairs_violate_star_lemma():
    delta = delta_of(5, 2, 3)
    X1, X2 = example_3_pair(5, 2, 3)
    r = lemma_S_pair(delta, X1, X2)
    assert r["adjacent"] and not r["mutually_covering"]
    X, Y = example_2_pair(5, 2, 3)
    assert len(Y) == len(X) + 2


@pytest.mark.parametrize("which,n,k,q", [
    (1, 5, 3, 2),   # q = n-k+1 but q < 3
    (1, 5, 2, 3),   # q != n-k+1
    (2, 5, 2, 4),
    (3, 4, 2, 2),   # q = n-k but q < 3
    (4, 5, 2, 3),
    (2, 4, 3, 2),   # k = n-1
])
def test_constraint_errors(which, n, k, q):
    with pytest.raises(ExampleConstraintError):
        construct(which, n, k, q)


def test_bad_completion():
    with pytest.raises(ExampleConstraintError):
        construct(2, 5, 2, 3, completion=(0, 0))
    with pytest.raises(ExampleConstraintError):
        construct(2, 5, 2, 3, completion=(3,))
