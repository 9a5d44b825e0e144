from __future__ import annotations

from functools import lru_cache
from itertools import combinations, product

import pytest

from grassrec.field import GF
from grassrec.graph import maximal_cliques
from grassrec.grassmann import build_delta, classify_maximal_cliques
from grassrec.n4dual import (
    build_dual,
    classify_n4_cliques,
    combinatorial_n4_labels,
    delta_s_prime_census,
    recover_n4,
)
from grassrec.recovery import build_clique_graph, families_from_census, prune
from grassrec.subspace import AmbientSpec, rref_matrices, row_is_degenerate

UNITS = {tuple(int(i == j) for j in range(4)) for i in range(4)}


def span_projective(F, u, v):
    """All nonzero vectors a*u + b*v, brute force."""
    out = set()
    for a, b in product(range(F.q), repeat=2):
        w = tuple(F.add(F.mul(a, x), F.mul(b, y)) for x, y in zip(u, v))
        if any(w):
            out.add(w)
    return out


def normalise(F, w):
    lead = next(x for x in w if x)
    inv = F.inv(lead)
    return tuple(F.mul(inv, x) for x in w)


@lru_cache(maxsize=None)
def dual_of(q):
    return build_dual(AmbientSpec(4, q, 2))


@lru_cache(maxsize=None)
def recovered(q):
    return recover_n4(AmbientSpec(4, q, 2))


@pytest.mark.parametrize("q", [3, 4, 5])
def test_dual_graph_against_oracle(q):
    F = GF(q)
    dual = dual_of(q)
    g = dual.graph
    assert len(dual.points) == q**3 + q**2 + q + 1
    assert sum(p.degenerate for p in dual.points) == 4
    assert {p.normal for p in dual.points if p.degenerate} == UNITS
    normals = [dual.normal(H) for H in g.keys]
    assert not any(n in UNITS for n in normals)
    for u, v in combinations(range(len(g)), 2):
        on_line = {normalise(F, w) for w in span_projective(F, normals[u], normals[v])}
        assert g.adjacent(u, v) == bool(on_line & UNITS)


def test_dual_refuses_other_shapes():
    with pytest.raises(ValueError):
        build_dual(AmbientSpec(5, 3, 2))
    with pytest.raises(ValueError):
        build_dual(AmbientSpec(4, 2, 2))


@pytest.mark.parametrize("q", [3, 5])
def test_recovery_and_census(q):
    rep = recovered(q)["report"]
    assert rep["dual_matches_generic"] and rep["isomorphic"] and rep["violations"] == []
    degenerate_lines = sum(row_is_degenerate(L, 4) for L in rref_matrices(q, 4, 2))
    assert rep["counts"]["special_sets"] == degenerate_lines
    checks = rep["census"]["checks"]
    assert all(checks[k] for k in ("nonlinear_at_most_four", "nonlinear_in_degenerate_plane",
                                   "nonlinear_avoid_pair_lines", "type2_size_q_minus_1"))
    summary = rep["census"]["summary"]
    # lines through two unit points: one per pair, q-1 non-degenerate points each
    assert summary["type2"] == {"count": 6, "sizes": {str(q - 1): 6}}
    assert checks["linear_count"] == degenerate_lines


def test_census_geometric_equals_combinatorial():
    for q in (3, 5):
        census = recovered(q)["census"]
        assert [c.geometric for c in census.cliques] == [c.combinatorial for c in census.cliques]


def test_cardinality_rule_below_threshold():
    # at q = 5 a clique of size 4 can be linear (type 2) or nonlinear
    rule = recovered(5)["census"].cardinality_rule
    assert not rule["applies"]
    assert 4 in rule["linear_sizes"] and 4 in rule["nonlinear_sizes"]


def test_combinatorial_labels_small():
    # two type-2-like lines meeting in one point, one line overlapping both
    cliques = [(0, 1), (2, 3), (0, 2, 4), (1, 3, 4, 5)]
    labels = combinatorial_n4_labels(cliques, 3)
    assert labels[0] == labels[1] == "type2"


def test_classification_from_scratch_matches_recovery():
    dual = dual_of(3)
    census = classify_n4_cliques(dual)
    assert census.summary() == recovered(3)["census"].summary()


@pytest.mark.parametrize("q", [3, 5])
def test_delta_s_prime_census(q):
    kinds = delta_s_prime_census(AmbientSpec(4, q, 2))["kinds"]
    # points with all coordinates nonzero have isolated maximal stars
    assert kinds["isolated_maximal_star"] == (q - 1) ** 3
    for d in range(1, 5):
        assert kinds[f"points_in_C{d}"] == 1
    # cliques made of points on three coordinate lines
    assert kinds["coordinate_lines_star"] == 4
    assert kinds["coordinate_lines_triangle"] == 4
    assert "other" not in kinds


def test_delta_s_prime_adjacency_rule():
    q = 3
    F = GF(q)
    delta = build_delta(AmbientSpec(4, q, 2))
    stars, _ = families_from_census(classify_maximal_cliques(delta))
    g = prune(build_clique_graph(delta.graph, stars, keys=stars.keys)).graph
    for u, v in combinations(range(len(g)), 2):
        (a,), (b,) = g.keys[u], g.keys[v]
        line = span_projective(F, a, b)
        # P + P' is degenerate iff some coordinate vanishes on the whole line
        degenerate = any(all(w[d] == 0 for w in line) for d in range(4))
        assert g.adjacent(u, v) == degenerate
    assert len(maximal_cliques(g)) == 20
