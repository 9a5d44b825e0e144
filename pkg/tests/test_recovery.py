from __future__ import annotations

import pytest

from conftest import census_of, delta_of, gamma_of
from grassrec.counterexamples import example_2_pair, example_3_pair, lemma_S_pair
from grassrec.graph import is_maximal_clique, maximal_cliques
from grassrec.grassmann import combinatorial_labels
from grassrec.linalg import rows_to_text
from grassrec.recovery import (
    AuditGraph,
    CliqueFamily,
    HypothesisError,
    build_clique_graph,
    candidate_special_sets,
    exploratory_diagnostics,
    families_from_census,
    geometric_family,
    prune,
    reconstruct,
    audited_reconstruct,
    recover_and_verify,
    special_sets,
    verify_clique_graph_map,
    verify_lemma_F,
    verify_lemma_S,
    verify_lemma_T,
)
from grassrec.subspace import AmbientSpec, count_points, row_is_degenerate


def test_lemma_S_and_T_hold_under_hypothesis():
    for n, k, q in [(5, 3, 3), (4, 2, 3)]:
        delta = delta_of(n, k, q)
        s, t = verify_lemma_S(delta), verify_lemma_T(delta)
        assert s["ok"] and s["agree"] == s["pairs"]
        assert t["ok"] and t["agree"] == t["pairs"]


def test_lemma_S_violation_regime_contains_example_pair():
    delta = delta_of(5, 2, 3)
    rep = verify_lemma_S(delta)
    assert not rep["hypothesis_holds"]
    assert rep["fails_1_implies_2"] > 0
    X1, X2 = example_3_pair(5, 2, 3)
    pair = lemma_S_pair(delta, X1, X2)
    assert pair["adjacent"] and pair["violates_1_implies_2"]


def test_lemma_F():
    assert verify_lemma_F(AmbientSpec(5, 3, 3))["failures"] == 0
    assert verify_lemma_F(AmbientSpec(4, 3, 2))["failures"] == 0
    rep = verify_lemma_F(AmbientSpec(5, 3, 2), max_examples=10**6)
    X, Y = example_2_pair(5, 2, 3)
    assert {"X": rows_to_text(X), "Y": rows_to_text(Y), "intermediates": 4} in rep["examples"]


def test_clique_graph_maps():
    assert verify_clique_graph_map(delta_of(5, 3, 3), "stars")["isomorphic"]
    assert verify_clique_graph_map(delta_of(5, 3, 3), "tops")["isomorphic"]
    rep = verify_clique_graph_map(delta_of(4, 2, 3), "tops")
    # k = n-2: Δ_t is complete
    assert rep["isomorphic"] and rep["clique_graph_edges"] == 36 * 35 // 2


def test_delta_s_prime_isolates_maximal_stars_at_k2():
    delta = delta_of(4, 2, 3)
    fam = geometric_family(delta, "stars")
    pruned = prune(build_clique_graph(delta.graph, fam, keys=fam.keys)).graph
    for v, X in enumerate(pruned.keys):
        if not row_is_degenerate(X, 4):
            assert pruned.degree(v) == 0


@pytest.mark.parametrize("flavor", ["stars", "tops"])
def test_no_special_sets_at_n4(flavor):
    stars, tops = families_from_census(census_of(4, 2, 3))
    fam = stars if flavor == "stars" else tops
    res = reconstruct(delta_of(4, 2, 3).graph, fam, stars, "blind")
    assert res.specials == []


def test_special_sets_5_3_3_blind_equals_assisted():
    delta = delta_of(5, 3, 3)
    stars, _ = families_from_census(census_of(5, 3, 3))
    unpruned = build_clique_graph(delta.graph, stars)
    pruned = prune(unpruned)
    blind, _ = special_sets(unpruned, pruned, "blind")
    assisted, info = special_sets(unpruned, pruned, "assisted", delta=delta, family=stars)
    assert [s.cliques for s in blind] == [s.cliques for s in assisted]
    assert info["candidates_not_special"] == [] and info["unexpected_special_sets"] == 0
    degenerate = sum(row_is_degenerate(k, 5) for k in gamma_of(5, 3, 3).graph.keys)
    assert len(blind) == degenerate == 190


def test_star_candidates_not_maximal_for_k2():
    delta = delta_of(5, 2, 3)
    stars, _ = families_from_census(census_of_5_2_3())
    unpruned = build_clique_graph(delta.graph, stars)
    cands = candidate_special_sets(delta, stars)
    assert cands
    assert not any(is_maximal_clique(unpruned.graph, c) for c in cands.values())


def census_of_5_2_3():
    return census_of(5, 2, 3)


def test_blind_audit_reads_nothing():
    delta = delta_of(5, 3, 3)
    audit = AuditGraph(delta.graph)
    cliques = maximal_cliques(audit)
    labels = combinatorial_labels(audit, cliques, count_points(3, 3))
    stars = CliqueFamily("stars", [c for c, l in zip(cliques, labels) if l.endswith("star")], [])
    stars.keys = list(range(len(stars.members)))
    res, reads = audited_reconstruct(audit, stars, stars)
    assert reads == [] and audit.reads == []
    assert len(res.specials) == 190


def test_recover_5_3_3_stars():
    rep = recover_and_verify(AmbientSpec(5, 3, 3), "stars", "blind")
    assert rep["asserted"] and rep["isomorphic"] and rep["violations"] == []
    run = rep["runs"][0]
    assert run["counts"]["special_sets"] == run["counts"]["degenerate_subspaces"] == 190
    assert run["counts"]["recovered_vertices"] == run["counts"]["gamma_vertices"]


def test_refusal_and_exploratory():
    with pytest.raises(HypothesisError, match="q <= n-k"):
        recover_and_verify(AmbientSpec(5, 3, 2))
    with pytest.raises(HypothesisError):
        recover_and_verify(AmbientSpec(5, 3, 3), "tops")  # k > n-3
    rep = recover_and_verify(AmbientSpec(5, 3, 2), exploratory=True)
    assert rep["asserted"] is False and rep["exploratory"] is True
    diag = exploratory_diagnostics(AmbientSpec(5, 3, 2))
    assert diag["asserted"] is False and diag["degenerate_subspaces"] > 0


def test_report_is_deterministic_across_threads():
    a = recover_and_verify(AmbientSpec(5, 3, 3), "stars", threads=1)
    b = recover_and_verify(AmbientSpec(5, 3, 3), "stars", threads=3)
    assert a == b


def test_cross_route_comparison_on_self():
    # no desk-scale instance admits both routes; compare a route with itself
    from grassrec.recovery import _cross_route, prepare, run_route
    from grassrec.recovery import RecoveryMap

    run = run_route(prepare(AmbientSpec(5, 3, 3)), "stars")
    assert _cross_route(run, run)
    f = list(run["_map"].f)
    f[0], f[1] = f[1], f[0]
    bad = {**run, "_map": RecoveryMap(run["_map"].flavor, f, run["_map"].targets)}
    assert not _cross_route(run, bad)
