"""Rebuild Γ_k(V) from Δ_k(V) through special sets of stars or tops.

Pipeline: maximal cliques of Δ_k -> star and top families (labelled by size
and intersection rules only) -> clique graphs Δ_x and Δ'_x -> special sets ->
the recovered graph Γ_x.  Everything up to Γ_x reads nothing but Δ_k adjacency
and clique membership.  Subspace payloads are consulted afterwards, to build
the map f used to check Γ_x against a freshly built Γ_k.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Hashable, Literal, Sequence

import numpy as np
from scipy import sparse

from .graph import (
    DEFAULT_CLIQUE_LIMIT,
    CliqueLimitExceeded,
    Graph,
    _expand,
    _local_rows,
    bits_of,
    check_isomorphism_with_map,
    degeneracy_order,
    is_maximal_clique,
    iter_bits,
    maximal_cliques,
)
from .grassmann import (
    Census,
    GrassmannGraph,
    _build,
    build_delta,
    build_gamma,
    classify_maximal_cliques,
)
from .linalg import intersection_rows, rows_to_text, rref_rows
from .subspace import AmbientSpec, row_is_degenerate, rref_matrices, superspaces_rows

Flavor = Literal["stars", "tops"]
Key = tuple

BLIND_VERTEX_THRESHOLD = 2000


class HypothesisError(ValueError):
    """The instance is outside the range where recovery is asserted."""


# ---------------------------------------------------------------------------
# clique families


@dataclass
class CliqueFamily:
    """Stars or tops of Δ_k as vertex sets; ``keys`` are defining subspaces
    kept for reporting only."""

    flavor: Flavor
    members: list[tuple[int, ...]]
    keys: list[Key]

    def __len__(self) -> int:
        return len(self.members)


def families_from_census(census: Census) -> tuple[CliqueFamily, CliqueFamily]:
    """Split a census by its combinatorial labels into stars and tops."""
    stars = [e for e in census.entries if e.combinatorial in ("maximal_star", "nonmaximal_star")]
    tops = [e for e in census.entries if e.combinatorial == "top"]
    return (CliqueFamily("stars", [e.members for e in stars], [e.defining for e in stars]),
            CliqueFamily("tops", [e.members for e in tops], [e.defining for e in tops]))


def geometric_family(delta: GrassmannGraph, flavor: Flavor, maximal_only: bool = True) -> CliqueFamily:
    """S^c(X) for all (k-1)-subspaces X, or T^c(Y) for non-degenerate (k+1)-subspaces Y."""
    members, keys = [], []
    if flavor == "stars":
        source = [(X, delta.star_members(X)) for X in rref_matrices(delta.ambient.q, delta.n, delta.k - 1)]
    else:
        source = [(Y, delta.top_members(Y)) for Y in rref_matrices(delta.ambient.q, delta.n, delta.k + 1)
                  if not row_is_degenerate(Y, delta.n)]
    for key, m in source:
        if not m:
            continue
        if maximal_only and not is_maximal_clique(delta.graph, m):
            continue
        members.append(m)
        keys.append(key)
    order = sorted(range(len(members)), key=lambda i: members[i])
    return CliqueFamily(flavor, [members[i] for i in order], [keys[i] for i in order])


# ---------------------------------------------------------------------------
# clique graphs Δ_x and Δ'_x


def _adjacency_matrix(graph: Graph) -> sparse.csr_matrix:
    rows = np.repeat(np.arange(len(graph)), [len(ns) for ns in graph.nbrs])
    cols = np.fromiter((v for ns in graph.nbrs for v in ns), dtype=np.int64, count=len(rows))
    data = np.ones(len(rows), dtype=np.float32)
    return sparse.csr_matrix((data, (rows, cols)), shape=(len(graph), len(graph)))


def _membership_matrix(nvertices: int, members: Sequence[tuple[int, ...]]) -> sparse.csr_matrix:
    """Vertex x clique incidence."""
    rows = np.fromiter((v for m in members for v in m), dtype=np.int64)
    cols = np.repeat(np.arange(len(members)), [len(m) for m in members])
    data = np.ones(len(rows), dtype=np.float32)
    return sparse.csr_matrix((data, (rows, cols)), shape=(nvertices, len(members)))


def _graph_from_bool(keys: Sequence[Hashable], adj: np.ndarray, name: str) -> Graph:
    g = Graph(keys, [np.flatnonzero(row).tolist() for row in adj], name)
    packed = np.packbits(adj, axis=1, bitorder="little")
    g._bits = [int.from_bytes(row.tobytes(), "little") for row in packed]
    return g


@dataclass
class CliqueGraph:
    flavor: Flavor
    pruned: bool
    graph: Graph
    members: list[tuple[int, ...]]
    nvertices: int


def covering_matrix(delta_graph: Graph, members: Sequence[tuple[int, ...]], threads: int = 1) -> np.ndarray:
    """covers[i, j]: every vertex of clique i has a Δ_k-neighbour in clique j."""
    A = _adjacency_matrix(delta_graph)
    inc = _membership_matrix(len(delta_graph), members)
    hit = (A @ inc).toarray() > 0
    miss = (~hit).astype(np.float32)
    inc_t = inc.T.tocsr()
    C = len(members)
    chunk = 512
    starts = list(range(0, C, chunk))

    def block(s: int) -> np.ndarray:
        return np.asarray(inc_t[s:s + chunk] @ miss) == 0

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            blocks = list(pool.map(block, starts))
    else:
        blocks = [block(s) for s in starts]
    return np.vstack(blocks) if blocks else np.zeros((0, 0), dtype=bool)


def intersecting_matrix(nvertices: int, members: Sequence[tuple[int, ...]]) -> np.ndarray:
    inc = _membership_matrix(nvertices, members)
    return (inc.T @ inc).toarray() > 0


def build_clique_graph(delta_graph: Graph, family: CliqueFamily, threads: int = 1,
                       keys: Sequence[Hashable] | None = None) -> CliqueGraph:
    """Δ_x: cliques adjacent when each one's every vertex has a neighbour in the other."""
    covers = covering_matrix(delta_graph, family.members, threads)
    adj = covers & covers.T
    np.fill_diagonal(adj, False)
    keys = list(keys) if keys is not None else list(range(len(family)))
    name = "Delta_s" if family.flavor == "stars" else "Delta_t"
    return CliqueGraph(family.flavor, False, _graph_from_bool(keys, adj, name), list(family.members), len(delta_graph))


def prune(cg: CliqueGraph) -> CliqueGraph:
    """Δ'_x: drop edges between intersecting cliques."""
    meets = intersecting_matrix(cg.nvertices, cg.members)
    N = len(cg.graph)
    adj = np.zeros((N, N), dtype=bool)
    for u, ns in enumerate(cg.graph.nbrs):
        adj[u, list(ns)] = True
    adj &= ~meets
    name = cg.graph.name + "'"
    return CliqueGraph(cg.flavor, True, _graph_from_bool(cg.graph.keys, adj, name), cg.members, cg.nvertices)


# ---------------------------------------------------------------------------
# special sets


@dataclass
class SpecialSet:
    flavor: Flavor
    cliques: tuple[int, ...]
    recovered: Key | None = None


def _special_blind(unpruned: CliqueGraph, pruned: CliqueGraph, limit: int) -> list[tuple[int, ...]]:
    return [c for c in maximal_cliques(pruned.graph, limit) if is_maximal_clique(unpruned.graph, c)]


def _special_streaming(unpruned: CliqueGraph, pruned: CliqueGraph, per_vertex_limit: int) -> list[tuple[int, ...]]:
    """Local search from every Δ'_x vertex, keeping only cliques maximal in Δ_x.

    Same enumeration as the blind mode, but nothing except special sets is
    stored, so the global clique limit does not apply.
    """
    G = pruned.graph
    order = degeneracy_order(G)
    rank = {v: i for i, v in enumerate(order)}
    found = []
    for v in order:
        nb = list(G.nbrs[v])
        local = _local_rows(G, None, nb)
        P = bits_of(i for i, w in enumerate(nb) if rank[w] > rank[v])
        X = bits_of(i for i, w in enumerate(nb) if rank[w] < rank[v])
        out: list[tuple[int, ...]] = []
        _expand(local, [], P, X, out, per_vertex_limit)
        for c in out:
            clique = tuple(sorted([v] + [nb[i] for i in c]))
            if is_maximal_clique(unpruned.graph, clique):
                found.append(clique)
    return sorted(found)


def candidate_special_sets(delta: GrassmannGraph, family: CliqueFamily) -> dict[Key, tuple[int, ...]]:
    """𝔖_X / 𝔗_X for each degenerate k-subspace X, as indices into ``family``."""
    F, n, k = delta.field, delta.n, delta.k
    out: dict[Key, list[int]] = {}
    if family.flavor == "stars":
        for i, X in enumerate(family.keys):
            for A in superspaces_rows(F, X, n, k):
                if row_is_degenerate(A, n):
                    out.setdefault(A, []).append(i)
    else:
        from .subspace import subspaces_of_rows

        for i, Y in enumerate(family.keys):
            for A in subspaces_of_rows(F, Y, n, k):
                if row_is_degenerate(A, n):
                    out.setdefault(A, []).append(i)
    return {X: tuple(sorted(v)) for X, v in sorted(out.items())}


def special_sets(unpruned: CliqueGraph, pruned: CliqueGraph, mode: str = "auto",
                 limit: int = DEFAULT_CLIQUE_LIMIT, delta: GrassmannGraph | None = None,
                 family: CliqueFamily | None = None) -> tuple[list[SpecialSet], dict]:
    """Special sets: maximal cliques of Δ'_x that are also maximal in Δ_x.

    ``blind`` enumerates all maximal cliques of Δ'_x.  ``assisted`` checks the
    candidates 𝔖_X / 𝔗_X built from the geometry and then confirms by a
    streaming local search that nothing else qualifies.  ``auto`` picks blind
    up to BLIND_VERTEX_THRESHOLD clique-graph vertices.
    """
    if mode == "auto":
        mode = "blind" if len(pruned.graph) <= BLIND_VERTEX_THRESHOLD else "assisted"
    info: dict = {"mode": mode}
    if mode == "blind":
        try:
            found = _special_blind(unpruned, pruned, limit)
        except CliqueLimitExceeded as exc:
            raise CliqueLimitExceeded(exc.found, exc.limit) from exc
    elif mode == "assisted":
        if delta is None or family is None:
            raise ValueError("assisted mode needs the Δ_k instance and the keyed clique family")
        cands = candidate_special_sets(delta, family)
        bad = [rows_to_text(X) for X, c in cands.items()
               if not (is_maximal_clique(pruned.graph, c) and is_maximal_clique(unpruned.graph, c))]
        info["candidates"] = len(cands)
        info["candidates_not_special"] = bad
        found = _special_streaming(unpruned, pruned, limit)
        extra = sorted(set(found) - set(cands.values()))
        info["unexpected_special_sets"] = len(extra)
    else:
        raise ValueError(f"unknown special-set mode {mode!r}")
    return [SpecialSet(unpruned.flavor, c) for c in found], info


# ---------------------------------------------------------------------------
# recovered graph


@dataclass
class RecoveryMap:
    flavor: str
    f: list[int]
    targets: list[Key] = field(default_factory=list)


def build_recovered_graph(delta_graph: Graph, family: CliqueFamily, specials: Sequence[SpecialSet],
                          star_members: Sequence[tuple[int, ...]] | None = None,
                          name: str = "") -> Graph:
    """Γ_s / Γ_t: Δ_k's vertices plus one vertex per special set.

    Edge rules: Δ_k edges; a subspace joins a special set when it lies in
    one of its cliques; two special sets of stars join when they share a
    star; two special sets of tops join when some star of Δ_k meets every
    top of both.
    """
    V = len(delta_graph)
    S = len(specials)
    nb: list[set[int]] = [set(ns) for ns in delta_graph.nbrs] + [set() for _ in range(S)]
    for s, sp in enumerate(specials):
        covered = set()
        for c in sp.cliques:
            covered.update(family.members[c])
        for v in covered:
            nb[v].add(V + s)
            nb[V + s].add(v)
    if family.flavor == "stars":
        for s in range(S):
            mine = set(specials[s].cliques)
            for t in range(s + 1, S):
                if mine.intersection(specials[t].cliques):
                    nb[V + s].add(V + t)
                    nb[V + t].add(V + s)
    else:
        if star_members is None:
            raise ValueError("the tops rule needs the stars of Δ_k")
        meets = (_membership_matrix(V, star_members).T @ _membership_matrix(V, family.members)).toarray() > 0
        # hits[star, special]: the star meets every top of the special set
        hits = np.stack([meets[:, list(sp.cliques)].all(axis=1) for sp in specials], axis=1) \
            if S else np.zeros((len(star_members), 0), dtype=bool)
        joint = (hits.T.astype(np.int64) @ hits.astype(np.int64)) > 0
        for s in range(S):
            for t in range(s + 1, S):
                if joint[s, t]:
                    nb[V + s].add(V + t)
                    nb[V + t].add(V + s)
    keys = list(range(V)) + [("special", s) for s in range(S)]
    return Graph(keys, nb, name or ("Gamma_s" if family.flavor == "stars" else "Gamma_t"))


def recovery_map(delta: GrassmannGraph, gamma: GrassmannGraph, family: CliqueFamily,
                 specials: Sequence[SpecialSet]) -> RecoveryMap:
    """f: identity on Δ_k, special set -> the k-subspace its cliques determine.

    For stars the k-subspace is the sum of the stars' (k-1)-subspaces; for
    tops it is the intersection of the tops' (k+1)-subspaces.
    """
    F, n = delta.field, delta.n
    f = [gamma.graph.index[key] for key in delta.graph.keys]
    targets = []
    for sp in specials:
        keys = [family.keys[c] for c in sp.cliques]
        if family.flavor == "stars":
            X = rref_rows(F, [r for key in keys for r in key], n)[0]
        else:
            X = keys[0]
            for key in keys[1:]:
                X = intersection_rows(F, X, key, n)
        sp.recovered = X
        targets.append(X)
        f.append(gamma.graph.index.get(X, -1))
    return RecoveryMap(family.flavor, f, targets)


# ---------------------------------------------------------------------------
# audit: the reconstruction must not look at payloads


class AuditGraph(Graph):
    """A Graph with opaque integer keys that records reads of key data."""

    def __init__(self, graph: Graph):
        object.__setattr__(self, "_reads", [])
        super().__init__(list(range(len(graph))), graph.nbrs, graph.name)
        self._bits = graph._bits
        self._reads.clear()

    def __len__(self) -> int:
        return len(self.nbrs)

    def __getattribute__(self, name):
        if name in ("keys", "index"):
            object.__getattribute__(self, "_reads").append(name)
        return object.__getattribute__(self, name)

    @property
    def reads(self) -> list[str]:
        return object.__getattribute__(self, "_reads")


def _strip_family(family: CliqueFamily) -> CliqueFamily:
    return CliqueFamily(family.flavor, list(family.members), list(range(len(family))))


@dataclass
class BlindResult:
    unpruned: CliqueGraph
    pruned: CliqueGraph
    specials: list[SpecialSet]
    recovered: Graph
    info: dict


def reconstruct(delta_graph: Graph, family: CliqueFamily, stars: CliqueFamily | None = None,
                mode: str = "auto", limit: int = DEFAULT_CLIQUE_LIMIT, threads: int = 1,
                delta: GrassmannGraph | None = None) -> BlindResult:
    """Δ_x, Δ'_x, special sets and Γ_x from Δ_k adjacency and clique membership."""
    unpruned = build_clique_graph(delta_graph, family, threads)
    pruned = prune(unpruned)
    specials, info = special_sets(unpruned, pruned, mode, limit, delta, family)
    recovered = build_recovered_graph(delta_graph, family, specials,
                                      stars.members if stars is not None else None)
    return BlindResult(unpruned, pruned, specials, recovered, info)


def audited_reconstruct(delta_graph: Graph, family: CliqueFamily, stars: CliqueFamily | None = None,
                        limit: int = DEFAULT_CLIQUE_LIMIT, threads: int = 1) -> tuple[BlindResult, list[str]]:
    """Blind reconstruction on payload-free inputs; returns the result and
    the list of key reads recorded on the Δ_k graph (expected empty)."""
    g = AuditGraph(delta_graph)
    res = reconstruct(g, _strip_family(family), _strip_family(stars) if stars else None,
                      "blind", limit, threads)
    reads = list(g.reads)
    return res, reads


# ---------------------------------------------------------------------------
# lemma checks


def _graph_on(ambient: AmbientSpec, d: int, kind: str) -> GrassmannGraph:
    return _build(AmbientSpec(ambient.n, ambient.q, d), kind, 10**9, strict=False)


def verify_lemma_S(delta: GrassmannGraph, threads: int = 1, max_examples: int = 20) -> dict:
    """Stars S^c(X1), S^c(X2): X1 ~ X2 in Γ_{k-1}  <=>  mutual covering."""
    fam = geometric_family(delta, "stars")
    return _lemma_scan(delta, fam, _graph_on(delta.ambient, delta.k - 1, "full"), threads, max_examples)


def verify_lemma_T(delta: GrassmannGraph, threads: int = 1, max_examples: int = 20) -> dict:
    """Tops T^c(Y1), T^c(Y2): Y1 ~ Y2 in Γ_{k+1}  <=>  mutual covering."""
    fam = geometric_family(delta, "tops")
    return _lemma_scan(delta, fam, _graph_on(delta.ambient, delta.k + 1, "full"), threads, max_examples)


def verify_clique_graph_map(delta: GrassmannGraph, flavor: Flavor, threads: int = 1) -> dict:
    """Δ_s ≅ Γ_{k-1}(V) via S^c(X) -> X, or Δ_t ≅ Δ_{k+1}(V) via T^c(Y) -> Y."""
    fam = geometric_family(delta, flavor)
    if flavor == "stars":
        ref = _graph_on(delta.ambient, delta.k - 1, "full")
    else:
        ref = _graph_on(delta.ambient, delta.k + 1, "nondegenerate")
    cg = build_clique_graph(delta.graph, fam, threads)
    f = [ref.graph.index.get(key, -1) for key in fam.keys]
    iso = check_isomorphism_with_map(cg.graph, ref.graph, f)
    return {"instance": delta.ambient.to_json(), "flavor": flavor, "clique_graph_vertices": len(cg.graph),
            "clique_graph_edges": cg.graph.edge_count(), "reference": ref.graph.name,
            "reference_vertices": len(ref.graph), "reference_edges": ref.graph.edge_count(),
            **iso.to_json()}


def _lemma_scan(delta, fam: CliqueFamily, ref: GrassmannGraph, threads: int, max_examples: int) -> dict:
    covers = covering_matrix(delta.graph, fam.members, threads)
    cond2 = covers & covers.T
    idx = [ref.graph.index[key] for key in fam.keys]
    ref_bits = ref.graph.bits
    N = len(fam)
    agree = 0
    forward, backward = [], []
    n_fwd = n_bwd = 0
    for i in range(N):
        row = ref_bits[idx[i]]
        for j in range(i + 1, N):
            c1 = (row >> idx[j]) & 1 == 1
            c2 = bool(cond2[i, j])
            if c1 == c2:
                agree += 1
            elif c1:
                n_fwd += 1
                if len(forward) < max_examples:
                    forward.append([rows_to_text(fam.keys[i]), rows_to_text(fam.keys[j])])
            else:
                n_bwd += 1
                if len(backward) < max_examples:
                    backward.append([rows_to_text(fam.keys[i]), rows_to_text(fam.keys[j])])
    q, n, k = delta.ambient.q, delta.n, delta.k
    return {
        "instance": delta.ambient.to_json(),
        "flavor": fam.flavor,
        "cliques": N,
        "pairs": N * (N - 1) // 2,
        "agree": agree,
        "fails_1_implies_2": n_fwd,
        "fails_2_implies_1": n_bwd,
        "examples_1_not_2": forward,
        "examples_2_not_1": backward,
        "hypothesis_holds": q > n - k,
        "ok": n_fwd == 0 and n_bwd == 0,
    }


def verify_lemma_F(ambient: AmbientSpec, max_examples: int = 20) -> dict:
    """Every non-degenerate (k+1)-subspace Y and (k-1)-subspace X ⊂ Y admit a
    non-degenerate k-subspace strictly between them."""
    from .subspace import subspaces_of_rows

    ambient.require_recovery_range()
    F, n, k, q = ambient.field, ambient.n, ambient.k, ambient.q
    pairs = failures = 0
    examples = []
    for Y in rref_matrices(q, n, k + 1):
        if row_is_degenerate(Y, n):
            continue
        for X in subspaces_of_rows(F, Y, n, k - 1):
            pairs += 1
            between = [A for A in superspaces_rows(F, X, n, k)
                       if len(rref_rows(F, A + Y, n)[0]) == k + 1]
            if all(row_is_degenerate(A, n) for A in between):
                failures += 1
                if len(examples) < max_examples:
                    examples.append({"X": rows_to_text(X), "Y": rows_to_text(Y), "intermediates": len(between)})
    return {"instance": ambient.to_json(), "pairs": pairs, "failures": failures, "examples": examples,
            "hypothesis_holds": q > n - k, "ok": failures == 0}


# ---------------------------------------------------------------------------
# end-to-end


def hypothesis_check(ambient: AmbientSpec, flavor: str) -> str | None:
    n, k, q = ambient.n, ambient.k, ambient.q
    if q <= n - k:
        return f"q <= n-k ({q} <= {n - k}): recovery is only asserted for q > n-k"
    if flavor == "stars" and k < 3:
        return f"the stars route needs k >= 3 (k={k})"
    if flavor == "tops" and k > n - 3:
        return f"the tops route needs k <= n-3 (k={k}, n={n})"
    if flavor == "n4" and (n, k) != (4, 2):
        return f"the n4 route is for (n, k) = (4, 2), got ({n}, {k})"
    return None


def choose_routes(ambient: AmbientSpec, route: str) -> list[str]:
    n, k = ambient.n, ambient.k
    if route != "auto":
        return [route]
    if (n, k) == (4, 2):
        return ["n4"]
    routes = []
    if k >= 3:
        routes.append("stars")
    if k <= n - 3:
        routes.append("tops")
    return routes


@dataclass
class PipelineState:
    ambient: AmbientSpec
    delta: GrassmannGraph
    gamma: GrassmannGraph
    census: Census
    stars: CliqueFamily
    tops: CliqueFamily


def prepare(ambient: AmbientSpec, limit: int = DEFAULT_CLIQUE_LIMIT) -> PipelineState:
    delta = build_delta(ambient)
    gamma = build_gamma(ambient)
    census = classify_maximal_cliques(delta, limit)
    stars, tops = families_from_census(census)
    return PipelineState(ambient, delta, gamma, census, stars, tops)


def run_route(state: PipelineState, flavor: Flavor, mode: str = "auto", limit: int = DEFAULT_CLIQUE_LIMIT,
              threads: int = 1) -> dict:
    delta, gamma = state.delta, state.gamma
    family = state.stars if flavor == "stars" else state.tops
    violations = []
    geo = geometric_family(delta, flavor)
    if sorted(geo.members) != sorted(family.members):
        violations.append(f"{flavor} found by clique census differ from the geometric {flavor}")
    res = reconstruct(delta.graph, family, state.stars, mode, limit, threads, delta)
    fmap = recovery_map(delta, gamma, family, res.specials)
    degenerate = [v for v, key in enumerate(gamma.graph.keys) if row_is_degenerate(key, delta.n)]
    targets = fmap.f[len(delta.graph):]
    if any(t < 0 for t in targets):
        violations.append("a special set does not determine a k-subspace")
    if sorted(targets) != degenerate:
        violations.append("special sets do not match the degenerate k-subspaces one-to-one")
    if fmap.f[:len(delta.graph)] != [gamma.graph.index[key] for key in delta.graph.keys]:
        violations.append("f is not the identity on Δ_k")
    if res.info.get("candidates_not_special"):
        violations.append(f"{len(res.info['candidates_not_special'])} candidate sets are not special")
    if res.info.get("unexpected_special_sets"):
        violations.append(f"{res.info['unexpected_special_sets']} special sets outside the candidates")
    iso = check_isomorphism_with_map(res.recovered, gamma.graph, fmap.f) if not violations else None
    if iso is not None and not iso:
        u, v = iso.violation if iso.violation else (None, None)
        violations.append(f"isomorphism check failed: {iso.reason} at {u},{v}")
    return {
        "route": flavor,
        "special_set_mode": res.info["mode"],
        "counts": {
            "delta_vertices": len(delta.graph),
            "gamma_vertices": len(gamma.graph),
            "recovered_vertices": len(res.recovered),
            "clique_graph_vertices": len(res.unpruned.graph),
            "clique_graph_edges": res.unpruned.graph.edge_count(),
            "pruned_edges": res.pruned.graph.edge_count(),
            "special_sets": len(res.specials),
            "degenerate_subspaces": len(degenerate),
        },
        "isomorphic": bool(iso) if iso is not None else False,
        "violations": violations,
        "_result": res,
        "_map": fmap,
    }


def recover_and_verify(ambient: AmbientSpec, route: str = "auto", mode: str = "auto",
                       exploratory: bool = False, limit: int = DEFAULT_CLIQUE_LIMIT,
                       threads: int = 1, timings: bool = False) -> dict:
    """Run the whole reconstruction and check it against Γ_k.

    Raises HypothesisError when q <= n-k (or the route's own hypothesis
    fails) unless ``exploratory``; exploratory reports never assert success.
    """
    ambient.require_recovery_range()
    t0 = time.perf_counter()
    routes = choose_routes(ambient, route)
    problems = [p for p in (hypothesis_check(ambient, r) for r in routes) if p]
    if not routes:
        problems.append("no route applies")
    if problems and not exploratory:
        raise HypothesisError("; ".join(problems))
    report: dict = {"instance": ambient.to_json(), "route": route, "routes": routes,
                    "asserted": not problems, "hypothesis": problems}
    if routes == ["n4"]:
        from .n4dual import recover_n4_report

        body = recover_n4_report(ambient, limit)
        report.update(body)
    else:
        state = prepare(ambient, limit)
        runs = [run_route(state, r, mode, limit, threads) for r in routes]
        if len(runs) == 2 and all(r["isomorphic"] for r in runs):
            report["cross_route"] = _cross_route(runs[0], runs[1])
        report["runs"] = [{k: v for k, v in r.items() if not k.startswith("_")} for r in runs]
        report["counts"] = runs[0]["counts"] if runs else {}
        report["isomorphic"] = bool(runs) and all(r["isomorphic"] for r in runs)
        report["violations"] = [v for r in runs for v in r["violations"]]
        if report.get("cross_route") is False:
            report["violations"].append("stars and tops reconstructions disagree")
            report["isomorphic"] = False
    if not report["asserted"]:
        report["exploratory"] = True
    if timings:
        report["runtime"] = round(time.perf_counter() - t0, 3)
    return report


def _cross_route(a: dict, b: dict) -> bool:
    """Γ_s and Γ_t agree under f_t^{-1} ∘ f_s."""
    fa, fb = a["_map"].f, b["_map"].f
    inv_b = {t: i for i, t in enumerate(fb)}
    composed = [inv_b[t] for t in fa]
    return bool(check_isomorphism_with_map(a["_result"].recovered, b["_result"].recovered, composed))


def exploratory_diagnostics(ambient: AmbientSpec, limit: int = DEFAULT_CLIQUE_LIMIT, threads: int = 1) -> dict:
    """Special-set counts versus degenerate k-subspaces for any q (nothing asserted)."""
    state = prepare(ambient, limit)
    degenerate = sum(row_is_degenerate(key, ambient.n) for key in state.gamma.graph.keys)
    out = {"instance": ambient.to_json(), "degenerate_subspaces": degenerate, "asserted": False}
    for flavor in ("stars", "tops"):
        fam = state.stars if flavor == "stars" else state.tops
        if not len(fam):
            out[flavor] = {"cliques": 0}
            continue
        res = reconstruct(state.delta.graph, fam, state.stars, "blind", limit, threads)
        out[flavor] = {"cliques": len(fam), "special_sets": len(res.specials)}
    return out
