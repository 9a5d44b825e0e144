"""Grassmann graphs Γ_k(V), their non-degenerate subgraphs Δ_k(V), and the
star/top clique families inside them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Literal

from .field import GF
from .graph import DEFAULT_CLIQUE_LIMIT, Graph, bits_of, is_maximal_clique, iter_bits, maximal_cliques
from .linalg import Row, intersection_rows, rank_rows, rows_to_text, rref_rows
from .subspace import (
    DEFAULT_SUBSPACE_CAP,
    AmbientSpec,
    Subspace,
    count_points,
    gaussian_binomial,
    rref_matrices,
    row_is_degenerate,
    subspaces_of_rows,
    superspaces_rows,
)

Key = tuple[Row, ...]


class CliqueClassificationError(AssertionError):
    """Geometric and combinatorial labels of a maximal clique disagree."""


@dataclass
class GrassmannGraph:
    ambient: AmbientSpec
    kind: Literal["full", "nondegenerate"]
    graph: Graph
    star_groups: dict[Key, tuple[int, ...]]

    @property
    def field(self) -> GF:
        return GF(self.ambient.q)

    @property
    def n(self) -> int:
        return self.ambient.n

    @property
    def k(self) -> int:
        return self.ambient.k

    @property
    def spaces(self) -> list[Key]:
        return self.graph.keys

    def subspace(self, v: int) -> Subspace:
        return Subspace(self.field, self.n, self.graph.keys[v])

    def vertex(self, S: Subspace | Key) -> int | None:
        key = S.rows if isinstance(S, Subspace) else S
        return self.graph.index.get(key)

    @cached_property
    def top_groups(self) -> dict[Key, tuple[int, ...]]:
        """(k+1)-subspace -> vertices of the graph inside it (non-empty groups only)."""
        F, n = self.field, self.n
        groups: dict[Key, list[int]] = {}
        for v, rows in enumerate(self.graph.keys):
            for Y in superspaces_rows(F, rows, n, self.k + 1):
                groups.setdefault(Y, []).append(v)
        return {Y: tuple(vs) for Y, vs in sorted(groups.items())}

    def star_members(self, X: Key) -> tuple[int, ...]:
        return self.star_groups.get(X, ())

    def top_members(self, Y: Key) -> tuple[int, ...]:
        return self.top_groups.get(Y, ())

    def to_json(self) -> dict:
        out = self.graph.to_json(rows_to_text)
        out.update({"n": self.n, "k": self.k, "q": self.ambient.q, "kind": self.kind})
        return out


def _check_ambient(ambient: AmbientSpec) -> None:
    ambient.require_recovery_range()


def _build(ambient: AmbientSpec, kind: str, cap: int, strict: bool = True) -> GrassmannGraph:
    if strict:
        _check_ambient(ambient)
    elif ambient.k is None or not 1 <= ambient.k <= ambient.n - 1:
        raise ValueError(f"need 1 <= k <= n-1, got n={ambient.n}, k={ambient.k}")
    F, n, k = ambient.field, ambient.n, ambient.k
    count = gaussian_binomial(n, k, F.q)
    if count > cap:
        from .subspace import EnumerationCapExceeded

        raise EnumerationCapExceeded(count, cap)
    spaces = [rows for rows in rref_matrices(F.q, n, k) if kind == "full" or not row_is_degenerate(rows, n)]
    groups: dict[Key, list[int]] = {}
    for v, rows in enumerate(spaces):
        for X in subspaces_of_rows(F, rows, n, k - 1):
            groups.setdefault(X, []).append(v)
    # Each group of k-subspaces through a common (k-1)-subspace is a clique,
    # and two adjacent vertices share exactly one such subspace.
    rows_bits = [0] * len(spaces)
    for members in groups.values():
        mask = bits_of(members)
        for v in members:
            rows_bits[v] |= mask
    for v in range(len(spaces)):
        rows_bits[v] &= ~(1 << v)
    name = f"Gamma_{k}({n},{F.q})" if kind == "full" else f"Delta_{k}({n},{F.q})"
    graph = Graph.from_bits(spaces, rows_bits, name)
    graph._bits = rows_bits
    star_groups = {X: tuple(vs) for X, vs in sorted(groups.items())}
    return GrassmannGraph(ambient, kind, graph, star_groups)


def build_gamma(ambient: AmbientSpec, cap: int = DEFAULT_SUBSPACE_CAP) -> GrassmannGraph:
    return _build(ambient, "full", cap)


def build_delta(ambient: AmbientSpec, cap: int = DEFAULT_SUBSPACE_CAP) -> GrassmannGraph:
    return _build(ambient, "nondegenerate", cap)


def pairwise_adjacent(F: GF, n: int, k: int, a: Key, b: Key) -> bool:
    """Adjacency from both dimension formulas; raises if they disagree."""
    if a == b:
        return False
    by_sum = rank_rows(F, a + b, n) == k + 1
    by_meet = len(intersection_rows(F, a, b, n)) == k - 1
    if by_sum != by_meet:
        raise AssertionError(f"dimension formulas disagree on {rows_to_text(a)} / {rows_to_text(b)}")
    return by_sum


@dataclass
class AdjacencyCheck:
    pairs_checked: int
    mismatches: list[tuple[int, int]]
    exhaustive: bool

    @property
    def ok(self) -> bool:
        return not self.mismatches


def verify_adjacency(gg: GrassmannGraph, sample: int | None = None, seed: int = 0) -> AdjacencyCheck:
    """Compare grouped adjacency with pairwise rank computations.

    ``sample=None`` checks every pair; otherwise that many random pairs,
    half of them drawn from neighbour lists so edges are well represented.
    """
    F, n, k = gg.field, gg.n, gg.k
    keys = gg.graph.keys
    N = len(keys)
    mismatches = []
    if sample is None:
        pairs: Iterable[tuple[int, int]] = ((u, v) for u in range(N) for v in range(u + 1, N))
        total = N * (N - 1) // 2
    else:
        rng = random.Random(seed)
        pairs = []
        nbrs = gg.graph.nbrs
        for i in range(sample):
            u = rng.randrange(N)
            if i % 2 and nbrs[u]:
                v = rng.choice(nbrs[u])
            else:
                v = rng.randrange(N)
                while v == u:
                    v = rng.randrange(N)
            pairs.append((u, v))
        total = sample
    for u, v in pairs:
        if pairwise_adjacent(F, n, k, keys[u], keys[v]) != gg.graph.adjacent(u, v):
            mismatches.append((u, v))
    return AdjacencyCheck(total, mismatches, sample is None)


# ---------------------------------------------------------------------------
# star and top cliques


@dataclass
class TaggedClique:
    kind: Literal["star", "top"]
    defining: Key
    members: tuple[int, ...]
    maximal: bool
    restricted: bool = True

    @property
    def size(self) -> int:
        return len(self.members)

    def to_json(self) -> dict:
        return {"kind": self.kind, "defining": rows_to_text(self.defining), "size": self.size,
                "maximal": self.maximal}


def _require_dim(S: Subspace | Key, d: int, what: str) -> Key:
    key = S.rows if isinstance(S, Subspace) else S
    if len(key) != d:
        raise ValueError(f"{what} must have dimension {d}, got {len(key)}")
    return key


def star_c(delta: GrassmannGraph, X: Subspace | Key) -> TaggedClique:
    key = _require_dim(X, delta.k - 1, "X")
    members = delta.star_members(key)
    maximal = bool(members) and is_maximal_clique(delta.graph, members)
    return TaggedClique("star", key, members, maximal, delta.kind == "nondegenerate")


def top_c(delta: GrassmannGraph, Y: Subspace | Key) -> TaggedClique:
    key = _require_dim(Y, delta.k + 1, "Y")
    members = delta.top_members(key)
    maximal = bool(members) and is_maximal_clique(delta.graph, members)
    return TaggedClique("top", key, members, maximal, delta.kind == "nondegenerate")


def all_stars(delta: GrassmannGraph) -> list[TaggedClique]:
    """S^c(X) for every (k-1)-subspace X, including empty ones."""
    F = delta.field
    return [star_c(delta, X) for X in rref_matrices(F.q, delta.n, delta.k - 1)]


def nondegenerate_tops(delta: GrassmannGraph) -> list[TaggedClique]:
    """T^c(Y) for every non-degenerate (k+1)-subspace Y."""
    F = delta.field
    return [top_c(delta, Y) for Y in rref_matrices(F.q, delta.n, delta.k + 1)
            if not row_is_degenerate(Y, delta.n)]


def verify_star_proposition(delta: GrassmannGraph) -> dict:
    """Every S^c(X) is a maximal clique of Δ_k and no T^c(Y) (q >= 3);
    for q = 2 compare maximality with the hyperplane-count criterion."""
    F, n, k, q = delta.field, delta.n, delta.k, delta.ambient.q
    report = {"instance": delta.ambient.to_json(), "stars": 0, "violations": [], "mode": "q>=3" if q >= 3 else "q=2"}
    crit_agree = crit_disagree = 0
    for X in rref_matrices(q, n, k - 1):
        st = star_c(delta, X)
        report["stars"] += 1
        if q >= 3:
            if not st.maximal:
                report["violations"].append({"X": rows_to_text(X), "reason": "not maximal"})
            if st.size < 2:
                report["violations"].append({"X": rows_to_text(X), "reason": "fewer than two vertices"})
            span = rref_rows(F, [r for v in st.members for r in delta.graph.keys[v]], n)[0]
            if len(span) == k + 1 and set(delta.top_members(span)) == set(st.members):
                report["violations"].append({"X": rows_to_text(X), "reason": f"equals T^c({rows_to_text(span)})"})
        else:
            hyperplanes = len(Subspace(F, n, X).degenerate_witness())
            criterion = hyperplanes <= n - k - 1
            if criterion == st.maximal:
                crit_agree += 1
            else:
                crit_disagree += 1
                report["violations"].append({"X": rows_to_text(X), "maximal": st.maximal,
                                             "hyperplanes": hyperplanes})
    if q < 3:
        report["criterion_agree"] = crit_agree
        report["criterion_disagree"] = crit_disagree
    report["ok"] = not report["violations"]
    return report


def _removed_hyperplane_sections(F: GF, n: int, Y: Key) -> list[Key]:
    """Distinct Y ∩ C_i, i = 1..n (duplicates collapsed)."""
    seen = []
    for i in range(n):
        unit = tuple(tuple(int(j == c) for j in range(n)) for c in range(n) if c != i)
        sec = intersection_rows(F, Y, unit, n)
        if sec not in seen:
            seen.append(sec)
    return seen


def verify_top_bounds(delta: GrassmannGraph) -> dict:
    F, n, k, q = delta.field, delta.n, delta.k, delta.ambient.q
    top_size = count_points(k + 1, q)
    lo, hi = max(0, top_size - n), top_size - k - 1
    criterion = top_size - (q + 1) > n
    tops = nondegenerate_tops(delta)
    violations = []
    sizes = set()
    all_maximal = True
    for t in tops:
        sizes.add(t.size)
        if not lo <= t.size <= hi:
            violations.append({"Y": rows_to_text(t.defining), "size": t.size, "reason": "size outside bounds"})
        removed = _removed_hyperplane_sections(F, n, t.defining)
        if t.size != top_size - len(removed):
            violations.append({"Y": rows_to_text(t.defining), "size": t.size,
                               "reason": f"size != [k+1]_q - {len(removed)} removed sections"})
        all_maximal &= t.maximal
    return {
        "instance": delta.ambient.to_json(),
        "tops": len(tops),
        "bounds": [lo, hi],
        "sizes": sorted(sizes),
        "criterion": criterion,
        "criterion_value": top_size - (q + 1),
        "all_maximal": all_maximal,
        "non_maximal": sum(not t.maximal for t in tops),
        "violations": violations,
        "ok": not violations,
    }


# ---------------------------------------------------------------------------
# maximal clique census


@dataclass
class CensusEntry:
    members: tuple[int, ...]
    geometric: str
    combinatorial: str
    defining: Key
    l: int | None = None
    removed: list[Key] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"kind": self.geometric, "defining": rows_to_text(self.defining), "size": len(self.members),
               "maximal": True}
        if self.l is not None:
            out["l"] = self.l
            out["removed"] = [rows_to_text(r) for r in self.removed]
        return out


@dataclass
class Census:
    ambient: AmbientSpec
    entries: list[CensusEntry]

    def of_kind(self, kind: str) -> list[CensusEntry]:
        return [e for e in self.entries if e.geometric == kind]

    def summary(self) -> dict:
        out: dict[str, dict] = {}
        for e in self.entries:
            s = out.setdefault(e.geometric, {"count": 0, "sizes": {}})
            s["count"] += 1
            s["sizes"][str(len(e.members))] = s["sizes"].get(str(len(e.members)), 0) + 1
        return {kind: {"count": v["count"], "sizes": dict(sorted(v["sizes"].items(), key=lambda kv: int(kv[0])))}
                for kind, v in sorted(out.items())}

    def to_json(self) -> dict:
        return {"instance": self.ambient.to_json(), "summary": self.summary(),
                "cliques": [e.to_json() for e in self.entries]}


def combinatorial_labels(graph: Graph, cliques: list[tuple[int, ...]], star_size: int) -> list[str]:
    """Label maximal cliques of Δ_k using only sizes and intersections.

    A maximal star has exactly ``star_size`` vertices; of the rest, a clique
    meeting some maximal star in exactly one vertex is a non-maximal star, and
    one meeting every maximal star in nothing or a line is a top.
    """
    masks = [bits_of(c) for c in cliques]
    maximal_stars = [m for c, m in zip(cliques, masks) if len(c) == star_size]
    labels = []
    for c, m in zip(cliques, masks):
        if len(c) == star_size:
            labels.append("maximal_star")
            continue
        one = any((m & s).bit_count() == 1 for s in maximal_stars)
        empty_or_line = all((m & s).bit_count() != 1 for s in maximal_stars)
        if one == empty_or_line:
            raise CliqueClassificationError(f"intersection rules contradict on clique {c}")
        labels.append("nonmaximal_star" if one else "top")
    return labels


def geometric_label(delta: GrassmannGraph, members: tuple[int, ...]) -> tuple[str, Key]:
    F, n, k = delta.field, delta.n, delta.k
    keys = delta.graph.keys
    meet = keys[members[0]]
    for v in members[1:]:
        meet = intersection_rows(F, meet, keys[v], n)
    span = rref_rows(F, [r for v in members for r in keys[v]], n)[0]
    if len(meet) == k - 1:
        if len(span) == k + 1:
            return "line", span
        return ("maximal_star" if not row_is_degenerate(meet, n) else "nonmaximal_star"), meet
    if len(span) == k + 1:
        return "top", span
    return "unclassified", ()


def classify_maximal_cliques(delta: GrassmannGraph, limit: int = DEFAULT_CLIQUE_LIMIT,
                             cliques: list[tuple[int, ...]] | None = None) -> Census:
    """Label every maximal clique of Δ_k twice and require agreement."""
    F, n, k, q = delta.field, delta.n, delta.k, delta.ambient.q
    if cliques is None:
        cliques = maximal_cliques(delta.graph, limit)
    comb = combinatorial_labels(delta.graph, cliques, count_points(n - k + 1, q))
    entries = []
    top_size = count_points(k + 1, q)
    for c, lab in zip(cliques, comb):
        geo, defining = geometric_label(delta, c)
        if geo != lab:
            raise CliqueClassificationError(
                f"clique of size {len(c)} is {geo} geometrically but {lab} combinatorially "
                f"(defining {rows_to_text(defining)})")
        entry = CensusEntry(c, geo, lab, defining)
        if geo == "top":
            entry.l = top_size - len(c)
            entry.removed = _removed_hyperplane_sections(F, n, defining)
        entries.append(entry)
    return Census(delta.ambient, entries)


def check_clique_invariants(delta: GrassmannGraph, census: Census) -> list[str]:
    """Structural facts about the census; returns a list of problems."""
    problems = []
    stars = [bits_of(e.members) for e in census.entries if e.geometric.endswith("star")]
    tops = [bits_of(e.members) for e in census.entries if e.geometric == "top"]
    for family, name in ((stars, "stars"), (tops, "tops")):
        for i in range(len(family)):
            for j in range(i + 1, len(family)):
                if (family[i] & family[j]).bit_count() > 1:
                    problems.append(f"two {name} share more than one vertex")
    for e in census.entries:
        if e.geometric == "unclassified" or e.geometric == "line":
            problems.append(f"clique {e.members} is not inside a star or top of Gamma_k")
    return problems


# ---------------------------------------------------------------------------
# lines and the index of the degenerate set


@dataclass
class GrassmannLine:
    X: Key
    Y: Key
    members: tuple[int, ...]


def lines_of_gamma(gamma: GrassmannGraph) -> list[GrassmannLine]:
    """Every line S(X) ∩ T(Y), X ⊂ Y, of Γ_k."""
    F, n, k = gamma.field, gamma.n, gamma.k
    out = []
    for X, members in gamma.star_groups.items():
        star_mask = bits_of(members)
        for Y in sorted(superspaces_rows(F, X, n, k + 1)):
            line = star_mask & bits_of(gamma.top_members(Y))
            out.append(GrassmannLine(X, Y, tuple(iter_bits(line))))
    return out


def degenerate_set_index(gamma: GrassmannGraph) -> tuple[int, GrassmannLine | None]:
    """Largest |line ∩ W| over lines not inside W, W the degenerate vertices."""
    n = gamma.n
    W = bits_of(v for v, rows in enumerate(gamma.graph.keys) if row_is_degenerate(rows, n))
    best, witness = 0, None
    for line in lines_of_gamma(gamma):
        m = bits_of(line.members)
        if m & W == m:
            continue
        c = (m & W).bit_count()
        if c > best:
            best, witness = c, line
    return best, witness
