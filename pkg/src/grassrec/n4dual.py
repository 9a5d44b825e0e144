"""The (n, k) = (4, 2) route through the dual projective space.

Points of the dual space are the hyperplanes (3-subspaces) of V = F_q^4, and
lines are the 2-subspaces, with reversed incidence.  A hyperplane is stored
with its normal vector under the standard bilinear form, so the coordinate
hyperplane C_i becomes the unit point e_i and the four degenerate points have
trivial coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .field import GF
from .graph import DEFAULT_CLIQUE_LIMIT, Graph, bits_of, check_isomorphism_with_map, maximal_cliques
from .grassmann import build_delta, build_gamma, classify_maximal_cliques
from .linalg import Row, nullspace_rows, rank_rows, rows_to_text
from .recovery import (
    SpecialSet,
    build_clique_graph,
    build_recovered_graph,
    families_from_census,
    prune,
    recovery_map,
)
from .subspace import AmbientSpec, row_is_degenerate, rref_matrices, superspaces_rows

Key = tuple[Row, ...]


class N4ClassificationError(AssertionError):
    pass


@dataclass
class DualPoint:
    hyperplane: Key
    normal: Row
    degenerate: bool


@dataclass
class DualLine:
    subspace: Key
    points: tuple[int, ...]
    degenerate_points: tuple[int, ...]


@dataclass
class DualSpace:
    q: int
    points: list[DualPoint]
    lines: list[DualLine]
    graph: Graph  # Δ'_t on the non-degenerate points, keys = hyperplanes
    point_index: dict[Key, int] = field(default_factory=dict)

    def normal(self, hyperplane: Key) -> Row:
        return self.points[self.point_index[hyperplane]].normal


def _normal(F: GF, hyperplane: Key) -> Row:
    (v,) = nullspace_rows(F, hyperplane, 4)
    return v


def build_dual(ambient: AmbientSpec) -> DualSpace:
    """Dual points and lines of PG(3, q) plus the Δ'_t graph on non-degenerate points.

    Two non-degenerate points are adjacent when the line joining them
    carries a degenerate point.
    """
    if (ambient.n, ambient.k) != (4, 2):
        raise ValueError(f"dual construction is for n=4, k=2, got n={ambient.n}, k={ambient.k}")
    if ambient.q < 3:
        raise ValueError("the n=4 route needs q >= 3")
    F = ambient.field
    points = [DualPoint(H, _normal(F, H), row_is_degenerate(H, 4)) for H in rref_matrices(F.q, 4, 3)]
    index = {p.hyperplane: i for i, p in enumerate(points)}
    degenerate = [i for i, p in enumerate(points) if p.degenerate]
    if len(degenerate) != 4:
        raise N4ClassificationError(f"expected 4 degenerate points, found {len(degenerate)}")
    normals = [points[i].normal for i in degenerate]
    if sorted(normals) != sorted(tuple(int(i == j) for j in range(4)) for i in range(4)):
        raise N4ClassificationError("degenerate points are not the unit vectors")
    for a in range(4):
        for b in range(a + 1, 4):
            for c in range(b + 1, 4):
                if rank_rows(F, [normals[a], normals[b], normals[c]], 4) != 3:
                    raise N4ClassificationError("three degenerate points are collinear")
    lines = []
    for L in rref_matrices(F.q, 4, 2):
        pts = tuple(sorted(index[H] for H in superspaces_rows(F, L, 4, 3)))
        degs = tuple(p for p in pts if points[p].degenerate)
        if len(pts) != F.q + 1:
            raise N4ClassificationError(f"line {rows_to_text(L)} has {len(pts)} points")
        if bool(degs) != row_is_degenerate(L, 4):
            raise N4ClassificationError(f"line {rows_to_text(L)}: degenerate point iff degenerate subspace fails")
        lines.append(DualLine(L, pts, degs))
    nondeg = [i for i, p in enumerate(points) if not p.degenerate]
    pos = {p: i for i, p in enumerate(nondeg)}
    nb: list[set[int]] = [set() for _ in nondeg]
    for line in lines:
        if line.degenerate_points:
            on = [pos[p] for p in line.points if p in pos]
            for u in on:
                nb[u].update(w for w in on if w != u)
    graph = Graph([points[i].hyperplane for i in nondeg], nb, f"Delta'_t(4,{F.q})")
    return DualSpace(F.q, points, lines, graph, index)


# ---------------------------------------------------------------------------
# clique classification


@dataclass
class N4Clique:
    members: tuple[int, ...]
    geometric: str  # "type1" | "type2" | "type3" | "nonlinear"
    combinatorial: str
    line: Key = ()
    plane: int | None = None  # 1-based index d of the plane x_d = 0 spanned by the other three c_i

    @property
    def linear(self) -> bool:
        return self.geometric != "nonlinear"

    def to_json(self) -> dict:
        out = {"size": len(self.members),
               "classification": "linear" if self.linear else "nonlinear"}
        if self.linear:
            out["type"] = int(self.geometric[-1])
            out["subspace"] = rows_to_text(self.line)
        if self.plane is not None:
            out["plane"] = self.plane
        return out


@dataclass
class N4Census:
    q: int
    cliques: list[N4Clique]
    cardinality_rule: dict
    checks: dict

    def summary(self) -> dict:
        out: dict[str, dict] = {}
        for c in self.cliques:
            s = out.setdefault(c.geometric, {"count": 0, "sizes": {}})
            s["count"] += 1
            s["sizes"][str(len(c.members))] = s["sizes"].get(str(len(c.members)), 0) + 1
        return dict(sorted(out.items()))

    def to_json(self) -> dict:
        return {"q": self.q, "summary": self.summary(), "cardinality_rule": self.cardinality_rule,
                "checks": self.checks, "cliques": [c.to_json() for c in self.cliques]}


def _geometric(F: GF, dual: DualSpace, graph: Graph, members: tuple[int, ...]) -> tuple[str, Key, int | None]:
    normals = [dual.normal(graph.keys[v]) for v in members]
    r = rank_rows(F, normals, 4)
    zero_coords = [d for d in range(4) if all(v[d] == 0 for v in normals)]
    plane = zero_coords[0] + 1 if zero_coords else None
    if r <= 2:
        # the 2-subspace of V is the common part of the hyperplanes
        line = nullspace_rows(F, normals, 4)
        units = sum(1 for d in range(4)
                    if rank_rows(F, list(normals) + [tuple(int(i == d) for i in range(4))], 4) == r)
        if units >= 2:
            return "type2", line, plane
        return ("type3" if plane is not None else "type1"), line, plane
    return "nonlinear", (), plane


def combinatorial_n4_labels(cliques: list[tuple[int, ...]], q: int) -> list[str]:
    """Types from intersections and sizes only."""
    masks = [bits_of(c) for c in cliques]
    t12 = []
    for i, m in enumerate(masks):
        t12.append(all((m & o).bit_count() <= 1 for j, o in enumerate(masks) if j != i))
    labels = ["type2" if t and len(c) == q - 1 else "type1" if t else "" for c, t in zip(cliques, t12)]
    type2 = [masks[i] for i, lab in enumerate(labels) if lab == "type2"]
    for i, lab in enumerate(labels):
        if not lab:
            labels[i] = "type3" if any(masks[i] & m for m in type2) else "nonlinear"
    return labels


def classify_n4_cliques(dual: DualSpace, graph: Graph | None = None, limit: int = DEFAULT_CLIQUE_LIMIT,
                        cliques: list[tuple[int, ...]] | None = None) -> N4Census:
    """Classify maximal cliques of Δ'_t geometrically and combinatorially.

    ``graph`` may be any copy of Δ'_t whose keys are hyperplanes.
    """
    graph = graph if graph is not None else dual.graph
    F = GF(dual.q)
    q = dual.q
    if cliques is None:
        cliques = maximal_cliques(graph, limit)
    comb = combinatorial_n4_labels(cliques, q)
    out = []
    for c, lab in zip(cliques, comb):
        geo, line, plane = _geometric(F, dual, graph, c)
        if geo != lab:
            raise N4ClassificationError(f"clique {c} is {geo} geometrically but {lab} combinatorially")
        out.append(N4Clique(c, geo, lab, line, plane))

    linear_sizes = sorted({len(c.members) for c in out if c.linear})
    nonlinear_sizes = sorted({len(c.members) for c in out if not c.linear})
    rule_holds = all((len(c.members) >= 5) == c.linear for c in out)
    cardinality = {"applies": q >= 7, "holds": rule_holds, "linear_sizes": linear_sizes,
                   "nonlinear_sizes": nonlinear_sizes}
    if q >= 7 and not rule_holds:
        raise N4ClassificationError("size >= 5 does not characterize linear cliques")

    checks = {
        "nonlinear_at_most_four": all(len(c.members) <= 4 for c in out if not c.linear),
        "nonlinear_in_degenerate_plane": all(c.plane is not None for c in out if not c.linear),
        "nonlinear_avoid_pair_lines": all(
            sum(1 for x in dual.normal(graph.keys[v]) if x) >= 3 for c in out if not c.linear for v in c.members),
        "type2_size_q_minus_1": all(len(c.members) == q - 1 for c in out if c.geometric == "type2"),
        "linear_count": sum(c.linear for c in out),
        "nonlinear_count": sum(not c.linear for c in out),
    }
    return N4Census(q, out, cardinality, checks)


# ---------------------------------------------------------------------------
# recovery for n = 4


def recover_n4(ambient: AmbientSpec, limit: int = DEFAULT_CLIQUE_LIMIT) -> dict:
    """Γ'_t from Δ_2(F_q^4) and its verification against Γ_2(F_q^4)."""
    dual = build_dual(ambient)
    delta = build_delta(ambient)
    gamma = build_gamma(ambient)
    stars, tops = families_from_census(classify_maximal_cliques(delta, limit))
    unpruned = build_clique_graph(delta.graph, tops, keys=tops.keys)
    pruned = prune(unpruned)

    # the generic Δ'_t must coincide with the dual-space description
    same = sorted(pruned.graph.keys) == sorted(dual.graph.keys)
    if same:
        to_dual = [dual.graph.index[key] for key in pruned.graph.keys]
        same = bool(check_isomorphism_with_map(pruned.graph, dual.graph, to_dual))

    census = classify_n4_cliques(dual, pruned.graph, limit)
    linear = [SpecialSet("tops", c.members) for c in census.cliques if c.combinatorial != "nonlinear"]
    recovered = build_recovered_graph(delta.graph, tops, linear, stars.members, name="Gamma'_t")
    fmap = recovery_map(delta, gamma, tops, linear)
    degenerate = [v for v, key in enumerate(gamma.graph.keys) if row_is_degenerate(key, 4)]
    violations = []
    if not same:
        violations.append("generic and dual constructions of Δ'_t differ")
    if sorted(fmap.f[len(delta.graph):]) != degenerate:
        violations.append("linear cliques do not match the degenerate 2-subspaces one-to-one")
    iso = check_isomorphism_with_map(recovered, gamma.graph, fmap.f) if not violations else None
    if iso is not None and not iso:
        violations.append(f"isomorphism check failed: {iso.reason} at {iso.violation}")
    return {
        "dual": dual,
        "census": census,
        "recovered": recovered,
        "map": fmap,
        "report": {
            "counts": {
                "delta_vertices": len(delta.graph),
                "gamma_vertices": len(gamma.graph),
                "recovered_vertices": len(recovered),
                "dual_points": len(dual.points),
                "delta_t_prime_vertices": len(dual.graph),
                "special_sets": len(linear),
                "degenerate_subspaces": len(degenerate),
            },
            "census": {"summary": census.summary(), "cardinality_rule": census.cardinality_rule,
                       "checks": census.checks},
            "dual_matches_generic": same,
            "isomorphic": bool(iso) if iso is not None else False,
            "violations": violations,
        },
    }


def recover_n4_report(ambient: AmbientSpec, limit: int = DEFAULT_CLIQUE_LIMIT) -> dict:
    return recover_n4(ambient, limit)["report"]


def delta_s_prime_census(ambient: AmbientSpec, limit: int = DEFAULT_CLIQUE_LIMIT) -> dict:
    """Maximal cliques of Δ'_s at n = 4, grouped by shape.

    Expected shapes: isolated maximal stars, the points of one coordinate
    hyperplane, and the points of support at most two lying on three
    pairwise-meeting coordinate lines.
    """
    delta = build_delta(ambient)
    stars, _ = families_from_census(classify_maximal_cliques(delta, limit))
    pruned = prune(build_clique_graph(delta.graph, stars, keys=stars.keys))
    kinds: dict[str, int] = {}
    for c in maximal_cliques(pruned.graph, limit):
        points = [pruned.graph.keys[v] for v in c]
        if len(c) == 1 and not row_is_degenerate(points[0], 4):
            kind = "isolated_maximal_star"
        else:
            common = [d + 1 for d in range(4) if all(P[0][d] == 0 for P in points)]
            supports = {frozenset(d for d in range(4) if P[0][d]) for P in points}
            pairs = [s for s in supports if len(s) == 2]
            if common:
                kind = f"points_in_C{common[0]}"
            elif max(len(s) for s in supports) <= 2 and len(pairs) == 3:
                # three coordinate lines, either through one unit point or forming a triangle
                shared = frozenset.intersection(*pairs)
                kind = "coordinate_lines_star" if shared else "coordinate_lines_triangle"
            else:
                kind = "other"
        kinds[kind] = kinds.get(kind, 0) + 1
    return {"instance": ambient.to_json(), "kinds": dict(sorted(kinds.items()))}
