"""Simple undirected graphs keyed by canonical payloads.

Adjacency is kept as sorted neighbour tuples; bitset rows (Python ints) are
derived on demand and used by clique enumeration and maximality checks.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Sequence

import numpy as np

DEFAULT_CLIQUE_LIMIT = 1_000_000


class CliqueLimitExceeded(RuntimeError):
    def __init__(self, found: int, limit: int):
        super().__init__(f"clique enumeration aborted after {found} cliques (limit {limit})")
        self.found = found
        self.limit = limit


def iter_bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def bit_indices(x: int, width: int) -> list[int]:
    """Sorted positions of the set bits of ``x`` (all below ``width``)."""
    raw = np.frombuffer(x.to_bytes((width + 7) // 8 or 1, "little"), dtype=np.uint8)
    return np.flatnonzero(np.unpackbits(raw, bitorder="little")).tolist()


def bits_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


class Graph:
    """Immutable simple graph on vertices ``0..n-1`` with payload keys."""

    def __init__(self, keys: Sequence[Hashable], neighbours: Sequence[Iterable[int]], name: str = ""):
        self.keys = list(keys)
        self.name = name
        self.index = {k: i for i, k in enumerate(self.keys)}
        if len(self.index) != len(self.keys):
            raise ValueError("duplicate payload keys")
        if len(neighbours) != len(self.keys):
            raise ValueError("neighbour list length does not match vertex count")
        self.nbrs = [tuple(sorted(set(ns))) for ns in neighbours]
        for u, ns in enumerate(self.nbrs):
            if u in ns:
                raise ValueError(f"loop at vertex {u}")
        self._bits: list[int] | None = None

    @classmethod
    def from_edges(cls, keys: Sequence[Hashable], edges: Iterable[tuple[int, int]], name: str = "") -> Graph:
        nb: list[set[int]] = [set() for _ in keys]
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            nb[u].add(v)
            nb[v].add(u)
        return cls(keys, nb, name)

    @classmethod
    def from_bits(cls, keys: Sequence[Hashable], rows: Sequence[int], name: str = "") -> Graph:
        n = len(rows)
        if len(keys) != n:
            raise ValueError("neighbour list length does not match vertex count")
        for u, r in enumerate(rows):
            if r >> u & 1:
                raise ValueError(f"loop at vertex {u}")
            if r >> n:
                raise ValueError(f"row {u} has bits beyond vertex {n - 1}")
        # bit rows are already sorted and duplicate-free
        g = cls(keys, [() for _ in rows], name)
        g.nbrs = [tuple(bit_indices(r, n)) for r in rows]
        g._bits = list(rows)
        return g

    def __len__(self) -> int:
        return len(self.keys)

    @property
    def bits(self) -> list[int]:
        if self._bits is None:
            self._bits = [bits_of(ns) for ns in self.nbrs]
        return self._bits

    def adjacent(self, u: int, v: int) -> bool:
        return (self.bits[u] >> v) & 1 == 1

    def degree(self, u: int) -> int:
        return len(self.nbrs[u])

    def edge_count(self) -> int:
        return sum(len(ns) for ns in self.nbrs) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, ns in enumerate(self.nbrs):
            for v in ns:
                if u < v:
                    yield (u, v)

    def induced(self, predicate: Callable[[int, Hashable], bool], name: str = "") -> tuple[Graph, list[int]]:
        """Subgraph on vertices where predicate(index, key) holds, plus the old index of each new vertex."""
        keep = [i for i, k in enumerate(self.keys) if predicate(i, k)]
        new = {old: i for i, old in enumerate(keep)}
        nb = [[new[v] for v in self.nbrs[old] if v in new] for old in keep]
        return Graph([self.keys[i] for i in keep], nb, name or self.name), keep

    def to_json(self, label: Callable[[Hashable], object] = str) -> dict:
        return {"vertices": [label(k) for k in self.keys], "edges": [list(e) for e in self.edges()]}

    @classmethod
    def from_json(cls, data: dict, parse: Callable[[object], Hashable] = lambda x: x) -> Graph:
        return cls.from_edges([parse(v) for v in data["vertices"]], [tuple(e) for e in data["edges"]])

    def structure_hash(self, label: Callable[[Hashable], object] = str) -> str:
        blob = json.dumps(self.to_json(label), separators=(",", ":"), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class CliqueSet:
    members: tuple[int, ...]
    maximal_in: set[str] = field(default_factory=set)


def is_clique(G: Graph, S: Iterable[int]) -> bool:
    members = list(S)
    bits = G.bits
    mask = bits_of(members)
    return all((bits[v] | (1 << v)) & mask == mask for v in members)


def common_neighbours(G: Graph, S: Iterable[int]) -> int:
    """Bitset of vertices outside S adjacent to every member of S."""
    members = list(S)
    if not members:
        return (1 << len(G)) - 1
    bits = G.bits
    acc = bits[members[0]]
    for v in members[1:]:
        acc &= bits[v]
        if not acc:
            break
    return acc & ~bits_of(members)


def is_maximal_clique(G: Graph, S: Iterable[int]) -> bool:
    members = list(S)
    if not members:
        return len(G) == 0
    return is_clique(G, members) and common_neighbours(G, members) == 0


def degeneracy_order(G: Graph) -> list[int]:
    """Repeatedly remove a minimum-degree vertex (ties by index)."""
    n = len(G)
    deg = [len(ns) for ns in G.nbrs]
    buckets: dict[int, set[int]] = {}
    for v, d in enumerate(deg):
        buckets.setdefault(d, set()).add(v)
    removed = [False] * n
    order = []
    d = 0
    for _ in range(n):
        d = max(0, d - 1)
        while not buckets.get(d):
            d += 1
        v = min(buckets[d])
        buckets[d].discard(v)
        removed[v] = True
        order.append(v)
        for w in G.nbrs[v]:
            if not removed[w]:
                buckets[deg[w]].discard(w)
                deg[w] -= 1
                buckets.setdefault(deg[w], set()).add(w)
    return order


def _expand(bits, R, P, X, out, limit):
    # Bit loops are written out inline: this is the hot path.
    if not P:
        if not X:
            out.append(tuple(sorted(R)))
            if len(out) > limit:
                raise CliqueLimitExceeded(len(out), limit)
        return
    size = P.bit_count()
    best, pivot = -1, 0
    cand = P | X
    while cand:
        low = cand & -cand
        u = low.bit_length() - 1
        cand ^= low
        c = (P & bits[u]).bit_count()
        if c > best:
            best, pivot = c, u
            if c >= size - 1:
                break
    if best == size - 1 and (P >> pivot) & 1:
        # shortcut when P is itself a clique: R + P is the only candidate
        rest, members, rem = X, [], P
        while rem:
            low = rem & -rem
            u = low.bit_length() - 1
            rem ^= low
            if P & ~bits[u] != low:
                break
            rest &= bits[u]
            members.append(u)
        else:
            if not rest:
                out.append(tuple(sorted(R + members)))
                if len(out) > limit:
                    raise CliqueLimitExceeded(len(out), limit)
            return
    branch = P & ~bits[pivot]
    while branch:
        low = branch & -branch
        v = low.bit_length() - 1
        branch ^= low
        nv = bits[v]
        R.append(v)
        _expand(bits, R, P & nv, X & nv, out, limit)
        R.pop()
        P &= ~low
        X |= low


def cliques_through(G: Graph, v: int, candidates: int, excluded: int, limit: int = DEFAULT_CLIQUE_LIMIT) -> list[tuple[int, ...]]:
    """Maximal cliques containing v whose other members come from ``candidates``.

    ``excluded`` marks neighbours that may not be added but still block
    maximality (the X set of Bron-Kerbosch).
    """
    out: list[tuple[int, ...]] = []
    _expand(G.bits, [v], candidates & G.bits[v], excluded & G.bits[v], out, limit)
    return out


DENSE_LIMIT = 20_000


def _pack(adj) -> list[int]:
    packed = np.packbits(adj, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _local_rows(G: Graph, dense, members: list[int]) -> list[int]:
    """Adjacency among ``members`` re-indexed to 0..len-1, as bitset ints."""
    if dense is None:
        pos = {w: i for i, w in enumerate(members)}
        rows = []
        for w in members:
            r = 0
            for x in G.nbrs[w]:
                i = pos.get(x)
                if i is not None:
                    r |= 1 << i
            rows.append(r)
        return rows
    return _pack(dense[np.ix_(members, members)])


def _twin_quotient(sub) -> tuple[list[int], list[list[int]]] | None:
    """Collapse true twins (equal closed neighbourhoods) of a local adjacency matrix.

    True twins lie in exactly the same maximal cliques, so cliques of the
    quotient expand to cliques of the original.  Returns None when the
    quotient would not be meaningfully smaller.
    """
    m = len(sub)
    closed = sub.copy()
    np.fill_diagonal(closed, True)
    groups: dict[bytes, list[int]] = {}
    for i, row in enumerate(np.packbits(closed, axis=1)):
        groups.setdefault(row.tobytes(), []).append(i)
    if len(groups) > 0.75 * m:
        return None
    classes = list(groups.values())
    first = [c[0] for c in classes]
    return _pack(sub[np.ix_(first, first)]), classes


def maximal_cliques(G: Graph, limit: int = DEFAULT_CLIQUE_LIMIT) -> list[tuple[int, ...]]:
    """All maximal cliques, each sorted, the list sorted lexicographically.

    Bron-Kerbosch with Tomita pivoting, seeded along a degeneracy ordering.
    Each seed's subproblem is re-indexed onto the seed's neighbourhood, with
    true twins merged, so the bitsets stay short.
    """
    order = degeneracy_order(G)
    rank = [0] * len(G)
    for i, v in enumerate(order):
        rank[v] = i
    dense = None
    if len(G) <= DENSE_LIMIT:
        dense = np.zeros((len(G), len(G)), dtype=bool)
        rows = np.repeat(np.arange(len(G)), [len(ns) for ns in G.nbrs])
        cols = np.fromiter((w for ns in G.nbrs for w in ns), dtype=np.int64, count=len(rows))
        dense[rows, cols] = True
    out: list[tuple[int, ...]] = []
    for v in order:
        nb = list(G.nbrs[v])
        later = [rank[w] > rank[v] for w in nb]
        quotient = _twin_quotient(dense[np.ix_(nb, nb)]) if dense is not None and len(nb) > 32 else None
        if quotient is None:
            local = _local_rows(G, dense, nb)
            classes = [[i] for i in range(len(nb))]
        else:
            local, classes = quotient
        # a class containing an earlier vertex can only lead to duplicates
        P = bits_of(c for c, mem in enumerate(classes) if all(later[i] for i in mem))
        X = bits_of(c for c, mem in enumerate(classes) if not all(later[i] for i in mem))
        found: list[tuple[int, ...]] = []
        _expand(local, [], P, X, found, limit)
        for c in found:
            out.append(tuple(sorted([v] + [nb[i] for cls in c for i in classes[cls]])))
        if len(out) > limit:
            raise CliqueLimitExceeded(len(out), limit)
    out.sort()
    return out


@dataclass
class IsomorphismCheck:
    isomorphic: bool
    violation: tuple[int, int] | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.isomorphic

    def to_json(self) -> dict:
        return {"isomorphic": self.isomorphic, "violation": list(self.violation) if self.violation else None,
                "reason": self.reason}


def check_isomorphism_with_map(G: Graph, H: Graph, f: Sequence[int]) -> IsomorphismCheck:
    """Verify that vertex map f (G index -> H index) is an isomorphism G -> H.

    The first violating pair is reported in G's indices, smallest first.
    """
    if len(f) != len(G) or len(G) != len(H):
        return IsomorphismCheck(False, None, f"size mismatch: |G|={len(G)}, |H|={len(H)}, |f|={len(f)}")
    if sorted(f) != list(range(len(H))):
        return IsomorphismCheck(False, None, "map is not a bijection")
    finv = [0] * len(f)
    for u, fu in enumerate(f):
        finv[fu] = u
    for u in range(len(G)):
        mine = set(G.nbrs[u])
        theirs = {finv[w] for w in H.nbrs[f[u]]}
        if mine != theirs:
            v = min(mine ^ theirs)
            kind = "edge not preserved" if v in mine else "non-edge not preserved"
            return IsomorphismCheck(False, (u, v), kind)
    return IsomorphismCheck(True)
