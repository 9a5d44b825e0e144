"""Small explicit configurations showing where the field-size hypothesis is sharp.

All three constructions start from X = C_1 ∩ ... ∩ C_{n-k+1}, the span of
the last k-1 unit vectors, and two 1-subspaces P, Q:

* example 1 (q = n-k+1 >= 3): P = <(1,...,1)>, Q has the q field elements
  (in encoding order) as its first q coordinates.  Then S^c(X) ∩ T^c(Y),
  Y = X+P+Q, is the single vertex X+P.
* example 2 (q = n-k): P = <(0,1,...,1)>, Q = <(1, t_1, ..., t_{n-k}, ...)>.
  Every k-subspace between X and Y = X+P+Q is degenerate.
* example 3 (q = n-k >= 3): X_1 = X and X_2 = X'+P are adjacent, yet
  A_2 = X'+P+Q in S^c(X_2) has no neighbour in S^c(X_1).

Coordinates of Q that the construction leaves free default to 1; with
``sweep=True`` every completion is tried.  Each verdict is re-derived by a
template-free oracle that enumerates the whole Grassmannian.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .field import GF
from .linalg import Row, intersection_rows, rank_rows, rows_to_text, rref_rows
from .subspace import (
    AmbientSpec,
    enumerate_subspaces,
    row_is_degenerate,
    subspaces_of_rows,
    superspaces_rows,
)

Key = tuple[Row, ...]


class ExampleConstraintError(ValueError):
    pass


def _span(F: GF, n: int, vectors: Sequence[Sequence[int]]) -> Key:
    return rref_rows(F, [list(v) for v in vectors], n)[0]


def _contains(F: GF, n: int, big: Key, small: Key) -> bool:
    return rank_rows(F, list(big) + list(small), n) == len(big)


def _witness(rows: Key, n: int) -> list[int]:
    return [j + 1 for j in range(n) if all(r[j] == 0 for r in rows)]


def _unit(n: int, j: int) -> tuple[int, ...]:
    return tuple(int(i == j) for i in range(n))


@dataclass
class ExampleInstance:
    which: int
    n: int
    k: int
    q: int
    X: Key
    P: Key
    Q: Key
    Y: Key
    completion: tuple[int, ...] = ()
    extra: dict[str, Key] = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"which": self.which, "n": self.n, "k": self.k, "q": self.q,
               "completion": list(self.completion)}
        for name in ("X", "P", "Q", "Y"):
            out[name] = rows_to_text(getattr(self, name))
        for name, rows in sorted(self.extra.items()):
            out[name] = rows_to_text(rows)
        return out


def check_constraint(which: int, n: int, k: int, q: int) -> None:
    if which not in (1, 2, 3):
        raise ExampleConstraintError(f"unknown example {which}")
    if not 1 < k < n - 1:
        raise ExampleConstraintError(f"need 1 < k < n-1, got n={n}, k={k}")
    if which == 1 and not (q == n - k + 1 and q >= 3):
        raise ExampleConstraintError(f"example 1 needs q = n-k+1 >= 3, got q={q}, n-k+1={n - k + 1}")
    if which == 2 and q != n - k:
        raise ExampleConstraintError(f"example 2 needs q = n-k, got q={q}, n-k={n - k}")
    if which == 3 and not (q == n - k and q >= 3):
        raise ExampleConstraintError(f"example 3 needs q = n-k >= 3, got q={q}, n-k={n - k}")


def free_coordinates(which: int, n: int, k: int, q: int) -> int:
    """Number of coordinates of Q the construction leaves unspecified."""
    fixed = q if which == 1 else n - k + 1
    return n - fixed


def construct(which: int, n: int, k: int, q: int, completion: Sequence[int] | None = None,
              x_prime: Key | None = None) -> ExampleInstance:
    check_constraint(which, n, k, q)
    F = GF(q)
    m = n - k + 1  # X = C_1 ∩ ... ∩ C_m
    free = free_coordinates(which, n, k, q)
    completion = tuple(completion) if completion is not None else (1,) * free
    if len(completion) != free or any(not 0 <= c < q for c in completion):
        raise ExampleConstraintError(f"completion must be {free} field elements")
    X = _span(F, n, [_unit(n, j) for j in range(m, n)])
    ts = list(range(q))  # field elements in encoding order
    if which == 1:
        P = _span(F, n, [[1] * n])
        Q = _span(F, n, [ts + list(completion)])
    else:
        P = _span(F, n, [[0] + [1] * (n - 1)])
        Q = _span(F, n, [[1] + ts + list(completion)])
    Y = _span(F, n, list(X) + list(P) + list(Q))
    inst = ExampleInstance(which, n, k, q, X, P, Q, Y, completion)
    if which == 3:
        if x_prime is None:
            x_prime = _span(F, n, [_unit(n, j) for j in range(m + 1, n)])
        if len(x_prime) != k - 2 or not _contains(F, n, X, x_prime):
            raise ExampleConstraintError("X' must be a (k-2)-subspace of X")
        inst.extra["X_prime"] = x_prime
        inst.extra["X1"] = X
        inst.extra["X2"] = _span(F, n, list(x_prime) + list(P))
        inst.extra["A2"] = _span(F, n, list(x_prime) + list(P) + list(Q))
    return inst


# ---------------------------------------------------------------------------
# templated verdicts (follow the construction)


def _pencil(F: GF, n: int, X: Key, P: Key, Q: Key) -> list[Key]:
    """X + P' for every 1-subspace P' of P + Q."""
    return [_span(F, n, list(X) + list(Pp)) for Pp in subspaces_of_rows(F, _span(F, n, list(P) + list(Q)), n, 1)]


def _templated(inst: ExampleInstance) -> dict:
    F, n, k = GF(inst.q), inst.n, inst.k
    X, P, Q, Y = inst.X, inst.P, inst.Q, inst.Y
    out: dict = {"Y_nondegenerate": not row_is_degenerate(Y, n)}
    if inst.which == 1:
        pencil = _pencil(F, n, X, P, Q)
        nondeg = [A for A in pencil if not row_is_degenerate(A, n)]
        PQ = _span(F, n, list(P) + list(Q))
        sections = []
        for i in range(inst.q):
            Ci = _span(F, n, [_unit(n, j) for j in range(n) if j != i])
            sections.append(intersection_rows(F, Ci, PQ, n))
        distinct = all(len(s) == 1 for s in sections) and len(set(sections)) == len(sections)
        out.update({
            "intersection": [rows_to_text(A) for A in nondeg],
            "size": len(nondeg),
            "unique_is_X_plus_P": nondeg == [_span(F, n, list(X) + list(P))],
            "hyperplane_sections_distinct": distinct,
        })
    elif inst.which == 2:
        pencil = _pencil(F, n, X, P, Q)
        out.update({
            "intermediates": [{"subspace": rows_to_text(A), "witness": _witness(A, n)} for A in pencil],
            "count": len(pencil),
            "all_degenerate": all(_witness(A, n) for A in pencil),
        })
    else:
        X1, X2, A2 = inst.extra["X1"], inst.extra["X2"], inst.extra["A2"]
        adjacent = len(intersection_rows(F, X1, X2, n)) == k - 2
        star1 = [A for A in superspaces_rows(F, X1, n, k) if not row_is_degenerate(A, n)]
        nbrs = [A for A in star1 if len(intersection_rows(F, A, A2, n)) == k - 1]
        out.update({
            "X1_X2_adjacent": adjacent,
            "A2_nondegenerate": not row_is_degenerate(A2, n),
            "A2_in_star_X2": _contains(F, n, A2, X2),
            "star_X1_size": len(star1),
            "neighbours": len(nbrs),
        })
    return out


# ---------------------------------------------------------------------------
# template-free oracles: scan every k-subspace of the ambient space


def _oracle(inst: ExampleInstance) -> dict:
    F, n, k = GF(inst.q), inst.n, inst.k
    X, Y = inst.X, inst.Y
    spaces = [S.rows for S in enumerate_subspaces(F, n, k)]
    between = [A for A in spaces if _contains(F, n, A, X) and _contains(F, n, Y, A)]
    if inst.which == 1:
        nondeg = [A for A in between if not row_is_degenerate(A, n)]
        return {"size": len(nondeg), "members": [rows_to_text(A) for A in nondeg]}
    if inst.which == 2:
        return {"count": len(between), "all_degenerate": all(row_is_degenerate(A, n) for A in between)}
    X1, A2 = inst.extra["X1"], inst.extra["A2"]
    nbrs = [A for A in spaces
            if not row_is_degenerate(A, n) and _contains(F, n, A, X1)
            and rank_rows(F, list(A) + list(A2), n) == k + 1]
    return {"neighbours": len(nbrs)}


def _passes(inst: ExampleInstance, t: dict, o: dict | None) -> bool:
    """Templated verdict, plus agreement with the oracle when one ran."""
    if not t["Y_nondegenerate"]:
        return False
    if inst.which == 1:
        ok = t["size"] == 1 and t["unique_is_X_plus_P"] and t["hyperplane_sections_distinct"]
        return ok and (o is None or (o["size"] == 1 and o["members"] == t["intersection"]))
    if inst.which == 2:
        ok = t["all_degenerate"] and t["count"] == inst.q + 1
        return ok and (o is None or (o["all_degenerate"] and o["count"] == inst.q + 1))
    ok = t["X1_X2_adjacent"] and t["A2_nondegenerate"] and t["A2_in_star_X2"] and t["neighbours"] == 0
    return ok and (o is None or o["neighbours"] == 0)


def run_instance(inst: ExampleInstance, oracle: bool = True) -> dict:
    t = _templated(inst)
    o = _oracle(inst) if oracle else None
    return {"instance": inst.to_json(), "templated": t, "oracle": o, "ok": _passes(inst, t, o)}


def run_example(which: int, n: int, k: int, q: int, sweep: bool = False) -> dict:
    """Default construction with oracle check; ``sweep`` also tries every
    completion of Q (and, for example 3, every choice of X')."""
    base = run_instance(construct(which, n, k, q))
    report = {"which": which, "instance": AmbientSpec(n, q, k).to_json(), "default": base, "ok": base["ok"]}
    if sweep:
        F = GF(q)
        free = free_coordinates(which, n, k, q)
        choices: list[Key | None] = [None]
        if which == 3:
            choices = list(subspaces_of_rows(F, construct(which, n, k, q).X, n, k - 2)) if k > 2 else [()]
        tried = failed = 0
        failures = []
        for completion in itertools.product(range(q), repeat=free):
            for xp in choices:
                inst = construct(which, n, k, q, completion, xp)
                r = run_instance(inst, oracle=False)
                tried += 1
                if not r["ok"]:
                    failed += 1
                    if len(failures) < 10:
                        failures.append(inst.to_json())
        report["sweep"] = {"instances": tried, "failures": failed, "failing": failures,
                           "completion_independent": failed == 0}
    return report


def lemma_S_pair(delta, X1: Key, X2: Key) -> dict:
    """Both sides of the star-adjacency equivalence for one pair of (k-1)-subspaces.

    (1) X1, X2 adjacent; (2) every vertex of S^c(X1) has a neighbour in
    S^c(X2) and vice versa.
    """
    F, n, k = delta.field, delta.n, delta.k
    adjacent = len(intersection_rows(F, X1, X2, n)) == k - 2
    s1, s2 = delta.star_members(X1), delta.star_members(X2)
    bits = delta.graph.bits
    m1 = sum(1 << v for v in s1)
    m2 = sum(1 << v for v in s2)
    covered = all(bits[v] & m2 for v in s1) and all(bits[v] & m1 for v in s2)
    return {"adjacent": adjacent, "mutually_covering": covered, "violates_1_implies_2": adjacent and not covered}


def example_2_pair(n: int, k: int, q: int) -> tuple[Key, Key]:
    inst = construct(2, n, k, q)
    return inst.X, inst.Y


def example_3_pair(n: int, k: int, q: int) -> tuple[Key, Key]:
    inst = construct(3, n, k, q)
    return inst.extra["X1"], inst.extra["X2"]


__all__ = [
    "ExampleConstraintError",
    "ExampleInstance",
    "check_constraint",
    "construct",
    "example_2_pair",
    "example_3_pair",
    "free_coordinates",
    "lemma_S_pair",
    "run_example",
    "run_instance",
]

