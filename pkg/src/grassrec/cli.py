"""Command line entry point.

Every command builds a JSON-ready dict; ``--format text`` renders that same
dict, so the two formats never disagree.

Exit codes: 0 all checks passed, 2 refusal (hypothesis or parameter
constraint unmet), 3 a check failed, 4 a size cap or clique limit was hit.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path
from typing import Callable

from . import __version__
from .field import MODULUS_TABLE_VERSION, GF, FieldError, supported_orders
from .graph import DEFAULT_CLIQUE_LIMIT, CliqueLimitExceeded, Graph
from .grassmann import (
    CliqueClassificationError,
    build_delta,
    build_gamma,
    check_clique_invariants,
    classify_maximal_cliques,
    degenerate_set_index,
    verify_adjacency,
    verify_star_proposition,
    verify_top_bounds,
)
from .linalg import rows_from_text, rows_to_text, rref_rows
from .subspace import (
    DEFAULT_SUBSPACE_CAP,
    AmbientSpec,
    EnumerationCapExceeded,
    count_points,
    enumerate_subspaces,
    enumeration_to_json,
    gaussian_binomial,
)

EXIT_OK = 0
EXIT_REFUSAL = 2
EXIT_VIOLATION = 3
EXIT_RESOURCE = 4

CACHE_ENV = "GRASSREC_CACHE_DIR"
CACHE_FORMAT = 1


class Refusal(Exception):
    pass


# ---------------------------------------------------------------------------
# output


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def render_text(report: object, indent: int = 0, max_items: int = 20) -> str:
    """Indented key: value lines generated from the JSON model."""
    pad = "  " * indent
    lines: list[str] = []
    if isinstance(report, dict):
        for key, value in report.items():
            if isinstance(value, (dict, list)) and value and not _flat_list(value):
                lines.append(f"{pad}{key}:")
                lines.append(render_text(value, indent + 1, max_items).rstrip("\n"))
            else:
                lines.append(f"{pad}{key}: {_scalar(value)}")
    elif isinstance(report, list):
        for item in report[:max_items]:
            if isinstance(item, (dict, list)) and not _flat_list(item):
                lines.append(f"{pad}-")
                lines.append(render_text(item, indent + 1, max_items).rstrip("\n"))
            else:
                lines.append(f"{pad}- {_scalar(item)}")
        if len(report) > max_items:
            lines.append(f"{pad}... ({len(report) - max_items} more)")
    else:
        lines.append(f"{pad}{_scalar(report)}")
    return "\n".join(lines) + "\n"


def _flat_list(value: object) -> bool:
    return isinstance(value, list) and all(not isinstance(x, (dict, list)) for x in value) and len(value) <= 20


def _scalar(value: object) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(_scalar(x) for x in value) + "]"
    if isinstance(value, dict):
        return "{}"
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "yes" if value else "no"
    return str(value)


# ---------------------------------------------------------------------------
# helpers


def _ambient(args: argparse.Namespace, need_k: bool = True) -> AmbientSpec:
    if args.q not in supported_orders():
        raise Refusal(f"unsupported field order q={args.q}")
    if need_k:
        amb = AmbientSpec(args.n, args.q, args.k)
        try:
            amb.require_recovery_range()
        except ValueError as exc:
            raise Refusal(str(exc)) from exc
        return amb
    return AmbientSpec(args.n, args.q)


def cache_dir(args: argparse.Namespace) -> Path:
    if getattr(args, "cache_dir", None):
        return Path(args.cache_dir)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "grassrec"


def cache_path(root: Path, amb: AmbientSpec, kind: str) -> Path:
    return root / f"{kind}-n{amb.n}-k{amb.k}-q{amb.q}.json"


def _cache_header(amb: AmbientSpec, kind: str) -> dict:
    return {"format": CACHE_FORMAT, "artifact_version": __version__,
            "modulus_table_version": MODULUS_TABLE_VERSION, "n": amb.n, "k": amb.k, "q": amb.q, "kind": kind}


def load_cached_graph(path: Path, amb: AmbientSpec, kind: str) -> Graph | None:
    """The cached graph, or None when missing, unreadable or from another version."""
    try:
        data = json.loads(path.read_text())
    except (OSError, ValueError):
        return None
    if data.get("header") != _cache_header(amb, kind):
        return None
    g = Graph.from_json(data["graph"], rows_from_text)
    g.name = data["graph"].get("name", "")
    return g


def build_graph(amb: AmbientSpec, kind: str, cap: int) -> Graph:
    builder = build_gamma if kind == "gamma" else build_delta
    return builder(amb, cap).graph


def cached_graph(amb: AmbientSpec, kind: str, cap: int, root: Path | None) -> tuple[Graph, bool]:
    """Load from the cache when valid, otherwise build and store."""
    if root is not None:
        path = cache_path(root, amb, kind)
        g = load_cached_graph(path, amb, kind)
        if g is not None:
            return g, True
    g = build_graph(amb, kind, cap)
    if root is not None:
        root.mkdir(parents=True, exist_ok=True)
        payload = {"header": _cache_header(amb, kind), "graph": {**g.to_json(rows_to_text), "name": g.name}}
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, separators=(",", ":")))
        tmp.replace(path)
    return g, False


# ---------------------------------------------------------------------------
# commands; each returns (report, exit code)


def cmd_enumerate(args: argparse.Namespace) -> tuple[dict, int]:
    amb = _ambient(args, need_k=False)
    if not 0 <= args.d <= args.n:
        raise Refusal(f"dimension d={args.d} outside 0..{args.n}")
    F = amb.field
    expected = gaussian_binomial(args.n, args.d, args.q)
    spaces = enumerate_subspaces(F, args.n, args.d, args.cap)
    nondeg = sum(not S.is_degenerate() for S in spaces)
    report = {"n": args.n, "q": args.q, "d": args.d, "count": len(spaces), "gaussian_binomial": expected,
              "nondegenerate": nondeg, "degenerate": len(spaces) - nondeg}
    if args.list:
        report["bases"] = enumeration_to_json(F, args.n, args.d, spaces)["bases"]
    return report, EXIT_OK if len(spaces) == expected else EXIT_VIOLATION


def cmd_graph(args: argparse.Namespace) -> tuple[dict, int]:
    amb = _ambient(args)
    root = None if args.no_cache else cache_dir(args)
    g, hit = cached_graph(amb, args.kind, args.cap, root)
    print(f"cache {'hit' if hit else 'miss'}" + (f": {cache_path(root, amb, args.kind)}" if root else " (disabled)"),
          file=sys.stderr)
    report = {"instance": amb.to_json(), "kind": args.kind, "name": g.name, "vertices": len(g),
              "edges": g.edge_count(), "structure_hash": g.structure_hash(rows_to_text)}
    if args.check_cache and hit:
        fresh = build_graph(amb, args.kind, args.cap)
        report["cache_matches_fresh_build"] = fresh.structure_hash(rows_to_text) == report["structure_hash"]
        if not report["cache_matches_fresh_build"]:
            return report, EXIT_VIOLATION
    return report, EXIT_OK


def cmd_cliques(args: argparse.Namespace) -> tuple[dict, int]:
    amb = _ambient(args)
    if args.which == "delta":
        delta = build_delta(amb, args.cap)
        census = classify_maximal_cliques(delta, args.limit)
        problems = check_clique_invariants(delta, census)
        star_size = count_points(amb.n - amb.k + 1, amb.q)
        top_full = count_points(amb.k + 1, amb.q)
        lo, hi = max(0, top_full - amb.n), top_full - amb.k - 1
        for e in census.entries:
            if e.geometric == "maximal_star" and len(e.members) != star_size:
                problems.append(f"maximal star of size {len(e.members)} != {star_size}")
            if e.geometric == "top" and not lo <= len(e.members) <= hi:
                problems.append(f"top of size {len(e.members)} outside [{lo}, {hi}]")
        report = {"instance": amb.to_json(), "graph": "Delta", "vertices": len(delta.graph),
                  "summary": census.summary(), "maximal_star_size": star_size, "top_bounds": [lo, hi],
                  "labels_agree": True, "problems": problems}
        if args.full:
            report["cliques"] = [e.to_json() for e in census.entries]
        return report, EXIT_OK if not problems else EXIT_VIOLATION
    from .n4dual import build_dual, classify_n4_cliques, delta_s_prime_census

    if (amb.n, amb.k) != (4, 2) or amb.q < 3:
        raise Refusal("the dual-space censuses are for n=4, k=2, q>=3")
    if args.which == "delta-s-prime":
        return delta_s_prime_census(amb, args.limit), EXIT_OK
    census = classify_n4_cliques(build_dual(amb), limit=args.limit)
    report = census.to_json() if args.full else {k: v for k, v in census.to_json().items() if k != "cliques"}
    report = {"instance": amb.to_json(), "graph": "Delta'_t", **report}
    c = census.checks
    ok = (c["nonlinear_at_most_four"] and c["nonlinear_in_degenerate_plane"] and c["nonlinear_avoid_pair_lines"]
          and c["type2_size_q_minus_1"])
    return report, EXIT_OK if ok else EXIT_VIOLATION


def cmd_recover(args: argparse.Namespace) -> tuple[dict, int]:
    from .recovery import HypothesisError, recover_and_verify

    amb = _ambient(args)
    try:
        report = recover_and_verify(amb, args.route, args.mode, args.exploratory, args.limit, args.threads,
                                    args.timings)
    except HypothesisError as exc:
        raise Refusal(str(exc)) from exc
    if not report["asserted"]:
        return report, EXIT_REFUSAL
    ok = report["isomorphic"] and not report["violations"]
    return report, EXIT_OK if ok else EXIT_VIOLATION


def cmd_counterexample(args: argparse.Namespace) -> tuple[dict, int]:
    from .counterexamples import ExampleConstraintError, run_example

    if args.which is None:
        raise Refusal("--which is required")
    try:
        report = run_example(args.which, args.n, args.k, args.q, args.sweep_completions)
    except ExampleConstraintError as exc:
        raise Refusal(str(exc)) from exc
    ok = report["ok"] and report.get("sweep", {}).get("failures", 0) == 0
    return report, EXIT_OK if ok else EXIT_VIOLATION


def _suite_props(args: argparse.Namespace) -> tuple[dict, bool]:
    amb = _ambient(args)
    F = amb.field
    rng = random.Random(args.seed)
    field_report = field_axioms(F)
    linalg_report = rref_and_modular_identity(F, amb.n, args.samples, rng)
    gamma = build_gamma(amb, args.cap)
    delta = build_delta(amb, args.cap)
    small = len(gamma.graph) <= 2000
    adjacency = {}
    for name, gg in (("gamma", gamma), ("delta", delta)):
        chk = verify_adjacency(gg, None if small else args.pairs, args.seed)
        adjacency[name] = {"pairs": chk.pairs_checked, "exhaustive": chk.exhaustive,
                           "mismatches": len(chk.mismatches)}
    stars = verify_star_proposition(delta)
    tops = verify_top_bounds(delta)
    report = {"instance": amb.to_json(), "field": field_report, "linear_algebra": linalg_report,
              "adjacency": adjacency, "star_proposition": _drop_long(stars), "top_bounds": _drop_long(tops)}
    ok = (field_report["ok"] and linalg_report["ok"] and all(a["mismatches"] == 0 for a in adjacency.values())
          and stars["ok"] and tops["ok"])
    return report, ok


def _drop_long(report: dict, limit: int = 10) -> dict:
    return {k: (v[:limit] if isinstance(v, list) else v) for k, v in report.items()}


def field_axioms(F: GF) -> dict:
    """Exhaustive field axioms plus cyclicity of the multiplicative group."""
    q, add, mul = F.q, F.add_table, F.mul_table
    E = range(q)
    failures = []
    for a in E:
        if add[a][0] != a or mul[a][1] != a:
            failures.append(f"identity fails at {a}")
        if a and mul[a][F.inv(a)] != 1:
            failures.append(f"inverse fails at {a}")
        for b in E:
            if add[a][b] != add[b][a] or mul[a][b] != mul[b][a]:
                failures.append(f"commutativity fails at {a},{b}")
            for c in E:
                if add[add[a][b]][c] != add[a][add[b][c]] or mul[mul[a][b]][c] != mul[a][mul[b][c]]:
                    failures.append(f"associativity fails at {a},{b},{c}")
                if mul[a][add[b][c]] != add[mul[a][b]][mul[a][c]]:
                    failures.append(f"distributivity fails at {a},{b},{c}")
        if len(failures) > 10:
            break
    generator = None
    for g in range(1, q):
        x, order = g, 1
        while x != 1:
            x, order = mul[x][g], order + 1
        if order == q - 1:
            generator = g
            break
    if generator is None:
        failures.append("multiplicative group is not cyclic")
    return {"q": q, "failures": failures[:10], "generator": generator, "ok": not failures}


def rref_and_modular_identity(F: GF, n: int, samples: int, rng: random.Random) -> dict:
    """RREF idempotence and row-operation invariance; dim(A+B) + dim(A∩B) = dim A + dim B."""
    from .linalg import intersection_rows, rank_rows

    q = F.q
    bad_rref = bad_mod = 0
    for _ in range(samples):
        m = rng.randint(1, n + 1)
        rows = [[rng.randrange(q) for _ in range(n)] for _ in range(m)]
        R = rref_rows(F, rows, n)[0]
        if rref_rows(F, R, n)[0] != R:
            bad_rref += 1
        mixed = [list(r) for r in rows]
        i, j = rng.randrange(m), rng.randrange(m)
        c = rng.randrange(1, q)
        if i != j:
            mixed[i] = [F.add(x, F.mul(c, y)) for x, y in zip(mixed[i], mixed[j])]
        else:
            mixed[i] = [F.mul(c, x) for x in mixed[i]]
        rng.shuffle(mixed)
        if rref_rows(F, mixed, n)[0] != R:
            bad_rref += 1
        other = rref_rows(F, [[rng.randrange(q) for _ in range(n)] for _ in range(rng.randint(1, n))], n)[0]
        s = rank_rows(F, list(R) + list(other), n)
        if s + len(intersection_rows(F, R, other, n)) != len(R) + len(other):
            bad_mod += 1
    return {"samples": samples, "rref_failures": bad_rref, "modular_identity_failures": bad_mod,
            "ok": bad_rref == 0 and bad_mod == 0}


def _suite_lemmas(args: argparse.Namespace) -> tuple[dict, bool]:
    from .recovery import verify_clique_graph_map, verify_lemma_F, verify_lemma_S, verify_lemma_T

    amb = _ambient(args)
    delta = build_delta(amb, args.cap)
    hyp = amb.q > amb.n - amb.k
    report = {"instance": amb.to_json(), "hypothesis_holds": hyp,
              "lemma_S": verify_lemma_S(delta, args.threads),
              "lemma_T": verify_lemma_T(delta, args.threads),
              "lemma_F": verify_lemma_F(amb)}
    if hyp and amb.q >= 3:
        report["star_graph_map"] = verify_clique_graph_map(delta, "stars", args.threads)
        report["top_graph_map"] = verify_clique_graph_map(delta, "tops", args.threads)
    ok = True
    if hyp:
        ok = (report["lemma_S"]["ok"] and report["lemma_T"]["ok"] and report["lemma_F"]["failures"] == 0
              and all(report[m]["isomorphic"] for m in ("star_graph_map", "top_graph_map") if m in report))
    return report, ok


def _suite_index(args: argparse.Namespace) -> tuple[dict, bool]:
    amb = _ambient(args)
    gamma = build_gamma(amb, args.cap)
    lam, line = degenerate_set_index(gamma)
    report = {"instance": amb.to_json(), "index": lam, "line_size": amb.q + 1,
              "witness": {"X": rows_to_text(line.X), "Y": rows_to_text(line.Y)} if line else None,
              "asserted": amb.q == amb.n - amb.k + 1,
              "condition_2l_plus_2": amb.q + 1 >= 2 * lam + 2}
    ok = lam == amb.q if report["asserted"] else True
    return report, ok


SUITES: dict[str, Callable[[argparse.Namespace], tuple[dict, bool]]] = {
    "props": _suite_props,
    "lemmas": _suite_lemmas,
    "index": _suite_index,
}


def cmd_verify(args: argparse.Namespace) -> tuple[dict, int]:
    if args.suite == "examples":
        return cmd_counterexample(args)
    report, ok = SUITES[args.suite](args)
    report = {"suite": args.suite, **report, "ok": ok}
    return report, EXIT_OK if ok else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# parser


def _instance_args(p: argparse.ArgumentParser, k: bool = True) -> None:
    p.add_argument("--n", type=int, required=True, help="ambient dimension")
    if k:
        p.add_argument("--k", type=int, required=True, help="subspace dimension")
    p.add_argument("--q", type=int, required=True, help="field order")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text"], default="json")
    common.add_argument("--threads", type=int, default=1, help="worker threads for matrix products and scans")
    common.add_argument("--cap", type=int, default=DEFAULT_SUBSPACE_CAP, help="largest subspace enumeration")
    common.add_argument("--limit", type=int, default=DEFAULT_CLIQUE_LIMIT, help="largest clique enumeration")
    common.add_argument("--cache-dir", default=None, help=f"graph cache directory (env {CACHE_ENV})")

    ap = argparse.ArgumentParser(prog="grassrec", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="count or list the d-subspaces of F_q^n")
    _instance_args(p, k=False)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--list", action="store_true", help="include every basis")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("graph", parents=[common], help="build (or load) Gamma_k or Delta_k")
    _instance_args(p)
    p.add_argument("--kind", choices=["gamma", "delta"], default="delta")
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--check-cache", action="store_true", help="compare a cached graph with a fresh build")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("cliques", parents=[common], help="maximal clique census")
    _instance_args(p)
    p.add_argument("--which", choices=["delta", "delta-t-prime", "delta-s-prime"], default="delta")
    p.add_argument("--full", action="store_true", help="list every clique")
    p.set_defaults(func=cmd_cliques)

    p = sub.add_parser("recover", parents=[common], help="rebuild Gamma_k from Delta_k and verify")
    _instance_args(p)
    p.add_argument("--route", choices=["auto", "stars", "tops", "n4"], default="auto")
    p.add_argument("--mode", choices=["auto", "blind", "assisted"], default="auto",
                   help="special-set discovery")
    p.add_argument("--exploratory", action="store_true", help="run even when q <= n-k (nothing asserted)")
    p.add_argument("--timings", action="store_true", help="add wall-clock runtime to the report")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("--suite", choices=["props", "lemmas", "examples", "index"], required=True)
    _instance_args(p)
    p.add_argument("--which", type=int, choices=[1, 2, 3], default=None, help="example number (examples suite)")
    p.add_argument("--sweep-completions", action="store_true")
    p.add_argument("--samples", type=int, default=10_000, help="random samples for the linear algebra checks")
    p.add_argument("--pairs", type=int, default=100_000, help="sampled adjacency pairs on large graphs")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("counterexample", parents=[common], help="reproduce a small-field counterexample")
    p.add_argument("--which", type=int, choices=[1, 2, 3], required=True)
    _instance_args(p)
    p.add_argument("--sweep-completions", action="store_true", help="try every free completion of Q")
    p.set_defaults(func=cmd_counterexample)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    render = render_text if args.format == "text" else render_json
    if args.threads < 1 or args.cap < 1 or args.limit < 1:
        report, code = {"error": "refusal", "message": "--threads, --cap and --limit must be positive"}, EXIT_REFUSAL
    else:
        try:
            report, code = args.func(args)
        except (Refusal, FieldError) as exc:
            report, code = {"error": "refusal", "message": str(exc)}, EXIT_REFUSAL
        except (EnumerationCapExceeded, CliqueLimitExceeded) as exc:
            report, code = {"error": "resource", "message": str(exc)}, EXIT_RESOURCE
        except (CliqueClassificationError, AssertionError) as exc:
            report, code = {"error": "violation", "message": str(exc)}, EXIT_VIOLATION
    sys.stdout.write(render(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
