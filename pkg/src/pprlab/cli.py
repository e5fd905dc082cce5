"""``pprlab`` command line: exact values, estimators, complexity profiles,
surgery, validators and a benchmark harness.

Exit status is 0 on success, 1 on bad arguments or input, 2 when a
validation check fails.
"""

from __future__ import annotations

import argparse
import enum
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._random import derive_seed
from .complexity import compute_profile
from .estimators import adaptive_pagerank, bidirectional_ppr, instance_smart
from .exact import exact_ppr
from .graph import GraphFormatError, dumps, load_graph
from .lab import (GraphKind, build_G_minus, build_G_plus, default_target, generate, mu_of_U,
                  remove_in_edges, subdivide_edge)
from .walks import Mode

EXIT_OK, EXIT_USAGE, EXIT_INVALID = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class OutputFormat(str, enum.Enum):
    TEXT = "text"
    JSON = "json"


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 0.2
    seed: int = 0
    tol: float = 1e-12
    graph_path: str | None = None
    target: int | None = None
    output: OutputFormat = OutputFormat.TEXT
    trials: int = 1

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise UsageError(f"--alpha must lie in (0, 1), got {self.alpha}")
        if self.trials < 1:
            raise UsageError(f"--trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError(f"--seed must be a 64-bit unsigned value, got {self.seed}")
        if not self.tol > 0:
            raise UsageError(f"--tol must be positive, got {self.tol}")


# JSON with lossless floats ----------------------------------------------------------


def _float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = "%.17g" % x
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _plain(obj):
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return obj


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON: insertion-ordered keys, floats with 17 significant digits."""
    obj = _plain(obj)
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _text(obj, prefix: str = "") -> list[str]:
    obj = _plain(obj)
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            v = _plain(v)
            if isinstance(v, (dict, list)) and v and not all(isinstance(x, (int, float)) for x in v):
                lines.append(f"{prefix}{k}:")
                lines.extend(_text(v, prefix + "  "))
            else:
                lines.append(f"{prefix}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            lines.append(f"{prefix}- [{i}]")
            lines.extend(_text(v, prefix + "  "))
    else:
        lines.append(prefix + _scalar(obj))
    return lines


def _scalar(v) -> str:
    v = _plain(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return " ".join(_scalar(x) for x in v)
    return str(v)


def emit(obj, cfg: RunConfig, out) -> None:
    if cfg.output is OutputFormat.JSON:
        out.write(to_json(obj) + "\n")
    else:
        out.write("\n".join(_text(obj)) + "\n")


# argument parsing ---------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, graph: bool = True, target: bool = True) -> None:
    p.add_argument("--alpha", type=float, default=0.2, help="termination probability (default 0.2)")
    p.add_argument("--seed", type=int, default=0, help="master seed for all random streams")
    p.add_argument("--tol", type=float, default=1e-12, help="exact solver tolerance")
    p.add_argument("--output", choices=[f.value for f in OutputFormat], default="text")
    if graph:
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--graph", help="edge-list file")
        src.add_argument("--kind", choices=[k.value for k in GraphKind], help="generate instead of loading")
        p.add_argument("--n", type=int, help="vertex count for --kind")
        p.add_argument("--deficient", type=int, help="deficient vertices for mostly_degree_n")
        p.add_argument("--avg-degree", type=float, default=8.0, help="mean out-degree for random")
        p.add_argument("--no-normalize", action="store_true",
                       help="keep out-degree-0 vertices (only valid where no walk or push runs)")
    if target:
        p.add_argument("--target", type=int, help="target vertex (default: generator's natural target or 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pprlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a generated graph as an edge list")
    p.add_argument("--kind", required=True, choices=[k.value for k in GraphKind])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--deficient", type=int)
    p.add_argument("--avg-degree", type=float, default=8.0)
    p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("exact", help="exact PageRank of the target")
    _common(p)
    p.add_argument("--vector", action="store_true", help="also print pi(v, t) for every v")

    p = sub.add_parser("estimate", help="adaptive estimator")
    _common(p)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="full")

    p = sub.add_parser("baseline", help="fixed-threshold bidirectional estimator")
    _common(p)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("--walks", type=int, required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="full")

    p = sub.add_parser("smart", help="degree test, then the adaptive estimator")
    _common(p)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="full")

    p = sub.add_parser("complexity", help="instance complexity profile")
    _common(p)
    p.add_argument("--full", action="store_true", help="include the breakpoint table")

    p = sub.add_parser("surgery", help="apply a graph surgery")
    _common(p)
    p.add_argument("--op", required=True, choices=["subdivide", "remove-in", "rewire", "funnel", "mu"])
    p.add_argument("--edge", type=int, nargs=2, metavar=("U", "V"))
    p.add_argument("--vertex", type=int)
    p.add_argument("--sources", type=int, nargs="*", default=[], help="tails of in-edges to remove")
    p.add_argument("--set", type=int, nargs="*", default=[], dest="vertex_set", help="the set W or U")
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--y-prime", type=int)
    p.add_argument("--out", help="write the resulting graph here")

    p = sub.add_parser("validate", help="run randomized lemma validators")
    p.add_argument("--suite", choices=["lemmas", "push", "all"], default="lemmas")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--output", choices=[f.value for f in OutputFormat], default="text")

    p = sub.add_parser("bench", help="estimator cost and error against T* on the generator suite")
    p.add_argument("--kinds", nargs="+", default=[k.value for k in GraphKind], choices=[k.value for k in GraphKind])
    p.add_argument("--sizes", type=int, nargs="+", default=[10, 12], help="log2 of n")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="full")
    p.add_argument("--output", choices=[f.value for f in OutputFormat], default="text")
    return parser


def _config(args) -> RunConfig:
    return RunConfig(alpha=args.alpha, seed=args.seed, tol=getattr(args, "tol", 1e-12),
                     graph_path=getattr(args, "graph", None), target=getattr(args, "target", None),
                     output=OutputFormat(args.output), trials=getattr(args, "trials", 1))


def _graph_and_target(args, cfg: RunConfig, need_target: bool = True):
    if args.graph:
        try:
            g = load_graph(args.graph, normalize=not args.no_normalize)
        except OSError as exc:
            raise UsageError(f"cannot read graph: {exc}") from None
        natural = 0
    else:
        if args.n is None:
            raise UsageError("--kind needs --n")
        g = generate(args.kind, args.n, cfg.seed, deficient=args.deficient, avg_degree=args.avg_degree)
        natural = default_target(args.kind, args.n)
    t = natural if cfg.target is None else cfg.target
    if need_target and not 0 <= t < g.n:
        raise UsageError(f"--target must lie in [0, {g.n}), got {t}")
    return g, t


# commands -----------------------------------------------------------------------------------


def cmd_generate(args, out) -> int:
    g = generate(args.kind, args.n, args.seed, deficient=args.deficient, avg_degree=args.avg_degree)
    text = dumps(g)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_exact(args, cfg, out) -> int:
    g, t = _graph_and_target(args, cfg)
    if not g.normalized:
        raise UsageError("graph has out-degree-0 vertices; drop --no-normalize")
    vec = exact_ppr(g, t, cfg.alpha, cfg.tol)
    value = float(vec.values.mean())
    if cfg.output is OutputFormat.TEXT and not args.vector:
        # digits beyond the solver tolerance are noise
        out.write(repr(float("%.10g" % value)) + "\n")
        return EXIT_OK
    report = {"target": t, "alpha": cfg.alpha, "tol": cfg.tol, "pagerank": value,
              "iterations": vec.iterations}
    if args.vector:
        report["ppr"] = vec.values.tolist()
    emit(report, cfg, out)
    return EXIT_OK


def cmd_estimate(args, cfg, out) -> int:
    g, t = _graph_and_target(args, cfg)
    emit(adaptive_pagerank(g, t, cfg.alpha, cfg.seed, mode=args.mode), cfg, out)
    return EXIT_OK


def cmd_baseline(args, cfg, out) -> int:
    g, t = _graph_and_target(args, cfg)
    if not 0.0 < args.r_max <= 1.0 or args.walks < 1:
        raise UsageError("--r-max must lie in (0, 1] and --walks must be >= 1")
    emit(bidirectional_ppr(g, t, args.r_max, args.walks, cfg.seed, cfg.alpha, args.mode), cfg, out)
    return EXIT_OK


def cmd_smart(args, cfg, out) -> int:
    g, t = _graph_and_target(args, cfg)
    emit(instance_smart(g, t, cfg.alpha, cfg.seed, mode=args.mode), cfg, out)
    return EXIT_OK


def cmd_complexity(args, cfg, out) -> int:
    g, t = _graph_and_target(args, cfg)
    prof = compute_profile(g, t, alpha=cfg.alpha, tol=cfg.tol)
    d = prof.to_dict()
    if not args.full:
        d = {k: v for k, v in d.items() if k not in ("breakpoints", "T_at")}
        d["breakpoint_count"] = len(prof.breakpoints)
    emit(d, cfg, out)
    return EXIT_OK


def cmd_surgery(args, cfg, out) -> int:
    g, t = _graph_and_target(args, cfg, need_target=args.op in ("funnel", "mu"))
    op = args.op
    if op in ("subdivide", "funnel") and args.edge is None:
        raise UsageError(f"--op {op} needs --edge U V")
    if op in ("rewire", "funnel", "mu") and not args.vertex_set:
        raise UsageError(f"--op {op} needs --set")
    result = None
    if op == "subdivide":
        h, rec = subdivide_edge(g, *args.edge)
    elif op == "remove-in":
        if args.vertex is None:
            raise UsageError("--op remove-in needs --vertex")
        h, rec = remove_in_edges(g, args.vertex, [(u, args.vertex) for u in args.sources])
    elif op == "rewire":
        h, rec = build_G_minus(g, args.vertex_set, args.eps)
    elif op == "mu":
        emit({"mu": mu_of_U(g, args.vertex_set, t, cfg.alpha, cfg.tol)}, cfg, out)
        return EXIT_OK
    else:
        gm, rec_m = build_G_minus(g, args.vertex_set, args.eps)
        y_prime = args.y_prime if args.y_prime is not None else mu_of_U(g, args.vertex_set, t, cfg.alpha, cfg.tol)
        h, rec = build_G_plus(gm, rec_m, tuple(args.edge), y_prime, t, cfg.alpha, cfg.tol)
        result = {"pagerank_minus": float(exact_ppr(gm, t, cfg.alpha, cfg.tol).values.mean()),
                  "pagerank_plus": float(exact_ppr(h, t, cfg.alpha, cfg.tol).values.mean())}
    report = {"record": rec.to_dict(), "n": h.n, "m": h.m}
    if result:
        report.update(result)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps(h))
    emit(report, cfg, out)
    return EXIT_OK


def cmd_validate(args, cfg, out) -> int:
    from .validators import check_push_invariants, lemma_suite

    if args.suite == "push":
        results = check_push_invariants(max(1, args.trials), 50, cfg.alpha, cfg.seed)
    else:
        results = lemma_suite(cfg.seed, args.trials, cfg.alpha)
    ok = all(r.passed for r in results)
    if cfg.output is OutputFormat.JSON:
        emit({"passed": ok, "checks": [r.to_dict() for r in results]}, cfg, out)
    else:
        for r in results:
            out.write(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  "
                      f"(trials={r.trials}, violations={r.violations}, worst excess={r.worst:.3g})\n")
    return EXIT_OK if ok else EXIT_INVALID


def _threads() -> int:
    raw = os.environ.get("PPRLAB_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        k = int(raw)
    except ValueError:
        raise UsageError(f"PPRLAB_THREADS must be an integer, got {raw!r}") from None
    return max(1, k)


def bench_rows(kinds, sizes, trials: int, seed: int, alpha: float = 0.2, mode: str = "full",
               threads: int = 1) -> list[dict]:
    """One row per (kind, n): ``T*``, mean query cost and mean relative error."""
    rows = []
    for kind in kinds:
        for e in sizes:
            n = 2 ** e
            g = generate(kind, n, seed)
            t = default_target(kind, n)
            prof = compute_profile(g, t, alpha=alpha)

            def trial(k, g=g, t=t):
                rep = adaptive_pagerank(g, t, alpha, derive_seed(seed, f"trial-{k}"), mode=mode)
                return rep.total_queries, abs(rep.estimate / prof.pagerank - 1.0)

            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(trial, range(trials)))
            cost = np.array([c for c, _ in results], dtype=float)
            err = np.array([x for _, x in results])
            rows.append({"graph": f"{kind}-{n}", "n": n, "m": g.m, "pagerank": prof.pagerank,
                         "T_star": prof.T_star, "mean_cost": float(cost.mean()),
                         "mean_rel_error": float(err.mean()),
                         "within_quarter": float(np.mean(err <= 0.25)),
                         "cost_over_T_star_log_n": float(cost.mean() / (prof.T_star * math.log2(n)))})
    return rows


def cmd_bench(args, cfg, out) -> int:
    if any(s < 1 or s > 24 for s in args.sizes):
        raise UsageError("--sizes are log2(n) values in [1, 24]")
    rows = bench_rows(args.kinds, args.sizes, cfg.trials, cfg.seed, cfg.alpha, args.mode, _threads())
    if cfg.output is OutputFormat.JSON:
        emit(rows, cfg, out)
    else:
        out.write(f"{'graph':<22}{'T*':>12}{'mean cost':>14}{'mean rel err':>14}\n")
        for r in rows:
            out.write(f"{r['graph']:<22}{r['T_star']:>12.4g}{r['mean_cost']:>14.6g}{r['mean_rel_error']:>14.4f}\n")
    return EXIT_OK


COMMANDS = {
    "exact": cmd_exact, "estimate": cmd_estimate, "baseline": cmd_baseline, "smart": cmd_smart,
    "complexity": cmd_complexity, "surgery": cmd_surgery, "validate": cmd_validate, "bench": cmd_bench,
}


def run_command(argv, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        if args.command == "generate":
            return cmd_generate(args, out)
        return COMMANDS[args.command](args, _config(args), out)
    except (UsageError, GraphFormatError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


def main(argv=None) -> int:
    try:
        return run_command(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
