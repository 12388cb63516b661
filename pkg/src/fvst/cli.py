"""Command-line interface.

Every subcommand prints machine-readable JSON lines on stdout and human
prose on stderr.  Exit codes: 0 success, 2 precondition or input problem,
1 internal failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import generators
from .errors import FvstError, InvariantError, PreconditionError, SizeLimitError, ValidationError
from .io import InstanceFile, RunReport, emit_instance_file, format_rational, parse_instance, write_report
from .lp import Tolerances, lp_value
from .lp.solve import SA1_MAX_N
from .solvers import EXACT_MAX_N, cdz, exact_fvs, fvst_7_3, layers, local_ratio_3approx
from .structure import enumerate_family, heavy_triangles, is_light, is_t5_free
from .tournament import WeightedTournament, random_tournament, triangles

log = logging.getLogger("fvst")

ALGORITHMS = ("sa73", "cdz", "lr3", "exact", "layers")
GUARANTEE = {"sa73": Fraction(7, 3), "cdz": Fraction(1), "lr3": Fraction(3), "exact": Fraction(1),
             "layers": Fraction(3, 4)}
FAMILIES = ("random", "light", "t5free", "near-transitive", "block-chain")
GAP_COLUMNS = ("trial", "seed", "n", "sa0", "sa1", "alg_weight", "exact_weight", "alg_over_sa1", "exact_over_n")


class _Usage(Exception):
    pass


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")
    sys.stdout.flush()


def _tol(args) -> Tolerances:
    return Tolerances(feas=args.eps_feas, obj=args.eps_obj, int=args.eps_int)


def _read_instance(path: str | None) -> WeightedTournament:
    if path is None or path == "-":
        return parse_instance(sys.stdin.read())
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    return parse_instance(text)


def _config(args) -> dict:
    return {
        "eps_feas": args.eps_feas,
        "eps_obj": args.eps_obj,
        "eps_int": args.eps_int,
        "seed": getattr(args, "seed", None),
        "lazy_sa1": bool(getattr(args, "lazy_sa1", False)),
        "sa1_max_n": getattr(args, "sa1_max_n", SA1_MAX_N),
        "exact_max_n": EXACT_MAX_N,
    }


def run_algorithm(alg: str, wt: WeightedTournament, tol: Tolerances, lazy: bool = False,
                  trace: bool = False, sa1_max_n: int | None = SA1_MAX_N) -> RunReport:
    """Run one solver and package the outcome with its ratio certificate."""
    stats: dict = {"fallbacks": 0}
    t0 = time.perf_counter()
    bounds: dict = {}
    trace_doc = None
    if alg == "sa73":
        res = fvst_7_3(wt, tol, lazy=lazy, max_n=sa1_max_n)
        sol = res.solution
        stats.update(res.stats)
        bounds["sa1"] = sol.bound_used[1]
        if trace:
            trace_doc = {"rounding": res.rounding.to_dict(),
                         "layering": res.layering.to_dict() if res.layering else None}
    elif alg == "cdz":
        sol = cdz(wt, tol, stats=stats)
        bounds["sa0"] = sol.bound_used[1] if sol.bound_used else None
    elif alg == "lr3":
        sol = local_ratio_3approx(wt)
    elif alg == "exact":
        sol = exact_fvs(wt)
        bounds["exact"] = sol.weight
    elif alg == "layers":
        sol, ltrace = layers(wt, tol, stats=stats)
        if trace:
            trace_doc = {"layering": ltrace.to_dict()}
    else:
        raise ValueError(f"unknown algorithm {alg!r}")
    elapsed = time.perf_counter() - t0
    ratios: dict = {"guarantee": GUARANTEE[alg]}
    if alg == "sa73":
        ratios.update(bound_level=1, bound_value=bounds["sa1"])
    elif alg == "cdz":
        ratios.update(bound_level=0, bound_value=bounds["sa0"])
    elif alg == "layers":
        ratios.update(bound_level=None, bound_value=float(wt.total()))
    elif alg == "exact":
        ratios.update(bound_level=None, bound_value=float(sol.weight))
    bv = ratios.get("bound_value")
    if bv is not None:
        w = float(sol.weight)
        ratios["weight_over_bound"] = w / bv if bv > 0 else (1.0 if w == 0 else None)
        if ratios["weight_over_bound"] is not None:
            ratios["within_guarantee"] = w <= float(GUARANTEE[alg]) * bv * (1 + tol.obj) + tol.obj
    config = {"eps_feas": tol.feas, "eps_obj": tol.obj, "eps_int": tol.int, "lazy_sa1": lazy,
              "sa1_max_n": sa1_max_n, "exact_max_n": EXACT_MAX_N}
    return RunReport(alg, wt, sorted(sol.chosen), sol.weight, config, list(sol.certificate), bounds, ratios,
                     {"wall_s": elapsed}, stats, trace_doc)


def cmd_solve(args) -> int:
    wt = _read_instance(args.inp)
    report = run_algorithm(args.alg, wt, _tol(args), args.lazy_sa1, args.trace, args.sa1_max_n)
    report.config.update(seed=args.seed)
    data = write_report(report)
    if args.out:
        Path(args.out).write_bytes(data)
        print(f"wrote report to {args.out}", file=sys.stderr)
    _emit({"command": "solve", "algorithm": args.alg, "n": wt.n, "chosen": report.chosen,
           "weight": format_rational(report.weight), "bounds": {k: (format_rational(v) if isinstance(v, Fraction) else v)
                                                                for k, v in report.bounds.items()},
           "within_guarantee": report.ratios.get("within_guarantee"), "report": args.out,
           "wall_s": report.timings["wall_s"]})
    print(f"{args.alg}: weight {format_rational(report.weight)} with {len(report.chosen)} vertices", file=sys.stderr)
    return 0


def cmd_enumerate(args) -> int:
    if args.order not in (5, 7):
        raise _Usage("enumerate supports order 5 or 7")
    t0 = time.perf_counter()
    census = enumerate_family(args.order, args.fvs_size)
    elapsed = time.perf_counter() - t0
    if args.out:
        Path(args.out).write_text(census.to_json())
        print(f"wrote census to {args.out}", file=sys.stderr)
    _emit({"command": "enumerate", "order": args.order, "fvs_size": args.fvs_size,
           "count": len(census.members), "heavy_count": census.heavy_count,
           "light_count": census.light_count, "wall_s": elapsed})
    print(f"{len(census.members)} tournaments on {args.order} vertices with minimum FVS >= {args.fvs_size}; "
          f"{census.heavy_count} heavy", file=sys.stderr)
    return 0


def gap_trial(n: int, trial: int, seed: int, tol: Tolerances, lazy: bool, exact_max_n: int) -> dict:
    s = seed + trial
    wt = WeightedTournament.unit(random_tournament(n, s))
    sa0 = lp_value(wt, 0, tol)
    res = fvst_7_3(wt, tol, lazy=lazy, max_n=None)
    sa1 = res.solution.bound_used[1]
    alg = res.solution.weight
    exact = exact_fvs(wt).weight if n <= exact_max_n else None
    return {
        "trial": trial,
        "seed": s,
        "n": n,
        "sa0": sa0,
        "sa1": sa1,
        "alg_weight": format_rational(alg),
        "exact_weight": None if exact is None else format_rational(exact),
        "alg_over_sa1": float(alg) / sa1 if sa1 > 0 else None,
        "exact_over_n": None if exact is None or n == 0 else float(exact) / n,
    }


def cmd_gap(args) -> int:
    tol = _tol(args)
    jobs = [(args.n, k, args.seed, tol, args.lazy_sa1, args.exact_max_n) for k in range(args.trials)]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(gap_trial, *zip(*jobs)))
    else:
        rows = [gap_trial(*j) for j in jobs]
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\t".join(GAP_COLUMNS) + "\n")
            for r in rows:
                fh.write("\t".join("" if r[c] is None else str(r[c]) for c in GAP_COLUMNS) + "\n")
        print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    for r in rows:
        _emit({"command": "gap", **r})
    cap = Fraction(3, 7) * args.n
    over = [r["trial"] for r in rows if r["sa1"] > float(cap) * (1 + tol.obj) + tol.obj]
    exact_ratios = [r["exact_over_n"] for r in rows if r["exact_over_n"] is not None]
    summary = {"command": "gap", "summary": True, "n": args.n, "trials": len(rows),
               "max_sa1": max((r["sa1"] for r in rows), default=None), "sa1_cap": float(cap),
               "trials_over_cap": over,
               "max_alg_over_sa1": max((r["alg_over_sa1"] for r in rows if r["alg_over_sa1"] is not None), default=None),
               "mean_exact_over_n": sum(exact_ratios) / len(exact_ratios) if exact_ratios else None}
    _emit(summary)
    print(f"{len(rows)} trials at n={args.n}; max SA1 {summary['max_sa1']} (cap {float(cap):.4f})", file=sys.stderr)
    return 0


def make_instance(family: str, n: int, seed: int, weights: str, k: int) -> WeightedTournament:
    if family == "random":
        t = random_tournament(n, seed)
    elif family == "light":
        t = generators.random_light(n, seed)
    elif family == "t5free":
        t = generators.random_t5_free(n, seed)
    elif family == "near-transitive":
        t = generators.near_transitive(n, max(1, n // 3), seed)
    elif family == "block-chain":
        if n % 5:
            raise _Usage("block-chain instances need n divisible by 5")
        t = generators.block_chain(n // 5, seed)
    else:
        raise _Usage(f"unknown family {family!r}")
    return generators.weighted(t, seed, weights, k)


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        s = args.seed * 100_003 + i
        wt = make_instance(args.family, args.n, s, args.weights, args.k)
        name = f"{args.family}-n{args.n}-{i:04d}"
        path = out / f"{name}.txt"
        path.write_text(emit_instance_file(InstanceFile(wt, name, s)))
        _emit({"command": "gen", "path": str(path), "n": args.n, "seed": s, "family": args.family,
               "weights": args.weights})
    print(f"wrote {args.count} instances to {out}", file=sys.stderr)
    return 0


def cmd_classify(args) -> int:
    wt = _read_instance(args.inp)
    t = wt.t
    heavy = heavy_triangles(t)
    bad5 = is_t5_free(t)
    doc = {
        "command": "classify",
        "n": t.n,
        "triangles": len(triangles(t)),
        "light": is_light(t),
        "heavy_triangles": [{"triangle": list(tri), "diagonals": [list(p) for p in diags]} for tri, diags in heavy],
        "t5_free": bad5 is None,
        "t5_witness": None if bad5 is None else list(bad5),
    }
    _emit(doc)
    verdict = "light" if doc["light"] else f"heavy ({len(heavy)} heavy triangles)"
    print(f"{verdict}; {'T5-free' if bad5 is None else f'contains T5 on {list(bad5)}'}", file=sys.stderr)
    return 0


def _add_eps(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps-feas", type=float, default=1e-7, help="LP feasibility tolerance")
    p.add_argument("--eps-obj", type=float, default=1e-6, help="relative objective tolerance")
    p.add_argument("--eps-int", type=float, default=1e-4, help="rounding/snap tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fvst", description="Feedback vertex sets in tournaments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance and write a report")
    p.add_argument("--in", dest="inp", help="instance file (default: stdin)")
    p.add_argument("--out", help="report path")
    p.add_argument("--alg", choices=ALGORITHMS, default="sa73")
    p.add_argument("--seed", type=int, default=None, help="recorded in the report")
    p.add_argument("--trace", action="store_true", help="include the algorithm trace in the report")
    p.add_argument("--lazy-sa1", action="store_true", help="add lifted rows on demand")
    p.add_argument("--sa1-max-n", type=int, default=SA1_MAX_N, help="size cap for the lifted model")
    _add_eps(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("enumerate", help="census of small tournaments with large minimum FVS")
    p.add_argument("order", type=int)
    p.add_argument("fvs_size", type=int)
    p.add_argument("--out", help="census JSON path")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("gap", help="lifted-LP integrality gap experiment on random unit tournaments")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="TSV data file")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--lazy-sa1", action="store_true")
    p.add_argument("--exact-max-n", type=int, default=16, help="largest n for which the exact optimum is computed")
    _add_eps(p)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("gen", help="write a seeded corpus of instance files")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", "--trials", dest="count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--family", choices=FAMILIES, default="random")
    p.add_argument("--weights", choices=("unit", "uniform-int"), default="unit")
    p.add_argument("--k", type=int, default=10, help="upper end of uniform-int weights")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("classify", help="light/heavy verdict and T5-freeness")
    p.add_argument("--in", dest="inp", help="instance file (default: stdin)")
    p.set_defaults(func=cmd_classify)
    return parser


def _validate(args) -> None:
    for name in ("n", "trials", "count", "order", "fvs_size", "k"):
        v = getattr(args, name, None)
        if v is not None and v < 0:
            raise _Usage(f"--{name.replace('_', '-')} must be nonnegative")
    if getattr(args, "jobs", 1) < 1:
        raise _Usage("--jobs must be at least 1")
    for name in ("eps_feas", "eps_obj", "eps_int"):
        v = getattr(args, name, None)
        if v is not None and not 0 < v < 0.5:
            raise _Usage(f"--{name.replace('_', '-')} must lie in (0, 0.5)")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _validate(args)
        return args.func(args)
    except _Usage as exc:
        parser.error(str(exc))  # exits with status 2
    except PreconditionError as exc:
        witness = exc.witness
        _emit({"command": args.command, "error": "precondition", "message": str(exc),
               "witness": list(witness) if witness is not None else None})
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, SizeLimitError) as exc:
        _emit({"command": args.command, "error": "input", "message": str(exc)})
        print(f"bad input: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        _emit({"command": args.command, "error": "invariant", "message": str(exc), "bundle": exc.bundle})
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 1
    except (FvstError, OSError) as exc:
        _emit({"command": args.command, "error": "internal", "message": str(exc)})
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
