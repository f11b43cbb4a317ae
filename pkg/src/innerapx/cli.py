"""Command line front end.

    innerapx generate --type kp --n 50 --d 3 --seed 1 -o kp50.kp
    innerapx solve kp50.kp --eps 0.1 --oracle extgreedy -o run.json
    innerapx evaluate run.json --reference ref.json --check-grid
    innerapx compare run_a.json run_b.json --reference ref.json

Exit codes: 0 success, 2 usage/parse/input errors, 3 limit reached (partial
JSON still written with ``"complete": false``), 4 oracle failures.
``PARETO_LOG`` sets the log level (e.g. ``DEBUG``).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import grid, instances, metrics
from .core import EpsilonSpec, RunConfig, RunResult, find_initial_solution, inner_approximate, postprocess
from .exceptions import (
    InnerApxError,
    InstanceParseError,
    LimitExceeded,
    MetricUndefinedError,
    OracleContractError,
    OracleError,
    TooLargeError,
    UnsupportedDimensionError,
)
from .oracles import ORACLES, make_oracle
from .polytope import Polyhedron

EXIT_OK, EXIT_USAGE, EXIT_LIMIT, EXIT_ORACLE = 0, 2, 3, 4

log = logging.getLogger("innerapx")


class UsageError(Exception):
    pass


def _instance_id(inst) -> str:
    return hashlib.sha256(instances.format_instance(inst).encode()).hexdigest()[:16]


def _parse_eps(text: str, orientation) -> EpsilonSpec:
    try:
        values = [Fraction(t.strip()) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"bad epsilon {text!r}") from None
    if len(values) == 1:
        values = values * orientation.d
    try:
        return EpsilonSpec(orientation, tuple(values))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _summary(inst) -> str:
    return f"{inst.kind} n={inst.n} d={inst.d} id={_instance_id(inst)}"


# ---------------------------------------------------------------------------
# generate


def cmd_generate(args) -> int:
    if args.type == "kp":
        if args.n < 1 or args.d < 2:
            raise UsageError("kp needs --n >= 1 and --d >= 2")
        inst = instances.generate_kp(args.n, args.d, args.seed, args.mode)
    elif args.type == "ap":
        if args.n < 2 or args.d < 1:
            raise UsageError("ap needs --n >= 2 and --d >= 1")
        inst = instances.generate_ap(args.n, args.d, args.seed, args.high)
    else:
        if args.n < 3 or args.d < 1:
            raise UsageError("tsp needs --n >= 3 and --d >= 1")
        inst = instances.generate_tsp(args.n, args.seed, args.d)
    if args.output:
        instances.write_instance(inst, args.output)
    else:
        sys.stdout.write(instances.format_instance(inst))
    print(_summary(inst), file=sys.stderr if not args.output else sys.stdout)
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve


def _write_json(obj, path):
    text = json.dumps(obj, indent=1, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    inst = instances.read_instance(args.instance, args.kind)
    try:
        oracle = make_oracle(inst, args.oracle)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    spec = _parse_eps(args.eps, inst.orientation)
    cfg = RunConfig(max_iterations=args.max_iterations, time_limit=args.time_limit,
                    trace_level="debug" if log.isEnabledFor(logging.DEBUG) else "calls")
    meta = {
        "instance": str(args.instance),
        "instance_id": _instance_id(inst),
        "kind": inst.kind,
        "oracle": oracle.name,
        "grid_p": grid.derive_p(inst),
    }
    code = EXIT_OK
    x_init = find_initial_solution(oracle.ws, inst)
    try:
        result = inner_approximate(oracle, x_init, spec, cfg)
    except LimitExceeded as exc:
        log.warning("%s", exc)
        result, code = exc.partial, EXIT_LIMIT
    if not args.no_postprocess:
        result = postprocess(result)
    out = result.to_json()
    out["meta"] = meta
    _write_json(out, args.output)
    log.info("|R|=%d oracle_calls=%d complete=%s", len(result.solutions),
             result.stats.oracle_calls, result.complete)
    return code


# ---------------------------------------------------------------------------
# evaluate / compare


def _load_run(path) -> RunResult:
    try:
        return RunResult.from_json(json.loads(Path(path).read_text()))
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read run file {path}: {exc}") from None


def _is_run_file(path) -> bool:
    try:
        obj = json.loads(Path(path).read_text())
    except (ValueError, UnicodeDecodeError):
        return False
    return isinstance(obj, dict) and "facets" in obj


class Reference:
    """Reference data for metrics: extreme supported images ``rstar``,
    the non-dominated set ``ynd`` and, when known, the instance."""

    def __init__(self, path, limit):
        self.instance = None
        if _is_run_file(path):
            run = _load_run(path)
            pts = run.polyhedron.vertices
            self.rstar = metrics.ReferenceSet(pts, "exact-mode")
            self.ynd = self.rstar
            self.instance_id = run.meta.get("instance_id")
        else:
            self.instance = instances.read_instance(path)
            images = instances.enumerate_images(self.instance, limit)
            o = self.instance.orientation
            self.rstar = metrics.ReferenceSet(
                Polyhedron.from_points(images, o).vertices, "brute-force")
            self.ynd = metrics.ReferenceSet(instances.nondominated(images, o), "brute-force")
            self.instance_id = _instance_id(self.instance)


def _evaluate_one(run_path, ref: Reference, check_grid: bool) -> list:
    run = _load_run(run_path)
    rid = run.meta.get("instance_id")
    if ref.instance_id and rid and rid != ref.instance_id:
        raise UsageError(f"{run_path} was solved on a different instance than the reference")
    eps = run.spec.eps[0] if len(set(run.spec.eps)) == 1 else ",".join(map(str, run.spec.eps))
    try:
        indicator = metrics.eps_convex_indicator(run.polyhedron, ref.rstar)
    except ValueError:
        indicator = None
    ce = me = hvr = rr = None
    try:
        ce, me, hvr, rr = metrics.representation_metrics(
            run.images, ref.ynd, run.spec.orientation, with_hvr=run.spec.d <= 3)
    except (MetricUndefinedError, UnsupportedDimensionError) as exc:
        log.info("representation metrics skipped: %s", exc)
    report = metrics.MetricsReport(
        rid or Path(run_path).stem, eps, run.quality.alpha, len(run.solutions), len(ref.rstar),
        indicator, ce, me, hvr, rr, run.stats.wall_ms)
    row = report.row()
    if check_grid:
        inst = ref.instance
        if inst is None:
            inst = instances.read_instance(run.meta["instance"])
        spec = grid.GridSpec(grid.derive_p(inst), run.spec.eps, run.spec.orientation)
        ok = grid.check_once_per_cell(run.returned_images, spec)
        print(f"{run_path}: grid_ok={'true' if ok else 'false'}", file=sys.stderr)
        row.append("true" if ok else "false")
    return row


def _evaluate_job(job):
    run_path, ref_path, limit, check_grid = job
    return _evaluate_one(run_path, Reference(ref_path, limit), check_grid)


def cmd_evaluate(args) -> int:
    if not args.reference:
        raise UsageError("evaluate needs --reference (exact-mode run JSON or instance file)")
    header = list(metrics.MetricsReport.FIELDS) + (["grid_ok"] if args.check_grid else [])
    if args.jobs > 1 and len(args.runs) > 1:
        jobs = [(r, args.reference, args.limit, args.check_grid) for r in args.runs]
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_evaluate_job, jobs))
    else:
        ref = Reference(args.reference, args.limit)
        rows = [_evaluate_one(r, ref, args.check_grid) for r in args.runs]
    _write_csv([header] + rows, args.output)
    return EXIT_OK


def cmd_compare(args) -> int:
    ref = Reference(args.reference, args.limit) if args.reference else None
    runs = [_load_run(p) for p in (args.run_a, args.run_b)]
    ids = {r.meta.get("instance_id") for r in runs}
    if len(ids) > 1 or (ref and ref.instance_id and ids != {ref.instance_id}):
        raise UsageError("runs were not solved on the same instance")
    rows = [["run", "eps", "alpha", "R", "eps_indicator", "wall_ms", "ratio"]]
    for path, run in zip((args.run_a, args.run_b), runs):
        ind = ratio = None
        if ref is not None:
            ind = metrics.eps_convex_indicator(run.polyhedron, ref.rstar)
            ratio = metrics.cardinality_ratio(len(run.solutions), len(ref.rstar))
        eps = ",".join(sorted({str(e) for e in run.spec.eps}))
        rows.append([str(path), eps, str(run.quality.alpha), str(len(run.solutions)),
                     metrics._fmt(ind), f"{run.stats.wall_ms:.3f}",
                     "" if ratio is None else str(ratio)])
    _write_csv(rows, args.output)
    return EXIT_OK


def _write_csv(rows, path):
    out = open(path, "w", newline="") if path else sys.stdout
    try:
        csv.writer(out, lineterminator="\n").writerows(rows)
    finally:
        if path:
            out.close()


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="innerapx", description="Convex approximation sets "
                                     "for multi-objective combinatorial problems.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random benchmark instance")
    g.add_argument("--type", choices=("kp", "ap", "tsp"), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--mode", choices=("uniform", "conflicting"), default="uniform")
    g.add_argument("--high", type=int, default=20, help="largest AP cost")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="compute a convex approximation set")
    s.add_argument("instance")
    s.add_argument("--kind", choices=("kp", "ap", "tsp", "explicit"),
                   help="instance type if the file has no type line")
    s.add_argument("--eps", default="0.1", help="decimal or fraction; comma list for per-objective")
    s.add_argument("--oracle", choices=sorted(ORACLES))
    s.add_argument("--time-limit", type=float)
    s.add_argument("--max-iterations", type=int, default=100_000)
    s.add_argument("--no-postprocess", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("evaluate", help="metrics of runs as CSV rows")
    e.add_argument("runs", nargs="+")
    e.add_argument("--reference")
    e.add_argument("--check-grid", action="store_true")
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--limit", type=int, default=instances.DEFAULT_LIMIT)
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_evaluate)

    c = sub.add_parser("compare", help="side-by-side CSV of two runs")
    c.add_argument("run_a")
    c.add_argument("run_b")
    c.add_argument("--reference")
    c.add_argument("--limit", type=int, default=instances.DEFAULT_LIMIT)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("PARETO_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InstanceParseError, TooLargeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OracleContractError, OracleError) as exc:
        print(f"oracle error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except InnerApxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
