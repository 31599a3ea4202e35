"""Command line entry point.

Human-readable output goes to stdout; every subcommand also writes exactly one
JSON line to stderr for machines. Exit codes: 0 success, 1 invalid input or a
failed reproduction claim, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import metrics, nbi
from .harness import (
    FIXTURES,
    FrontierFormatError,
    RunConfig,
    compare_report,
    emit_plot_data,
    export,
    load_fixture,
    read_frontier_csv,
    run_sweep,
    to_jsonable,
)
from .problem import ProblemDefinitionError, load_problem
from .swarm import ALGORITHMS

BETA_PRESETS = {"default": {}, "a2": {"first_floor2": 0.3}}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _json_arg(text: str, what: str):
    """Inline JSON or a path to a JSON file."""
    if text is None:
        return None
    stripped = text.strip()
    if stripped[:1] in "[{":
        source = stripped
    else:
        path = Path(text)
        if not path.exists():
            raise UsageError(f"{what}: {text} is neither JSON nor an existing file")
        source = path.read_text("utf-8")
    try:
        return json.loads(source)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}: line {exc.lineno}: {exc.msg}") from None


def parse_betas(text: str | None):
    """Preset name, ``key=value`` grid options, inline JSON or a JSON file."""
    if text is None:
        return {}
    if text in BETA_PRESETS:
        return dict(BETA_PRESETS[text])
    if "=" in text and text.strip()[:1] not in "[{":
        spec = {}
        for part in text.split(","):
            key, _, value = part.partition("=")
            try:
                spec[key.strip()] = float(value)
            except ValueError:
                raise UsageError(f"--betas: bad value in {part!r}") from None
        return spec
    return _json_arg(text, "--betas")


def parse_nadir(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--nadir: expected comma-separated numbers, got {text!r}") from None


def _emit(doc: dict) -> None:
    sys.stderr.write(json.dumps(to_jsonable(doc), sort_keys=True) + "\n")


def _fmt_row(name, p: metrics.ParetoPoint) -> str:
    beta = "(" + ", ".join(f"{b:g}" for b in p.beta) + ")" if p.beta else "-"
    F = ", ".join(f"{v:.6g}" for v in p.F)
    return f"  {name:<7} beta {beta:<17} f ({F})  HVI {p.point_hvi:.6f}"


def summary_lines(frontier: metrics.FrontierSet) -> list[str]:
    rank = metrics.rank_solutions(frontier)
    lines = [f"{frontier.algorithm or 'frontier'}: {len(frontier)} points, set HVI {frontier.set_hvi():.6f}"]
    for which in ("best", "median", "worst"):
        lines.append(_fmt_row(which, frontier.points[getattr(rank, which)]))
    return lines


def _load_frontier(spec: str, nadir) -> tuple[str, metrics.FrontierSet]:
    """``name=path`` or a bundled fixture name."""
    name, sep, path = spec.partition("=")
    if not sep:
        if spec in FIXTURES:
            return spec, load_fixture(spec, nadir)
        name, path = Path(spec).stem, spec
    if path in FIXTURES:
        return name, load_fixture(path, nadir)
    fr = read_frontier_csv(path, name, nadir)
    return name, fr


def cmd_solve(args) -> int:
    doc = dict(_json_arg(args.manifest, "--manifest") or {})
    if isinstance(doc.get("config"), dict):
        doc = dict(doc["config"])
    algorithm = args.algorithm or doc.get("algorithm", "pso")
    if algorithm not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {algorithm!r}; valid: {', '.join(ALGORITHMS)}")
    doc["algorithm"] = algorithm
    if args.problem is not None or "problem" not in doc:
        doc["problem"] = args.problem or "gardenia"
    if args.betas is not None or "betas" not in doc:
        doc["betas"] = parse_betas(args.betas)
    if args.params is not None:
        doc["params"] = _json_arg(args.params, "--params")
    if args.seed is not None:
        doc["seed"] = args.seed
    doc["output"] = args.out
    try:
        config = RunConfig.from_manifest(doc)
        config.grid()
        load_problem(config.problem)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    except (ValueError, TypeError, ProblemDefinitionError) as exc:
        raise UsageError(str(exc)) from None
    result = run_sweep(config)
    for line in summary_lines(result.frontier):
        print(line)
    for w in result.manifest["warnings"]:
        print(f"warning: {w}")
    if args.out:
        print(f"wrote {Path(args.out) / 'frontier.csv'} and manifest.json")
    rank = metrics.rank_solutions(result.frontier)
    _emit({"command": "solve", "algorithm": config.algorithm, "seed": config.seed,
           "points": len(result.frontier), "set_hvi": result.frontier.set_hvi(),
           "best_hvi": result.frontier.points[rank.best].point_hvi,
           "failures": len(result.manifest["failures"]), "out": args.out})
    return 0


def cmd_metrics(args) -> int:
    nadir = parse_nadir(args.nadir)
    try:
        frontier = read_frontier_csv(args.input, Path(args.input).stem, nadir)
    except (FrontierFormatError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    wanted = args.metric or ["hvi", "convergence", "rank"]
    out = {"command": "metrics", "input": args.input, "nadir": list(nadir)}
    if "hvi" in wanted:
        try:
            out["set_hvi"] = metrics.hvi_set(frontier.objectives, nadir)
        except metrics.NadirError as exc:
            raise UsageError(str(exc)) from None
        print(f"set HVI: {out['set_hvi']:.6f}")
    if "convergence" in wanted:
        if args.reference:
            ref = read_frontier_csv(args.reference, "reference", nadir).objectives
        else:
            ref = frontier.points[metrics.rank_solutions(frontier).best].F[None, :]
        ranges = metrics.union_ranges(frontier.objectives, ref)
        try:
            out["convergence"] = metrics.convergence_metric(frontier.objectives, ref, ranges)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        print(f"convergence: {out['convergence']:.6g}")
    if "rank" in wanted:
        rank = metrics.rank_solutions(frontier)
        for line in summary_lines(frontier)[1:]:
            print(line)
        out["ranking"] = {w: {"row": getattr(rank, w) + 1,
                              "point_hvi": frontier.points[getattr(rank, w)].point_hvi}
                          for w in ("best", "median", "worst")}
    _emit(out)
    return 0


def cmd_compare(args) -> int:
    nadir = parse_nadir(args.nadir)
    try:
        frontiers = dict(_load_frontier(spec, nadir) for spec in args.frontiers)
    except (FrontierFormatError, ValueError, OSError) as exc:
        raise UsageError(str(exc)) from None
    if len(frontiers) < 2:
        raise UsageError("compare needs at least two distinct frontiers")
    problem = load_problem(args.problem) if args.problem else None
    report = compare_report(frontiers, nadir, problem)
    for name, fr in frontiers.items():
        for line in summary_lines(fr):
            print(line)
        print(f"  convergence {report['frontiers'][name]['convergence']:.6g}")
    for key, val in report["pairwise"].items():
        print(f"{key}: best point {val['best_point_pct']:.4f}%, set {val['set_hvi_pct']:.4f}%")
    for w in report["warnings"]:
        print(f"warning: {w}")
    if args.out:
        export(report, "json", Path(args.out) / "report.json")
        emit_plot_data(frontiers, report, Path(args.out) / "plot")
    _emit({"command": "compare", "set_hvi": {n: v["set_hvi"] for n, v in report["frontiers"].items()},
           "convergence": {n: v["convergence"] for n, v in report["frontiers"].items()},
           "pairwise": report["pairwise"], "warnings": len(report["warnings"])})
    return 0


def cmd_reproduce(args) -> int:
    from . import reproduce

    claims = reproduce.fixture_claims()
    sweep_report = None
    if args.full:
        extra, sweep_report = reproduce.sweep_claims(args.seed, args.seeds)
        claims += extra
    print("claim results")
    for c in claims:
        print(c.line())
    if sweep_report is not None:
        print("stochastic comparison (live sweeps, seed %d)" % args.seed)
        for name, fr in sweep_report["frontiers"].items():
            print(f"  {name:<6} set HVI {fr['set_hvi']:.4f}  best {fr['best']['point_hvi']:.4f}  "
                  f"convergence {fr['convergence']:.4g}")
    failed = [c for c in claims if c.status == "FAIL"]
    counts = {s: sum(c.status == s for c in claims) for s in ("PASS", "FAIL", "WARN", "INFO")}
    print(" ".join(f"{k}={v}" for k, v in counts.items()))
    if args.out:
        doc = {"claims": [c.__dict__ | {"status": c.status} for c in claims]}
        if sweep_report is not None:
            doc["stochastic_comparison"] = sweep_report
        export(doc, "json", Path(args.out) / "reproduce.json")
    _emit({"command": "reproduce", "mode": "full" if args.full else "fixtures-only",
           "counts": counts, "failed": [c.label for c in failed]})
    return 1 if failed else 0


def cmd_export_fixtures(args) -> int:
    out = Path(args.out)
    written = []
    for name in FIXTURES:
        fr = load_fixture(name)
        written.append(str(export(fr, args.format, out / f"{name}.{args.format}")))
    for path in written:
        print(path)
    _emit({"command": "export-fixtures", "files": written})
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nbiswarm", description="NBI swarm optimisation of box-bounded multiobjective problems")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="run an NBI weight sweep")
    s.add_argument("--problem", help="bundled name or JSON file (default gardenia)")
    s.add_argument("--algorithm", help=f"one of {', '.join(ALGORITHMS)} (default pso)")
    s.add_argument("--betas", help="'default', 'a2', 'step=..,floor2=..' or JSON weights")
    s.add_argument("--params", help="solver parameters as inline JSON or a JSON file")
    s.add_argument("--manifest", help="run-manifest JSON supplying any of the above")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", help="run directory (frontier.csv, manifest.json)")
    s.set_defaults(func=cmd_solve)

    m = sub.add_parser("metrics", help="hypervolume, convergence and ranking of a frontier CSV")
    m.add_argument("--input", required=True)
    m.add_argument("--nadir", default="0,0,0")
    m.add_argument("--metric", action="append", choices=("hvi", "convergence", "rank"))
    m.add_argument("--reference", help="CSV of reference points for the convergence metric")
    m.set_defaults(func=cmd_metrics)

    c = sub.add_parser("compare", help="compare frontiers (NAME=CSV or fixture names)")
    c.add_argument("frontiers", nargs="+")
    c.add_argument("--nadir", default="0,0,0")
    c.add_argument("--problem", help="check reported objectives against this problem's model")
    c.add_argument("--out")
    c.set_defaults(func=cmd_compare)

    r = sub.add_parser("reproduce", help="check the published numbers")
    mode = r.add_mutually_exclusive_group()
    mode.add_argument("--fixtures-only", action="store_true", default=True)
    mode.add_argument("--full", action="store_true")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--seeds", type=int, default=5, help="base seeds for the live sweeps")
    r.add_argument("--out")
    r.set_defaults(func=cmd_reproduce)

    e = sub.add_parser("export-fixtures", help="write the bundled fixtures")
    e.add_argument("--out", required=True)
    e.add_argument("--format", choices=("csv", "json"), default="csv")
    e.set_defaults(func=cmd_export_fixtures)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (nbi.DegenerateFrontierError, nbi.AnchorError, RuntimeError, OSError, ValueError) as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
