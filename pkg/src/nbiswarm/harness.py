"""Sweeps over NBI weights, fixture loading, comparison reports and file output."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from . import metrics, nbi
from .metrics import FrontierSet, ParetoPoint
from .problem import MOProblem, load_problem
from .swarm import get_solver, make_params, params_dict

logger = logging.getLogger("nbiswarm.harness")

CSV_HEADER = ("beta1", "beta2", "beta3", "f1", "f2", "f3", "x1", "x2", "x3", "iterations")
FIXTURES = {"A1": "gsa", "A2": "pso", "A3": "hopso", "table8_ga": "ga"}
WORKERS_ENV = "NBISWARM_WORKERS"

# Anchor solver shared by every algorithm so that all frontiers sit on the
# same CHIM; a larger swarm than the sweep default pins the individual optima tightly.
DEFAULT_ANCHOR = {
    "algorithm": "pso",
    "params": {"swarm_size": 20, "t_max": 1000, "stall_window": 50,
               "social_influence": None, "personal_influence": None},
}

NBI_DEFAULTS_NOTE = ("NBI penalty rho, the t search interval and the absence of objective "
                     "normalisation are artifact choices; the source gives none of them")


class FrontierFormatError(ValueError):
    pass


class FixtureIntegrityError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# CSV / JSON


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def frontier_rows(frontier: FrontierSet) -> list[list[str]]:
    rows = []
    for p in frontier.points:
        beta = list(p.beta) if p.beta else [None] * 3
        rows.append([_cell(v) for v in (*beta, *p.F, *p.x, p.iterations)])
    return rows


def frontier_csv(frontier: FrontierSet) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(frontier_rows(frontier))
    return buf.getvalue()


def parse_frontier_csv(text: str, algorithm: str = "", nadir=metrics.DEFAULT_NADIR,
                       source: str = "<csv>") -> FrontierSet:
    """Frontier from CSV text in the result-row layout; errors name the line."""
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise FrontierFormatError(f"{source}: empty file")
    header = tuple(h.strip() for h in lines[0].split(","))
    if header != CSV_HEADER:
        raise FrontierFormatError(f"{source}: line 1: expected header {','.join(CSV_HEADER)}")
    points = []
    for lineno, row in enumerate(csv.reader(lines[1:]), start=2):
        if not row or not any(c.strip() for c in row):
            continue
        if len(row) != len(CSV_HEADER):
            raise FrontierFormatError(f"{source}: line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        try:
            cells = [float(c) if c.strip() else None for c in row]
        except ValueError as exc:
            raise FrontierFormatError(f"{source}: line {lineno}: {exc}") from None
        beta, F, x, its = cells[0:3], cells[3:6], cells[6:9], cells[9]
        if any(v is None for v in F):
            raise FrontierFormatError(f"{source}: line {lineno}: missing objective value")
        if any(v is None for v in beta) and any(v is not None for v in beta):
            raise FrontierFormatError(f"{source}: line {lineno}: partial weight vector")
        points.append(ParetoPoint(
            beta=() if beta[0] is None else beta,
            x=[np.nan if v is None else v for v in x],
            F=F,
            iterations=None if its is None else int(its),
        ))
    if not points:
        raise FrontierFormatError(f"{source}: no data rows")
    return FrontierSet(points, algorithm, nadir)


def read_frontier_csv(path, algorithm: str = "", nadir=metrics.DEFAULT_NADIR) -> FrontierSet:
    path = Path(path)
    try:
        text = path.read_text("utf-8")
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror}") from exc
    return parse_frontier_csv(text, algorithm, nadir, str(path))


def to_jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.floating):
        return to_jsonable(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return None if np.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def frontier_document(frontier: FrontierSet) -> dict:
    return {
        "algorithm": frontier.algorithm,
        "nadir": list(frontier.nadir),
        "rows": [
            {"beta": list(p.beta), "f": p.F, "x": p.x, "iterations": p.iterations,
             "point_hvi": p.point_hvi}
            for p in frontier.points
        ],
    }


def frontier_from_document(doc: dict) -> FrontierSet:
    points = [ParetoPoint(tuple(r["beta"]), r["x"], r["f"], r.get("iterations"))
              for r in doc["rows"]]
    return FrontierSet(points, doc.get("algorithm", ""), tuple(doc.get("nadir", metrics.DEFAULT_NADIR)))


def dumps(doc) -> str:
    return json.dumps(to_jsonable(doc), indent=2, sort_keys=False) + "\n"


def export(obj, fmt: str, path) -> Path:
    """Write a frontier (csv or json) or a report/manifest document (json)."""
    path = Path(path)
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown export format {fmt!r}")
    if isinstance(obj, FrontierSet):
        text = frontier_csv(obj) if fmt == "csv" else dumps(frontier_document(obj))
    elif fmt == "json":
        text = dumps(obj)
    else:
        raise ValueError("only frontiers export to csv")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, "utf-8")
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror}") from exc
    return path


# ---------------------------------------------------------------------------
# fixtures


def _fixture_dir():
    return resources.files("nbiswarm.data").joinpath("fixtures")


def fixture_checksums() -> dict[str, str]:
    text = _fixture_dir().joinpath("SHA256SUMS").read_text("utf-8")
    out = {}
    for line in text.splitlines():
        if line.strip():
            digest, name = line.split()
            out[name] = digest
    return out


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; valid: {', '.join(FIXTURES)}")
    return _fixture_dir().joinpath(f"{name}.csv").read_text("utf-8")


def load_fixture(name: str, nadir=metrics.DEFAULT_NADIR, verify: bool = True) -> FrontierSet:
    """Bundled reference frontier as a ``FrontierSet``."""
    text = fixture_text(name)
    if verify:
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        expected = fixture_checksums().get(f"{name}.csv")
        if digest != expected:
            raise FixtureIntegrityError(f"fixture {name}: sha256 {digest} does not match {expected}")
    return parse_frontier_csv(text, FIXTURES[name], nadir, f"fixture:{name}")


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class RunConfig:
    problem: str = "gardenia"
    algorithm: str = "pso"
    betas: dict | list = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    rho: float = nbi.DEFAULT_RHO
    normalize: bool = False
    seed: int = 0
    output: Optional[str] = None
    anchor: dict = field(default_factory=lambda: json.loads(json.dumps(DEFAULT_ANCHOR)))
    nadir: tuple = metrics.DEFAULT_NADIR

    def __post_init__(self):
        make_params(self.algorithm, self.params)  # fail early on bad keys
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        self.nadir = tuple(float(v) for v in self.nadir)

    def grid(self) -> list[nbi.BetaWeights]:
        if isinstance(self.betas, list):
            return [nbi.BetaWeights(tuple(b)) for b in self.betas]
        return nbi.beta_grid(**self.betas)

    def manifest(self) -> dict:
        return {
            "problem": self.problem,
            "algorithm": self.algorithm,
            "betas": self.betas,
            "params": params_dict(make_params(self.algorithm, self.params)),
            "nbi": {"rho": self.rho, "normalize": self.normalize},
            "anchor": self.anchor,
            "nadir": list(self.nadir),
            "seed": self.seed,
            "output": self.output,
        }

    @classmethod
    def from_manifest(cls, doc: dict) -> "RunConfig":
        """Config from its own ``manifest()`` or from a full run manifest."""
        if isinstance(doc.get("config"), dict):
            doc = doc["config"]
        nbi_doc = doc.get("nbi", {})
        kwargs = dict(
            problem=doc.get("problem", "gardenia"),
            algorithm=doc.get("algorithm", "pso"),
            betas=doc.get("betas", {}),
            params=doc.get("params", {}),
            rho=nbi_doc.get("rho", nbi.DEFAULT_RHO),
            normalize=nbi_doc.get("normalize", False),
            seed=doc.get("seed", 0),
            output=doc.get("output"),
            nadir=tuple(doc.get("nadir", metrics.DEFAULT_NADIR)),
        )
        if "anchor" in doc:
            kwargs["anchor"] = doc["anchor"]
        return cls(**kwargs)


def row_seed(base_seed: int, index: int) -> int:
    """Seed for weight row ``index``; independent of worker scheduling."""
    return int(np.random.SeedSequence([base_seed, index]).generate_state(1)[0])


@dataclass
class SweepResult:
    frontier: FrontierSet
    manifest: dict
    anchors: nbi.Anchors


def _solve_row(task):
    sub, algorithm, params, seed = task
    result = get_solver(algorithm, params)(sub.fitness, sub.search_bounds(), seed)
    return result.best_position, result.iterations, result.best_fitness


def _workers(requested: Optional[int]) -> int:
    if requested is not None:
        return max(1, int(requested))
    value = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(value))
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {value!r}") from None


def run_sweep(config: RunConfig, workers: Optional[int] = None,
              problem: Optional[MOProblem] = None) -> SweepResult:
    """Solve every weight row of ``config`` and collect the frontier.

    Row failures are logged, recorded in the manifest and skipped; a
    degenerate frontier aborts the sweep.
    """
    started = time.perf_counter()
    problem = problem if problem is not None else load_problem(config.problem)
    params = make_params(config.algorithm, config.params)
    anchor_alg = config.anchor.get("algorithm", "pso")
    anchor_solver = get_solver(anchor_alg, make_params(anchor_alg, config.anchor.get("params", {})))
    optima = nbi.individual_optima(problem, anchor_solver, config.seed)
    anchors = nbi.anchors_from_optima(problem, optima)
    grid = config.grid()
    subs = [nbi.build_subproblem(problem, anchors, b, config.rho, config.normalize) for b in grid]
    tasks = [(s, config.algorithm, params, row_seed(config.seed, i)) for i, s in enumerate(subs)]

    n_workers = _workers(workers)
    outcomes: list = [None] * len(tasks)
    if n_workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            futures = [pool.submit(_solve_row, t) for t in tasks]
            for i, fut in enumerate(futures):
                try:
                    outcomes[i] = fut.result()
                except Exception as exc:  # recorded per row, sweep continues
                    outcomes[i] = exc
    else:
        for i, t in enumerate(tasks):
            try:
                outcomes[i] = _solve_row(t)
            except Exception as exc:
                outcomes[i] = exc

    points, failures, rows = [], [], []
    d = problem.dimension
    for i, (beta, sub, out) in enumerate(zip(grid, subs, outcomes)):
        if isinstance(out, Exception):
            logger.warning("row %d beta=%s failed: %s", i, beta.label(), out)
            failures.append({"index": i, "beta": list(beta), "error": f"{type(out).__name__}: {out}"})
            continue
        z, iterations, fitness = out
        x = problem.clamp(z[:d])
        F = problem.evaluate(x)
        point = ParetoPoint(tuple(beta), x, F, int(iterations))
        points.append(point)
        logger.info("row %d beta=%s f=%s iterations=%d", i, beta.label(), np.round(F, 5), iterations)
        rows.append({"index": i, "beta": list(beta), "f": F, "x": x, "t": float(z[d]),
                     "fitness": float(fitness), "iterations": int(iterations)})

    frontier = FrontierSet(points, config.algorithm, config.nadir, problem.sense)
    for row, p in zip(rows, points):
        row["point_hvi"] = p.point_hvi
    warnings = [NBI_DEFAULTS_NOTE]
    outside = frontier.outside_nadir()
    if outside:
        warnings.append(f"rows {outside} do not dominate the nadir; their point HVI is reported as 0")
    if failures:
        warnings.append(f"{len(failures)} weight rows failed and were skipped")

    manifest = {
        "config": config.manifest(),
        "anchors": {"x": np.array(anchors.optima), "f": anchors.images},
        "rows": rows,
        "failures": failures,
        "warnings": warnings,
        "timing": {"seconds": time.perf_counter() - started, "workers": n_workers},
    }
    if config.output:
        out = Path(config.output)
        export(frontier, "csv", out / "frontier.csv")
        export(manifest, "json", out / "manifest.json")
    return SweepResult(frontier, manifest, anchors)


# ---------------------------------------------------------------------------
# reports


def manifest_schema() -> dict:
    return json.loads(resources.files("nbiswarm.data").joinpath("manifest.schema.json").read_text("utf-8"))


def validate_manifest(doc: dict) -> None:
    import jsonschema

    jsonschema.validate(json.loads(dumps(doc)), manifest_schema())


def _point_doc(p: ParetoPoint) -> dict:
    return {"beta": list(p.beta), "f": p.F, "x": p.x, "iterations": p.iterations,
            "point_hvi": p.point_hvi}


def coefficient_check(problem: MOProblem, frontier: FrontierSet, rel_tol: float = 1e-4) -> Optional[str]:
    """Warning text when the frontier's reported F differs from F evaluated at its x."""
    worst, where = 0.0, None
    for i, p in enumerate(frontier.points):
        if p.x.size != problem.dimension or not np.all(np.isfinite(p.x)):
            continue
        F = problem.evaluate(p.x)
        rel = float(np.max(np.abs(F - p.F) / np.maximum(np.abs(p.F), 1e-12)))
        if rel > worst:
            worst, where = rel, (i, F)
    if where is None or worst <= rel_tol:
        return None
    i, F = where
    p = frontier.points[i]
    return (f"{frontier.algorithm}: reported objectives differ from the model evaluated at the "
            f"reported x by up to {100 * worst:.3g}% (row {i}: reported "
            f"{np.round(p.F, 5).tolist()}, model {np.round(F, 5).tolist()})")


def compare_report(frontiers: dict[str, FrontierSet], nadir=metrics.DEFAULT_NADIR,
                   problem: Optional[MOProblem] = None) -> dict:
    """Rankings, best-point and set HVI percentages and convergence for named frontiers."""
    if len(frontiers) < 2:
        raise ValueError("compare needs at least two frontiers")
    names = list(frontiers)
    per, warnings = {}, []
    best_points = {}
    for name, fr in frontiers.items():
        rank = metrics.rank_solutions(fr)
        best_points[name] = fr.points[rank.best]
        per[name] = {
            "n_points": len(fr),
            "set_hvi": fr.set_hvi(),
            "best": _point_doc(fr.points[rank.best]),
            "median": _point_doc(fr.points[rank.median]),
            "worst": _point_doc(fr.points[rank.worst]),
        }
        if fr.outside_nadir():
            warnings.append(f"{name}: rows {fr.outside_nadir()} do not dominate the nadir")
        if problem is not None:
            msg = coefficient_check(problem, fr)
            if msg:
                warnings.append(msg)

    pairs = {}
    for a in names:
        for b in names:
            if a == b:
                continue
            pairs[f"{a}_vs_{b}"] = {
                "best_point_pct": metrics.pct_difference(best_points[a].point_hvi, best_points[b].point_hvi),
                "set_hvi_pct": metrics.pct_difference(per[a]["set_hvi"], per[b]["set_hvi"]),
            }

    top = max(names, key=lambda n: (best_points[n].point_hvi, n))
    reference = best_points[top].F
    ranges = metrics.union_ranges(*(fr.objectives for fr in frontiers.values()))
    for name, fr in frontiers.items():
        try:
            per[name]["convergence"] = metrics.convergence_metric(fr.objectives, reference, ranges)
        except ValueError as exc:
            per[name]["convergence"] = None
            warnings.append(f"{name}: convergence not computed ({exc})")
    return {
        "nadir": list(nadir),
        "frontiers": per,
        "pairwise": pairs,
        "convergence_reference": {"frontier": top, "f": reference},
        "ranges": ranges,
        "warnings": warnings,
    }


def emit_plot_data(frontiers: dict[str, FrontierSet], report: dict, directory) -> list[Path]:
    """Plain CSV files for the scatter plots and the two bar charts."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, fr in frontiers.items():
        path = directory / f"scatter_{name}.csv"
        lines = ["f1,f2,f3"] + [",".join(repr(float(v)) for v in p.F) for p in fr.points]
        path.write_text("\n".join(lines) + "\n", "utf-8")
        written.append(path)
    for fname, key in (("set_hvi.csv", "set_hvi"), ("convergence.csv", "convergence")):
        path = directory / fname
        lines = [f"label,{key}"]
        for name in frontiers:
            value = report["frontiers"][name].get(key)
            lines.append(f"{name},{'' if value is None else repr(float(value))}")
        path.write_text("\n".join(lines) + "\n", "utf-8")
        written.append(path)
    return written
