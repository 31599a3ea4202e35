"""Box-bounded multiobjective problems and the bundled Gardenia extraction model."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

# Coefficient order inside a quadratic model document.
TERMS = ("1", "x1", "x2", "x3", "x1^2", "x2^2", "x3^2", "x1*x2", "x2*x3", "x1*x3")
SENSES = ("maximize", "minimize")


class EvaluationError(ValueError):
    """Raised when an objective cannot be evaluated at a point."""


class ProblemDefinitionError(ValueError):
    """Raised when a problem document is malformed."""


@dataclass(frozen=True)
class QuadraticModel:
    """Full quadratic in three variables.

    ``coefficients`` follows :data:`TERMS`: constant, linear, squares, then the
    cross terms x1*x2, x2*x3, x1*x3.
    """

    coefficients: tuple[float, ...]

    def __post_init__(self):
        if len(self.coefficients) != len(TERMS):
            raise ValueError(f"expected {len(TERMS)} coefficients, got {len(self.coefficients)}")
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))

    @property
    def constant(self) -> float:
        return self.coefficients[0]

    @property
    def linear(self) -> tuple[float, float, float]:
        return self.coefficients[1:4]

    @property
    def square(self) -> tuple[float, float, float]:
        return self.coefficients[4:7]

    @property
    def cross(self) -> tuple[float, float, float]:
        return self.coefficients[7:10]

    def scaled(self, factor: float) -> "QuadraticModel":
        return QuadraticModel(tuple(factor * c for c in self.coefficients))

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        x1, x2, x3 = X[..., 0], X[..., 1], X[..., 2]
        c = self.coefficients
        return (
            c[0]
            + c[1] * x1 + c[2] * x2 + c[3] * x3
            + c[4] * x1 * x1 + c[5] * x2 * x2 + c[6] * x3 * x3
            + c[7] * x1 * x2 + c[8] * x2 * x3 + c[9] * x1 * x3
        )


Objective = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class MOProblem:
    """Vector objective over a closed box.

    Objectives are callables mapping an ``(..., dimension)`` array to ``(...)``.
    The bundled problems use :class:`QuadraticModel`, but any vectorised
    callable works, which is how the small test problems are built.
    """

    objectives: tuple[Objective, ...]
    lower: np.ndarray
    upper: np.ndarray
    sense: str = "maximize"
    name: str = "problem"
    objective_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        lower = np.array(self.lower, dtype=float).reshape(-1)
        upper = np.array(self.upper, dtype=float).reshape(-1)
        if lower.shape != upper.shape:
            raise ValueError("lower and upper bounds differ in length")
        if not np.all(lower < upper):
            bad = int(np.argmin(lower < upper))
            raise ValueError(f"degenerate bounds for variable {bad}: [{lower[bad]}, {upper[bad]}]")
        if self.sense not in SENSES:
            raise ValueError(f"unknown sense {self.sense!r}; expected one of {SENSES}")
        if len(self.objectives) < 1:
            raise ValueError("a problem needs at least one objective")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "objectives", tuple(self.objectives))

    @property
    def dimension(self) -> int:
        return self.lower.size

    @property
    def n_objectives(self) -> int:
        return len(self.objectives)

    @property
    def bounds(self) -> np.ndarray:
        """``(dimension, 2)`` array of closed intervals."""
        return np.column_stack([self.lower, self.upper])

    def evaluate(self, x: Sequence[float] | np.ndarray) -> np.ndarray:
        """Objective vector(s) at ``x``; accepts one point or a batch of rows."""
        X = np.asarray(x, dtype=float)
        if X.shape[-1] != self.dimension:
            raise EvaluationError(f"expected {self.dimension} components, got {X.shape[-1]}")
        finite = np.isfinite(X)
        if not finite.all():
            idx = np.argwhere(~finite)[0]
            raise EvaluationError(f"non-finite decision component at index {int(idx[-1])}")
        return np.stack([np.asarray(f(X), dtype=float) for f in self.objectives], axis=-1)

    def is_feasible(self, x) -> bool:
        X = np.asarray(x, dtype=float)
        return bool(np.all(np.isfinite(X)) and np.all((X >= self.lower) & (X <= self.upper)))

    def clamp(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)

    def with_objectives(self, objectives) -> "MOProblem":
        return MOProblem(tuple(objectives), self.lower, self.upper, self.sense, self.name,
                         self.objective_names)


def evaluate_objectives(problem: MOProblem, x) -> np.ndarray:
    return problem.evaluate(x)


def is_feasible(problem: MOProblem, x) -> bool:
    return problem.is_feasible(x)


def clamp_to_bounds(problem: MOProblem, x) -> np.ndarray:
    return problem.clamp(x)


def _require(doc: dict, key: str):
    if key not in doc:
        raise ProblemDefinitionError(f"missing key {key!r}")
    return doc[key]


def parse_problem(doc: dict) -> MOProblem:
    """Validate a problem document (already decoded) and build the problem."""
    if not isinstance(doc, dict):
        raise ProblemDefinitionError("problem document must be a mapping")
    dimension = _require(doc, "dimension")
    sense = _require(doc, "sense")
    bounds = _require(doc, "bounds")
    objectives = _require(doc, "objectives")

    if dimension != 3:
        raise ProblemDefinitionError(
            f"dimension: quadratic documents describe 3 variables, got {dimension!r}")
    if sense not in SENSES:
        raise ProblemDefinitionError(f"sense: unknown value {sense!r}; expected one of {SENSES}")
    if not isinstance(bounds, list) or len(bounds) != dimension:
        raise ProblemDefinitionError(f"bounds: expected {dimension} [lo, hi] pairs")
    for i, pair in enumerate(bounds):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ProblemDefinitionError(f"bounds[{i}]: expected a [lo, hi] pair")
        lo, hi = (float(v) for v in pair)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ProblemDefinitionError(f"bounds[{i}]: non-finite bound")
        if lo >= hi:
            raise ProblemDefinitionError(f"bounds[{i}]: degenerate interval [{lo}, {hi}] (lower >= upper)")
    if not isinstance(objectives, list) or len(objectives) < 2:
        raise ProblemDefinitionError("objectives: need at least two coefficient lists")

    models = []
    for k, coeffs in enumerate(objectives):
        if not isinstance(coeffs, list) or len(coeffs) != len(TERMS):
            n = len(coeffs) if isinstance(coeffs, list) else "non-list"
            raise ProblemDefinitionError(
                f"objectives[{k}]: expected {len(TERMS)} coefficients ({', '.join(TERMS)}), got {n}")
        try:
            values = tuple(float(c) for c in coeffs)
        except (TypeError, ValueError) as exc:
            raise ProblemDefinitionError(f"objectives[{k}]: non-numeric coefficient") from exc
        if not all(math.isfinite(v) for v in values):
            raise ProblemDefinitionError(f"objectives[{k}]: non-finite coefficient")
        models.append(QuadraticModel(values))

    names = tuple(doc.get("objective_names", ()))
    lower = [float(p[0]) for p in bounds]
    upper = [float(p[1]) for p in bounds]
    return MOProblem(tuple(models), lower, upper, sense, str(doc.get("name", "problem")), names)


def problem_document(problem: MOProblem) -> dict:
    """Inverse of :func:`parse_problem` for quadratic problems."""
    if not all(isinstance(f, QuadraticModel) for f in problem.objectives):
        raise TypeError("only quadratic problems serialise to a document")
    return {
        "name": problem.name,
        "dimension": problem.dimension,
        "sense": problem.sense,
        "objective_names": list(problem.objective_names),
        "bounds": [[float(lo), float(hi)] for lo, hi in problem.bounds],
        "objectives": [list(f.coefficients) for f in problem.objectives],
    }


def load_problem(source: str | Path | dict) -> MOProblem:
    """Load a problem from a bundled name (``"gardenia"``), a JSON path or a dict."""
    if isinstance(source, dict):
        return parse_problem(source)
    text_source = str(source)
    path = Path(text_source)
    if path.suffix != ".json" and not path.exists():
        try:
            text = resources.files("nbiswarm.data").joinpath(f"{text_source}.json").read_text("utf-8")
        except FileNotFoundError as exc:
            raise ProblemDefinitionError(f"no bundled problem named {text_source!r}") from exc
        where = f"bundled:{text_source}"
    else:
        try:
            text = path.read_text("utf-8")
        except OSError as exc:
            raise ProblemDefinitionError(f"{path}: {exc.strerror}") from exc
        where = str(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemDefinitionError(f"{where}: line {exc.lineno}: {exc.msg}") from exc
    try:
        return parse_problem(doc)
    except ProblemDefinitionError as exc:
        raise ProblemDefinitionError(f"{where}: {exc}") from exc


def gardenia() -> MOProblem:
    return load_problem("gardenia")
