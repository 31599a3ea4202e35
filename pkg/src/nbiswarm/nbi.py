"""Normal boundary intersection scalarisation.

Everything here works in canonical minimisation space: a maximised objective
``f`` enters as ``-f``. The payoff matrix ``phi`` holds in column ``i`` the
shifted image ``F(x_i*) - F*`` of the ``i``-th individual optimum, and each
sub-problem searches along the quasi-normal ``normalize(-phi @ e)`` from the
CHIM point ``phi @ beta``. The equality constraint is folded into the fitness
as an L2 penalty so that unconstrained swarms can maximise it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .problem import EvaluationError, MOProblem

DEFAULT_RHO = 1000.0
# Payoff spreads below this (relative to the utopia scale) are solver noise,
# matching the default relative stall tolerance of the swarm solvers.
DEGENERATE_TOL = 1e-6


class DegenerateFrontierError(ValueError):
    """The individual optima span no CHIM (all images coincide)."""


class GridConfigurationError(ValueError):
    pass


class AnchorError(RuntimeError):
    def __init__(self, objective: int, message: str):
        super().__init__(f"objective {objective}: {message}")
        self.objective = objective


@dataclass(frozen=True)
class BetaWeights:
    values: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if len(values) < 2:
            raise ValueError("need at least two weights")
        if any(not math.isfinite(v) or v < 0 for v in values):
            raise ValueError(f"weights must be finite and nonnegative, got {values}")
        if abs(sum(values) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {sum(values)!r}")
        object.__setattr__(self, "values", values)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.values)

    def label(self) -> str:
        return "(" + ", ".join(f"{v:g}" for v in self.values) + ")"


def beta_grid(step: float = 0.1, floor2: float = 0.2, floor1: float = 0.1, floor3: float = 0.1,
              first_floor2: float | None = None) -> list[BetaWeights]:
    """Three-weight simplex lattice, ordered by ``(beta1, beta2)``.

    ``first_floor2`` overrides ``floor2`` inside the block with the smallest
    ``beta1``. The defaults give the 28 reference weights;
    ``first_floor2=0.3`` drops ``(0.1, 0.2, 0.7)`` and leaves 27.
    """
    if not step > 0:
        raise GridConfigurationError("step must be > 0")
    n = round(1.0 / step)
    if n < 1 or abs(n * step - 1.0) > 1e-9:
        raise GridConfigurationError(f"step {step} does not divide 1")

    def units(floor):
        if floor < 0:
            raise GridConfigurationError("floors must be >= 0")
        return math.ceil(floor * n - 1e-9)

    lo1, lo2, lo3 = units(floor1), units(floor2), units(floor3)
    lo2_first = lo2 if first_floor2 is None else units(first_floor2)
    out = []
    for i in range(lo1, n + 1):
        min_j = lo2_first if i == lo1 else lo2
        for j in range(min_j, n + 1 - i):
            k = n - i - j
            if k < lo3:
                continue
            out.append(BetaWeights((i / n, j / n, k / n)))
    if not out:
        raise GridConfigurationError(
            f"no weights satisfy step={step}, floors=({floor1}, {floor2}, {floor3})")
    return out


def _to_min(problem: MOProblem, F: np.ndarray) -> np.ndarray:
    return -F if problem.sense == "maximize" else F


def _objective_fitness(problem: MOProblem, k: int) -> Callable[[np.ndarray], np.ndarray]:
    """Batched fitness (larger is better) for objective ``k`` alone."""
    f = problem.objectives[k]
    sign = 1.0 if problem.sense == "maximize" else -1.0

    def fitness(X):
        return sign * np.asarray(f(np.clip(X, problem.lower, problem.upper)), dtype=float)

    return fitness


def anchor_seed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence([seed, 10_000 + k]).generate_state(1)[0])


def individual_optima(problem: MOProblem, solver, seed: int) -> list[np.ndarray]:
    """Maximiser (minimiser for ``sense="minimize"``) of each objective alone.

    ``solver`` is any bound solver ``solve(fitness, bounds, seed)``.
    """
    optima = []
    for k in range(problem.n_objectives):
        result = solver(_objective_fitness(problem, k), (problem.lower, problem.upper),
                        anchor_seed(seed, k))
        x = np.asarray(result.best_position, dtype=float)
        if not (np.isfinite(result.best_fitness) and np.all(np.isfinite(x))):
            raise AnchorError(k, "solver returned no finite point")
        optima.append(problem.clamp(x))
    return optima


@dataclass(frozen=True)
class Anchors:
    """Individual optima and the quantities derived from them."""

    optima: tuple[np.ndarray, ...]
    images: np.ndarray  # row i: F(x_i*) in the problem's own sense
    utopia: np.ndarray  # F* in minimisation space
    phi: np.ndarray  # unscaled payoff matrix


def anchors_from_optima(problem: MOProblem, optima: Sequence) -> Anchors:
    X = np.array([problem.clamp(x) for x in optima], dtype=float)
    if X.shape != (problem.n_objectives, problem.dimension):
        raise ValueError(f"expected {problem.n_objectives} optima of length {problem.dimension}")
    images = problem.evaluate(X)
    F_min = _to_min(problem, images)
    utopia = F_min.min(axis=0)
    phi = (F_min - utopia).T
    return Anchors(tuple(X), images, utopia, phi)


@dataclass(frozen=True)
class NBISubproblem:
    problem: MOProblem
    phi: np.ndarray
    utopia: np.ndarray
    beta: BetaWeights
    normal: np.ndarray
    rho: float = DEFAULT_RHO
    scale: np.ndarray = field(default=None)
    t_max: float = 1.0

    @property
    def target(self) -> np.ndarray:
        """CHIM point ``phi @ beta``."""
        return self.phi @ self.beta.as_array()

    @property
    def search_lower(self) -> np.ndarray:
        return np.append(self.problem.lower, 0.0)

    @property
    def search_upper(self) -> np.ndarray:
        return np.append(self.problem.upper, self.t_max)

    def search_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.search_lower, self.search_upper

    def shifted(self, X) -> np.ndarray:
        """``F_min(x) - F*`` divided by the per-objective scale."""
        F_min = _to_min(self.problem, self.problem.evaluate(X))
        return (F_min - self.utopia) / self.scale

    def residual(self, Z) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        d = self.problem.dimension
        X = np.clip(Z[:, :d], self.problem.lower, self.problem.upper)
        t = Z[:, d]
        return self.target + t[:, None] * self.normal - self.shifted(X)

    def fitness(self, Z) -> np.ndarray:
        """Batched ``t - rho * ||phi beta + t n - F_bar(x)||`` over rows ``(x, t)``."""
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        t = Z[:, self.problem.dimension]
        return t - self.rho * np.linalg.norm(self.residual(Z), axis=1)

    __call__ = fitness

    def objectives_at(self, x) -> np.ndarray:
        """Objective vector in the problem's own sense (what reports show)."""
        return self.problem.evaluate(self.problem.clamp(x))


def build_subproblem(problem: MOProblem, optima, beta, rho: float = DEFAULT_RHO,
                     normalize: bool = False) -> NBISubproblem:
    """Sub-problem for weights ``beta`` given the individual optima.

    ``optima`` may be a sequence of decision vectors or a ready :class:`Anchors`.
    With ``normalize=True`` each objective is divided by its payoff range.
    """
    if not rho > 0:
        raise ValueError("rho must be > 0")
    anchors = optima if isinstance(optima, Anchors) else anchors_from_optima(problem, optima)
    beta = beta if isinstance(beta, BetaWeights) else BetaWeights(tuple(beta))
    m = problem.n_objectives
    if len(beta) != m:
        raise ValueError(f"{len(beta)} weights for {m} objectives")

    phi = anchors.phi
    scale = np.ones(m)
    if normalize:
        scale = phi.max(axis=1)
        if np.any(scale <= 0):
            raise DegenerateFrontierError(
                f"objective {int(np.argmin(scale))} has zero payoff range; cannot normalise")
        phi = phi / scale[:, None]

    direction = -phi @ np.ones(m)
    size = np.linalg.norm(direction)
    if not size > DEGENERATE_TOL * max(1.0, float(np.abs(anchors.utopia).max())):
        raise DegenerateFrontierError("individual optima coincide in objective space")
    t_max = 2.0 * float(np.abs(phi).max())
    return NBISubproblem(problem, phi, anchors.utopia, beta, direction / size,
                         float(rho), scale, t_max)


def subproblem_fitness(sub: NBISubproblem, point) -> float:
    """Fitness of one augmented point ``(x, t)``; ``point`` is ``(x, t)`` or a flat vector."""
    if isinstance(point, tuple) and len(point) == 2 and np.ndim(point[0]) == 1:
        x, t = point
        z = np.append(np.asarray(x, dtype=float), float(t))
    else:
        z = np.asarray(point, dtype=float)
    if not np.all(np.isfinite(z)):
        raise EvaluationError(f"non-finite component at index {int(np.argmin(np.isfinite(z)))}")
    return float(sub.fitness(z[None, :])[0])
