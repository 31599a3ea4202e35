"""Canonical particle swarm optimiser (maximisation)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._common import (
    Fitness,
    SolverResult,
    as_bounds,
    check_stall_params,
    clamp_moving,
    evaluate,
    logger,
    stalled,
    streams,
)

# Default start-up multipliers, one per particle, applied on the first iterations.
TABLE1_SOCIAL = (1.1, 1.05, 1.033, 1.025, 1.02, 1.017)
TABLE1_PERSONAL = (3.0, 4.0, 5.0, 6.0, 7.0, 8.0)


@dataclass
class PsoParams:
    w: float = 0.8
    c1: float = 1.0
    c2: float = 1.2
    swarm_size: int = 6
    t_max: int = 500
    stall_tol: float = 1e-6
    stall_window: int = 10
    stall_warmup: int = 10
    # None switches the start-up multipliers off.
    social_influence: Optional[tuple[float, ...]] = TABLE1_SOCIAL
    personal_influence: Optional[tuple[float, ...]] = TABLE1_PERSONAL
    # Iteration by which the multipliers have decayed linearly to 1.
    influence_decay: int = 10
    # Fixed (r1, r2) instead of uniform draws.
    fixed_r: Optional[tuple[float, float]] = None
    max_evaluations: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.w <= 1.2:
            raise ValueError(f"w={self.w} outside [0, 1.2]")
        if not 0.0 <= self.c1 <= 2.0:
            raise ValueError(f"c1={self.c1} outside [0, 2]")
        if not 0.0 <= self.c2 <= 2.0:
            raise ValueError(f"c2={self.c2} outside [0, 2]")
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        check_stall_params(self.stall_tol, self.stall_window, self.stall_warmup, self.t_max)
        for name in ("social_influence", "personal_influence"):
            values = getattr(self, name)
            if values is None:
                continue
            values = tuple(float(v) for v in values)
            if len(values) != self.swarm_size:
                raise ValueError(f"{name} has {len(values)} entries for {self.swarm_size} particles")
            setattr(self, name, values)
        if self.fixed_r is not None:
            r1, r2 = (float(r) for r in self.fixed_r)
            if not (0.0 <= r1 <= 1.0 and 0.0 <= r2 <= 1.0):
                raise ValueError("fixed_r entries must lie in [0, 1]")
            self.fixed_r = (r1, r2)
        if self.influence_decay < 1:
            raise ValueError("influence_decay must be >= 1")


@dataclass
class PsoRun:
    positions: np.ndarray
    velocities: np.ndarray
    pbest_positions: np.ndarray
    pbest_fitness: np.ndarray
    gbest_position: np.ndarray
    gbest_fitness: float
    lower: np.ndarray
    upper: np.ndarray
    rng: np.random.Generator
    rng_seed: int
    iteration: int = 0
    evaluations: int = 0
    fitness_trace: list = field(default_factory=list)

    @property
    def vmax(self) -> np.ndarray:
        return 0.5 * (self.upper - self.lower)


def init_swarm(params: PsoParams, bounds, seed: int, fitness: Fitness | None = None,
               rng: np.random.Generator | None = None) -> PsoRun:
    """Uniform positions in the box, velocities uniform in +-half the box width.

    Without ``fitness`` the personal bests carry ``-inf`` until the first step.
    """
    lower, upper = as_bounds(bounds)
    if rng is None:
        rng, _ = streams(seed)
    n, d = params.swarm_size, lower.size
    half = 0.5 * (upper - lower)
    positions = lower + rng.random((n, d)) * (upper - lower)
    velocities = (2.0 * rng.random((n, d)) - 1.0) * half
    run = PsoRun(
        positions=positions,
        velocities=velocities,
        pbest_positions=positions.copy(),
        pbest_fitness=np.full(n, -np.inf),
        gbest_position=positions[0].copy(),
        gbest_fitness=-np.inf,
        lower=lower,
        upper=upper,
        rng=rng,
        rng_seed=seed,
    )
    if fitness is not None:
        commit(run, fitness)
        run.fitness_trace.append(run.gbest_fitness)
    return run


def influence(values: Optional[tuple[float, ...]], iteration: int, decay: int, n: int) -> np.ndarray:
    """Per-particle multiplier for the step whose 0-based index is ``iteration``."""
    if values is None:
        return np.ones(n)
    frac = min(iteration, decay - 1) / (decay - 1) if decay > 1 else 1.0
    base = np.asarray(values, dtype=float)
    return base + (1.0 - base) * frac


def draw_r(run: PsoRun, params: PsoParams, rng: np.random.Generator | None):
    n = run.positions.shape[0]
    if params.fixed_r is not None:
        return np.full(n, params.fixed_r[0]), np.full(n, params.fixed_r[1])
    rng = run.rng if rng is None else rng
    return rng.random(n), rng.random(n)


def move(run: PsoRun, params: PsoParams, rng=None, draws=None) -> None:
    """Velocity and position update for every particle, without evaluation."""
    n = run.positions.shape[0]
    r1, r2 = draws if draws is not None else draw_r(run, params, rng)
    r1 = np.asarray(r1, dtype=float).reshape(n, 1)
    r2 = np.asarray(r2, dtype=float).reshape(n, 1)
    p_mult = influence(params.personal_influence, run.iteration, params.influence_decay, n)[:, None]
    s_mult = influence(params.social_influence, run.iteration, params.influence_decay, n)[:, None]
    x = run.positions
    v = (params.w * run.velocities
         + params.c1 * r1 * p_mult * (run.pbest_positions - x)
         + params.c2 * r2 * s_mult * (run.gbest_position - x))
    vmax = run.vmax
    v = np.clip(v, -vmax, vmax)
    run.positions, run.velocities = clamp_moving(x + v, v, run.lower, run.upper)


def commit(run: PsoRun, fitness: Fitness) -> None:
    """Evaluate current positions and update personal and global bests."""
    values = evaluate(fitness, run.positions)
    run.evaluations += values.size
    finite = np.isfinite(values)
    if not finite.all():
        logger.warning("non-finite fitness for particles %s at iteration %d; update rejected",
                       np.flatnonzero(~finite).tolist(), run.iteration)
        run.positions = np.clip(run.positions, run.lower, run.upper)
    better = finite & (values > run.pbest_fitness)
    run.pbest_positions[better] = run.positions[better]
    run.pbest_fitness[better] = values[better]
    best = int(np.argmax(run.pbest_fitness))
    if run.pbest_fitness[best] > run.gbest_fitness:
        run.gbest_fitness = float(run.pbest_fitness[best])
        run.gbest_position = run.pbest_positions[best].copy()


def pso_step(run: PsoRun, params: PsoParams, fitness: Fitness, rng=None, draws=None) -> PsoRun:
    """One synchronous swarm update; ``draws`` scripts ``(r1, r2)`` per particle."""
    move(run, params, rng, draws)
    commit(run, fitness)
    run.iteration += 1
    run.fitness_trace.append(run.gbest_fitness)
    return run


def run_pso(fitness: Fitness, params: PsoParams, bounds, seed: int) -> SolverResult:
    run = init_swarm(params, bounds, seed, fitness)
    n = params.swarm_size
    reason = "t_max"
    while run.iteration < params.t_max:
        if params.max_evaluations is not None and run.evaluations + n > params.max_evaluations:
            reason = "budget"
            break
        pso_step(run, params, fitness)
        if stalled(run.fitness_trace, params.stall_tol, params.stall_window, params.stall_warmup):
            reason = "stall"
            break
    return SolverResult(
        best_position=run.gbest_position.copy(),
        best_fitness=run.gbest_fitness,
        iterations=run.iteration,
        evaluations=run.evaluations,
        fitness_trace=list(run.fitness_trace),
        stop_reason=reason,
    )
