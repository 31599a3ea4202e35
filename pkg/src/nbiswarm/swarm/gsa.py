"""Gravitational search algorithm (maximisation).

Distances are Euclidean between agents and velocities follow
``v <- rand * v + a``. By default an agent whose gravitational mass is zero
(the worst one) takes the finite limit of ``F/M`` and keeps falling toward the
others; ``massless="freeze"`` leaves it without acceleration instead.
"""

from __future__ import annotations

import math
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


@dataclass
class GsaParams:
    g0: float = 100.0
    alpha: float = 20.0
    epsilon: float = 0.01
    n_agents: int = 6
    t_max: int = 200
    stall_tol: float = 1e-6
    stall_window: int = 10
    stall_warmup: int = 10
    max_evaluations: Optional[int] = None
    # How the zero-mass (worst) agent moves: "fall" takes the M -> 0 limit of
    # F/M, "freeze" gives it no acceleration at all.
    massless: str = "fall"

    def __post_init__(self):
        if self.massless not in ("fall", "freeze"):
            raise ValueError("massless must be 'fall' or 'freeze'")
        if not self.g0 > 0:
            raise ValueError("g0 must be > 0")
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if self.n_agents < 2:
            raise ValueError("n_agents must be >= 2")
        check_stall_params(self.stall_tol, self.stall_window, self.stall_warmup, self.t_max)


@dataclass
class GsaRun:
    positions: np.ndarray
    velocities: np.ndarray
    fitness: np.ndarray
    normalized_mass: np.ndarray
    masses: np.ndarray
    G: float
    best_position: np.ndarray
    best_fitness: float
    lower: np.ndarray
    upper: np.ndarray
    rng: np.random.Generator
    rng_seed: int
    iteration: int = 0
    evaluations: int = 0
    fitness_trace: list = field(default_factory=list)


def fitness_to_masses(fitnesses) -> tuple[np.ndarray, np.ndarray]:
    """Inertial (``m'``) and gravitational (``M``) masses for a maximisation problem.

    The best agent gets ``m' = 1`` and the worst ``m' = 0``; ``M`` normalises
    ``m'`` to sum to one. When every fitness is equal all agents get
    ``m' = 1`` and ``M = 1/N``.

    >>> fitness_to_masses([0.0, 5.0, 10.0])[1].round(4).tolist()
    [0.0, 0.3333, 0.6667]
    """
    m = np.asarray(fitnesses, dtype=float)
    if m.size < 2:
        raise ValueError("need at least two agents")
    finite = np.isfinite(m)
    if not finite.all():
        floor = m[finite].min() if finite.any() else 0.0
        m = np.where(finite, m, floor)
    best, worst = m.max(), m.min()
    if best == worst:
        return np.ones_like(m), np.full_like(m, 1.0 / m.size)
    m_prime = (m - worst) / (best - worst)
    return m_prime, m_prime / m_prime.sum()


def gravitational_constant(g_prev: float, t: int, alpha: float, t_max: int) -> float:
    """``G(t+1) = G(t) * exp(-alpha * t / t_max)``."""
    return g_prev * math.exp(-alpha * t / t_max)


def pairwise_forces(positions: np.ndarray, masses: np.ndarray, G: float, epsilon: float,
                    own_mass: np.ndarray | None = None) -> np.ndarray:
    """``F[i, j, d]``: force on agent ``i`` from agent ``j`` along dimension ``d``.

    ``own_mass`` replaces the passive mass of agent ``i`` (defaults to ``masses``).
    """
    diff = positions[None, :, :] - positions[:, None, :]  # x_j - x_i
    R = np.sqrt((diff ** 2).sum(axis=-1))
    passive = masses if own_mass is None else own_mass
    scale = G * np.outer(passive, masses) / (R + epsilon)
    np.fill_diagonal(scale, 0.0)
    return scale[:, :, None] * diff


def total_force(positions: np.ndarray, masses: np.ndarray, G: float, epsilon: float,
                weights: np.ndarray, own_mass: np.ndarray | None = None) -> np.ndarray:
    """Randomly weighted sum over ``j != i`` of the pairwise forces.

    ``weights[i, j]`` is the uniform weight applied to the pull of ``j`` on ``i``.
    """
    F = pairwise_forces(positions, masses, G, epsilon, own_mass)
    return np.einsum("ij,ijd->id", weights, F)


def init_gsa(params: GsaParams, bounds, seed: int, fitness: Fitness) -> GsaRun:
    lower, upper = as_bounds(bounds)
    rng, _ = streams(seed)
    n, d = params.n_agents, lower.size
    positions = lower + rng.random((n, d)) * (upper - lower)
    values = evaluate(fitness, positions)
    m_prime, masses = fitness_to_masses(values)
    finite = np.isfinite(values)
    best = int(np.argmax(np.where(finite, values, -np.inf)))
    run = GsaRun(
        positions=positions,
        velocities=np.zeros((n, d)),
        fitness=values,
        normalized_mass=m_prime,
        masses=masses,
        G=float(params.g0),
        best_position=positions[best].copy(),
        best_fitness=float(values[best]) if finite[best] else -np.inf,
        lower=lower,
        upper=upper,
        rng=rng,
        rng_seed=seed,
        evaluations=n,
    )
    run.fitness_trace.append(run.best_fitness)
    return run


def gsa_step(run: GsaRun, params: GsaParams, fitness: Fitness, rng=None, draws=None) -> GsaRun:
    """One GSA iteration.

    ``draws`` may script the randomness as ``{"force": (n, n), "velocity": (n,)}``.
    """
    rng = run.rng if rng is None else rng
    n = run.positions.shape[0]
    if draws is None:
        force_w = rng.random((n, n))
        vel_w = rng.random(n)
    else:
        force_w = np.asarray(draws["force"], dtype=float).reshape(n, n)
        vel_w = np.asarray(draws["velocity"], dtype=float).reshape(n)

    m_prime, masses = fitness_to_masses(run.fitness)
    run.normalized_mass, run.masses = m_prime, masses
    force = total_force(run.positions, masses, run.G, params.epsilon, force_w)
    accel = np.zeros_like(force)
    has_mass = masses > 0
    accel[has_mass] = force[has_mass] / masses[has_mass, None]
    if params.massless == "fall" and not has_mass.all():
        # a = F/M with M -> 0: the agent's own mass cancels, so it still falls.
        unit = total_force(run.positions, masses, run.G, params.epsilon, force_w,
                           own_mass=np.ones_like(masses))
        accel[~has_mass] = unit[~has_mass]

    old_x, old_v = run.positions, run.velocities
    v = vel_w[:, None] * old_v + accel
    x, v = clamp_moving(old_x + v, v, run.lower, run.upper)
    values = evaluate(fitness, x)
    run.evaluations += n

    finite = np.isfinite(values)
    if not finite.all():
        frozen = ~finite
        logger.warning("non-finite fitness for agents %s at iteration %d; agents frozen",
                       np.flatnonzero(frozen).tolist(), run.iteration)
        x[frozen] = old_x[frozen]
        v[frozen] = old_v[frozen]
        values[frozen] = run.fitness[frozen]
    run.positions, run.velocities, run.fitness = x, v, values

    best = int(np.argmax(values))
    if values[best] > run.best_fitness:
        run.best_fitness = float(values[best])
        run.best_position = x[best].copy()
    run.G = gravitational_constant(run.G, run.iteration, params.alpha, params.t_max)
    run.iteration += 1
    run.fitness_trace.append(run.best_fitness)
    return run


def run_gsa(fitness: Fitness, params: GsaParams, bounds, seed: int) -> SolverResult:
    run = init_gsa(params, bounds, seed, fitness)
    n = params.n_agents
    reason = "t_max"
    while run.iteration < params.t_max:
        if params.max_evaluations is not None and run.evaluations + n > params.max_evaluations:
            reason = "budget"
            break
        gsa_step(run, params, fitness)
        if stalled(run.fitness_trace, params.stall_tol, params.stall_window, params.stall_warmup):
            reason = "stall"
            break
    return SolverResult(
        best_position=run.best_position.copy(),
        best_fitness=run.best_fitness,
        iterations=run.iteration,
        evaluations=run.evaluations,
        fitness_trace=list(run.fitness_trace),
        stop_reason=reason,
        extras={"G": run.G},
    )
