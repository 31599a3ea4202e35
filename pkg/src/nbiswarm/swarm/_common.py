from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

logger = logging.getLogger("nbiswarm.swarm")

# Maps an (n, d) batch of search vectors to n fitness values; larger is better.
Fitness = Callable[[np.ndarray], np.ndarray]


@dataclass
class SolverResult:
    best_position: np.ndarray
    best_fitness: float
    iterations: int
    evaluations: int
    fitness_trace: list[float]
    stop_reason: str
    extras: dict = field(default_factory=dict)


def as_bounds(bounds) -> tuple[np.ndarray, np.ndarray]:
    """Accept ``(lower, upper)`` or a ``(d, 2)`` array; return float copies."""
    if isinstance(bounds, tuple) and len(bounds) == 2 and np.ndim(bounds[0]) == 1:
        lower, upper = bounds
    else:
        b = np.asarray(bounds, dtype=float)
        lower, upper = b[:, 0], b[:, 1]
    lower = np.array(lower, dtype=float)
    upper = np.array(upper, dtype=float)
    if not np.all(lower < upper):
        raise ValueError("search bounds must satisfy lower < upper in every dimension")
    return lower, upper


def streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Swarm stream and auxiliary stream for one seed.

    PSO and HoPSO both draw their particle randomness from the first stream,
    which keeps HoPSO with the Hopfield layer switched off identical to PSO.
    """
    main, aux = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(main), np.random.default_rng(aux)


def clamp_moving(x: np.ndarray, v: np.ndarray, lower, upper) -> tuple[np.ndarray, np.ndarray]:
    """Project positions into the box and zero velocity where clamped."""
    clipped = np.clip(x, lower, upper)
    v = np.where(clipped != x, 0.0, v)
    return clipped, v


def evaluate(fitness: Fitness, X: np.ndarray) -> np.ndarray:
    values = np.asarray(fitness(X), dtype=float).reshape(-1)
    if values.shape[0] != X.shape[0]:
        raise ValueError(f"fitness returned {values.shape[0]} values for {X.shape[0]} points")
    return values


def stalled(trace: list[float], stall_tol: float, stall_window: int, stall_warmup: int) -> bool:
    """True once the incumbent improved by less than ``stall_tol`` (relative) over the window.

    ``trace[0]`` is the incumbent after initialisation, so ``len(trace) - 1`` is
    the iteration count. Relative improvement is measured against
    ``max(1, |old|)`` so fitness values near zero do not inflate it.
    """
    iteration = len(trace) - 1
    if iteration < stall_warmup + stall_window:
        return False
    old, new = trace[-1 - stall_window], trace[-1]
    if math.isinf(old) and math.isinf(new):
        return old == new
    if not math.isfinite(old):
        return False
    return (new - old) <= stall_tol * max(1.0, abs(old))


def check_stall_params(stall_tol, stall_window, stall_warmup, t_max):
    if not stall_tol > 0:
        raise ValueError("stall_tol must be > 0")
    if stall_window < 1 or stall_warmup < 0:
        raise ValueError("stall_window must be >= 1 and stall_warmup >= 0")
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
