"""Hopfield-enhanced PSO.

Positions evolve by the ordinary PSO update. Each particle also carries a
binary spin driven by a symmetric random weight matrix, and a step that does
not lower the Hopfield energy of the spins re-randomises the weights.

What else the energy gate controls depends on ``gate_mode``. In ``"stop"``
mode every step is evaluated and only energy-descending steps may end the run
through the stall test. Spins never move particles, so in this mode the
trajectory equals PSO's for the same seed and only the stopping time differs. In ``"skip"`` mode a non-descending step is not
evaluated at all, so personal and global bests keep their old values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import pso
from ._common import Fitness, SolverResult, as_bounds, stalled, streams

NET_INPUT_MODES = ("normalized", "raw")
GATE_MODES = ("stop", "skip")


@dataclass
class HopsoParams(pso.PsoParams):
    U: float = 100.0
    theta: float = 0.02
    spin_mode: str = "normalized"
    # False lets every step through, which switches the energy gate off.
    gate: bool = True
    gate_mode: str = "stop"

    def __post_init__(self):
        super().__post_init__()
        if not self.U > 0:
            raise ValueError("U must be > 0")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")
        if self.spin_mode not in NET_INPUT_MODES:
            raise ValueError(f"spin_mode must be one of {NET_INPUT_MODES}")
        if self.gate_mode not in GATE_MODES:
            raise ValueError(f"gate_mode must be one of {GATE_MODES}")

    @classmethod
    def disabled(cls, **overrides) -> "HopsoParams":
        """Hopfield layer off: plain PSO dynamics."""
        return cls(**{"U": math.inf, "theta": 0.0, "gate": False, **overrides})


@dataclass
class HopsoRun(pso.PsoRun):
    weights: np.ndarray = None
    spins: np.ndarray = None
    net: np.ndarray = None
    hop_rng: np.random.Generator = None
    energy_trace: list = field(default_factory=list)
    committed: int = 0  # evaluated steps
    passed: int = 0  # steps the energy gate let through
    rerandomized: int = 0
    last_passed: bool = False
    # incumbent after initialisation and after each evaluated step
    committed_trace: list = field(default_factory=list)

    @property
    def energy_differences(self) -> list[float]:
        e = self.energy_trace
        return [e[n + 1] - e[n] for n in range(len(e) - 1)]


def init_weights(swarm_size: int, seed=None) -> np.ndarray:
    """Symmetric matrix, uniform [0, 1] off the diagonal, zero diagonal."""
    if swarm_size < 2:
        raise ValueError("swarm_size must be >= 2")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    upper = np.triu(rng.random((swarm_size, swarm_size)), k=1)
    return upper + upper.T


def reduce_state(positions, velocities, lower, upper, mode: str = "normalized"):
    """Scalar summaries ``(x_tilde, v_tilde)`` of each particle.

    In normalised mode every coordinate is mapped affinely from its bound
    interval onto [-1, 1] (velocities are scaled by the same factor) before
    summing over dimensions. Raw mode sums the coordinates as they are.
    """
    positions = np.asarray(positions, dtype=float)
    velocities = np.asarray(velocities, dtype=float)
    if mode == "raw":
        return positions.sum(axis=1), velocities.sum(axis=1)
    width = np.asarray(upper, dtype=float) - np.asarray(lower, dtype=float)
    x = 2.0 * (positions - lower) / width - 1.0
    v = 2.0 * velocities / width
    return x.sum(axis=1), v.sum(axis=1)


def net_input(weights: np.ndarray, x_tilde, v_tilde, j: int) -> float:
    """``sum_{i != j} w_ij * x_tilde_i + v_tilde_j``."""
    w = np.asarray(weights, dtype=float)[:, j].copy()
    w[j] = 0.0
    return float(w @ np.asarray(x_tilde, dtype=float) + v_tilde[j])


def net_inputs(weights: np.ndarray, x_tilde, v_tilde) -> np.ndarray:
    w = np.array(weights, dtype=float)
    np.fill_diagonal(w, 0.0)
    return w.T @ np.asarray(x_tilde, dtype=float) + np.asarray(v_tilde, dtype=float)


def spin_update(s_net, prev_spin, U: float):
    """+1 above ``U``, -1 below ``-U``, previous spin in between."""
    s = np.asarray(s_net, dtype=float)
    out = np.where(s > U, 1, np.where(s < -U, -1, prev_spin))
    return out.astype(int) if out.ndim else int(out)


def energy(spins_next, spins_prev, weights, theta: float) -> float:
    """``-1/2 sum_j sum_{i != j} s'_j s_i w_ij - theta * sum_i s_i``."""
    w = np.array(weights, dtype=float)
    np.fill_diagonal(w, 0.0)
    nxt = np.asarray(spins_next, dtype=float)
    prev = np.asarray(spins_prev, dtype=float)
    return float(-0.5 * (prev @ w @ nxt) - theta * prev.sum())


def init_hopso(params: HopsoParams, bounds, seed: int, fitness: Fitness | None = None) -> HopsoRun:
    lower, upper = as_bounds(bounds)
    rng, hop_rng = streams(seed)
    base = pso.init_swarm(params, (lower, upper), seed, fitness=None, rng=rng)
    run = HopsoRun(**{f: getattr(base, f) for f in base.__dataclass_fields__})
    run.hop_rng = hop_rng
    run.weights = init_weights(params.swarm_size, hop_rng)
    x_t, v_t = reduce_state(run.positions, run.velocities, lower, upper, params.spin_mode)
    run.net = net_inputs(run.weights, x_t, v_t)
    run.spins = np.where(run.net >= 0, 1, -1)
    if fitness is not None:
        pso.commit(run, fitness)
        run.fitness_trace.append(run.gbest_fitness)
        run.committed_trace.append(run.gbest_fitness)
    return run


def hopso_step(run: HopsoRun, params: HopsoParams, fitness: Fitness, rng=None, draws=None) -> HopsoRun:
    pso.move(run, params, rng, draws)
    x_t, v_t = reduce_state(run.positions, run.velocities, run.lower, run.upper, params.spin_mode)
    run.net = net_inputs(run.weights, x_t, v_t)
    spins_next = spin_update(run.net, run.spins, params.U)
    e = energy(spins_next, run.spins, run.weights, params.theta)
    first = not run.energy_trace
    descending = first or (e - run.energy_trace[-1]) < 0
    run.energy_trace.append(e)
    run.spins = spins_next
    passed = not params.gate or descending
    if passed or params.gate_mode == "stop":
        pso.commit(run, fitness)
        run.committed += 1
        run.committed_trace.append(run.gbest_fitness)
    if passed:
        run.passed += 1
    else:
        run.weights = init_weights(params.swarm_size, run.hop_rng)
        run.rerandomized += 1
    run.last_passed = passed
    run.iteration += 1
    run.fitness_trace.append(run.gbest_fitness)
    return run


def run_hopso(fitness: Fitness, params: HopsoParams, bounds, seed: int) -> SolverResult:
    run = init_hopso(params, bounds, seed, fitness)
    n = params.swarm_size
    reason = "t_max"
    while run.iteration < params.t_max:
        if params.max_evaluations is not None and run.evaluations + n > params.max_evaluations:
            reason = "budget"
            break
        hopso_step(run, params, fitness)
        # The stopping test is only reached through the energy gate.
        if run.last_passed and stalled(run.committed_trace, params.stall_tol,
                                       params.stall_window, params.stall_warmup):
            reason = "stall"
            break
    return SolverResult(
        best_position=run.gbest_position.copy(),
        best_fitness=run.gbest_fitness,
        iterations=run.iteration,
        evaluations=run.evaluations,
        fitness_trace=list(run.fitness_trace),
        stop_reason=reason,
        extras={
            "energy_trace": list(run.energy_trace),
            "committed": run.committed,
            "passed": run.passed,
            "rerandomized": run.rerandomized,
        },
    )
