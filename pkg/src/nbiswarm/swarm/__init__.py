"""Swarm solvers. All of them maximise a batched fitness over a box."""

from dataclasses import fields

from ._common import SolverResult
from .gsa import GsaParams, run_gsa
from .hopso import HopsoParams, run_hopso
from .pso import PsoParams, run_pso

ALGORITHMS = {
    "pso": (PsoParams, run_pso),
    "gsa": (GsaParams, run_gsa),
    "hopso": (HopsoParams, run_hopso),
}

# Alternate spellings accepted in parameter documents.
_ALIASES = {
    "G0": "g0",
    "G_o": "g0",
    "number_of_particles": "swarm_size",
    "n_particles": "swarm_size",
    "number_of_mass_agents": "n_agents",
}


def make_params(algorithm: str, overrides: dict | None = None):
    """Default parameters for ``algorithm`` updated with ``overrides``."""
    if algorithm not in ALGORITHMS:
        raise KeyError(f"unknown algorithm {algorithm!r}; valid: {', '.join(ALGORITHMS)}")
    cls = ALGORITHMS[algorithm][0]
    known = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in (overrides or {}).items():
        key = _ALIASES.get(key, key)
        if key not in known:
            raise KeyError(f"unknown {algorithm} parameter {key!r}")
        if isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    return cls(**kwargs)


def params_dict(params) -> dict:
    return {f.name: getattr(params, f.name) for f in fields(params)}


def get_solver(algorithm: str, params=None):
    """Bound solver ``solve(fitness, bounds, seed) -> SolverResult``."""
    if algorithm not in ALGORITHMS:
        raise KeyError(f"unknown algorithm {algorithm!r}; valid: {', '.join(ALGORITHMS)}")
    cls, run = ALGORITHMS[algorithm]
    params = cls() if params is None else params

    def solve(fitness, bounds, seed):
        return run(fitness, params, bounds, seed)

    solve.algorithm = algorithm
    solve.params = params
    return solve


__all__ = [
    "ALGORITHMS",
    "GsaParams",
    "HopsoParams",
    "PsoParams",
    "SolverResult",
    "get_solver",
    "make_params",
    "params_dict",
    "run_gsa",
    "run_hopso",
    "run_pso",
]
