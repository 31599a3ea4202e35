"""Pareto-quality measures: dominance, hypervolume, convergence, rankings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

STRICT = "strict"
WEAK = "weak"
INDIFFERENT = "indifferent"
DOMINATED_STRICT = "dominated_strict"
DOMINATED_WEAK = "dominated_weak"

DEFAULT_NADIR = (0.0, 0.0, 0.0)


class NadirError(ValueError):
    """A point fails to dominate the reference (nadir) point."""


def _oriented(F, sense: str) -> np.ndarray:
    F = np.asarray(F, dtype=float)
    if sense == "maximize":
        return F
    if sense == "minimize":
        return -F
    raise ValueError(f"unknown sense {sense!r}")


def dominance(a, b, sense: str = "maximize") -> str:
    """Relation of ``a`` to ``b``.

    ``strict`` means better in every objective, ``weak`` better in some and
    worse in none. The ``dominated_*`` labels describe ``b`` dominating ``a``.
    Equal vectors are indifferent.
    """
    a, b = _oriented(a, sense), _oriented(b, sense)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    better, worse = a > b, a < b
    if better.all():
        return STRICT
    if worse.all():
        return DOMINATED_STRICT
    if better.any() and not worse.any():
        return WEAK
    if worse.any() and not better.any():
        return DOMINATED_WEAK
    return INDIFFERENT


def dominates(a, b, sense: str = "maximize") -> bool:
    """True when ``a`` strictly or weakly dominates ``b``."""
    return dominance(a, b, sense) in (STRICT, WEAK)


def non_dominated(points, sense: str = "maximize") -> np.ndarray:
    """Indices of the points no other point dominates (duplicates keep the first)."""
    P = _oriented(np.atleast_2d(points), sense)
    keep = []
    for i, p in enumerate(P):
        ge = np.all(P >= p, axis=1)
        gt = np.any(P > p, axis=1)
        if np.any(ge & gt):
            continue
        if any(np.array_equal(P[j], p) for j in keep):
            continue
        keep.append(i)
    return np.array(keep, dtype=int)


def _gaps(F, nadir, sense: str) -> np.ndarray:
    """``F - r`` in maximisation orientation, checked to be positive."""
    F = np.atleast_2d(_oriented(F, sense))
    r = _oriented(nadir, sense)
    if F.shape[1] != r.size:
        raise ValueError(f"points have {F.shape[1]} objectives, nadir has {r.size}")
    gaps = F - r
    bad = np.argwhere(~(gaps > 0))
    if bad.size:
        i, k = (int(v) for v in bad[0])
        raise NadirError(f"point {i} does not dominate the nadir in objective {k + 1} "
                         f"({float(F[i, k])!r} vs {float(r[k])!r})")
    return gaps


def hvi_point(F, nadir=DEFAULT_NADIR, sense: str = "maximize") -> float:
    """Volume of the box between ``nadir`` and ``F``.

    >>> round(hvi_point((6.13334, 81.1329, 11.9987)), 3)
    5970.741
    """
    F, r = _oriented(F, sense).reshape(-1), _oriented(nadir, sense)
    if F.size != r.size:
        raise ValueError(f"point has {F.size} objectives, nadir has {r.size}")
    gaps = F - r
    for k, g in enumerate(gaps):
        if not g > 0:
            raise NadirError(f"objective {k + 1} does not dominate the nadir ({float(F[k])!r} vs {float(r[k])!r})")
    return float(np.prod(gaps))


def _hv_positive(P: np.ndarray) -> float:
    """Exact union volume of boxes ``[0, p]`` for rows of ``P`` (all positive)."""
    n, d = P.shape
    if n == 0:
        return 0.0
    if d == 1:
        return float(P.max())
    if d == 2:
        order = np.argsort(-P[:, 0], kind="stable")
        area, top = 0.0, 0.0
        for x, y in P[order]:
            if y > top:
                area += x * (y - top)
                top = y
        return area
    # Slice along the last axis: between consecutive heights the cross-section
    # is the (d-1)-dimensional union of every point at least that tall.
    order = np.argsort(-P[:, -1], kind="stable")
    P = P[order]
    heights = P[:, -1]
    volume = 0.0
    for i in range(n):
        below = heights[i + 1] if i + 1 < n else 0.0
        thickness = heights[i] - below
        if thickness > 0:
            volume += _hv_positive(P[: i + 1, :-1]) * thickness
    return volume


def hvi_set(points, nadir=DEFAULT_NADIR, sense: str = "maximize") -> float:
    """Exact hypervolume of the union of boxes ``[nadir, F_i]``."""
    F = np.atleast_2d(np.asarray(points, dtype=float))
    if F.size == 0:
        raise ValueError("hypervolume of an empty set")
    gaps = _gaps(F, nadir, sense)
    return _hv_positive(gaps[non_dominated(gaps)])


def union_ranges(*sets) -> np.ndarray:
    """Per-objective ``(min, max)`` over the union of the given point sets."""
    F = np.vstack([np.atleast_2d(np.asarray(s, dtype=float)) for s in sets])
    return np.column_stack([F.min(axis=0), F.max(axis=0)])


def convergence_metric(points, reference, ranges) -> float:
    """Mean over ``points`` of the range-normalised distance to the nearest reference point."""
    S = np.atleast_2d(np.asarray(points, dtype=float))
    R = np.atleast_2d(np.asarray(reference, dtype=float))
    ranges = np.asarray(ranges, dtype=float)
    if S.size == 0 or R.size == 0:
        raise ValueError("convergence metric needs non-empty point and reference sets")
    if ranges.shape != (S.shape[1], 2) or R.shape[1] != S.shape[1]:
        raise ValueError("points, reference and ranges disagree on the objective count")
    width = ranges[:, 1] - ranges[:, 0]
    bad = np.flatnonzero(~(width > 0))
    if bad.size:
        k = int(bad[0])
        raise ValueError(f"degenerate range for objective {k + 1}: [{ranges[k, 0]}, {ranges[k, 1]}]")
    diff = (S[:, None, :] - R[None, :, :]) / width
    d = np.sqrt((diff ** 2).sum(axis=-1)).min(axis=1)
    return float(d.mean())


def pct_difference(hvi_a: float, hvi_b: float) -> float:
    """``|a - b| / b * 100``.

    >>> round(pct_difference(23357.05, 23041.98), 3)
    1.367
    """
    if hvi_b == 0:
        raise ZeroDivisionError("percent difference against a zero reference")
    return abs(hvi_a - hvi_b) / hvi_b * 100.0


@dataclass
class ParetoPoint:
    beta: tuple[float, ...]
    x: np.ndarray
    F: np.ndarray
    iterations: Optional[int] = None
    point_hvi: float = math.nan

    def __post_init__(self):
        self.beta = tuple(float(b) for b in self.beta) if self.beta is not None else ()
        self.x = np.asarray(self.x, dtype=float)
        self.F = np.asarray(self.F, dtype=float)


@dataclass
class FrontierSet:
    points: list[ParetoPoint]
    algorithm: str = ""
    nadir: tuple[float, ...] = DEFAULT_NADIR
    sense: str = "maximize"

    def __post_init__(self):
        self.nadir = tuple(float(v) for v in self.nadir)
        for p in self.points:
            if math.isnan(p.point_hvi):
                p.point_hvi = self.box_volume(p.F)

    def box_volume(self, F) -> float:
        """Point HVI, or 0 when ``F`` fails to dominate the nadir."""
        try:
            return hvi_point(F, self.nadir, self.sense)
        except NadirError:
            return 0.0

    def __len__(self):
        return len(self.points)

    @property
    def objectives(self) -> np.ndarray:
        return np.array([p.F for p in self.points], dtype=float)

    @property
    def decisions(self) -> np.ndarray:
        return np.array([p.x for p in self.points], dtype=float)

    def outside_nadir(self) -> list[int]:
        """Indices of points that do not strictly dominate the nadir."""
        r = _oriented(self.nadir, self.sense)
        return [i for i, p in enumerate(self.points) if not np.all(_oriented(p.F, self.sense) > r)]

    def set_hvi(self) -> float:
        """Union hypervolume of the points that dominate the nadir."""
        bad = set(self.outside_nadir())
        kept = [p.F for i, p in enumerate(self.points) if i not in bad]
        if not kept:
            return 0.0
        return hvi_set(kept, self.nadir, self.sense)


@dataclass
class Ranking:
    order: list[int]
    best: int
    median: int
    worst: int


def rank_solutions(frontier: FrontierSet | Sequence[ParetoPoint]) -> Ranking:
    """Sort by point HVI (descending), ties by beta; median is the lower middle."""
    points = frontier.points if isinstance(frontier, FrontierSet) else list(frontier)
    if not points:
        raise ValueError("cannot rank an empty frontier")
    order = sorted(range(len(points)), key=lambda i: (-points[i].point_hvi, points[i].beta, i))
    return Ranking(order, order[0], order[(len(order) - 1) // 2], order[-1])


@dataclass
class MetricReport:
    algorithm: str
    set_hvi: float
    ranking: Ranking
    convergence: Optional[float] = None
    pct_differences: dict = field(default_factory=dict)


def metric_report(frontier: FrontierSet, reference: Iterable | None = None,
                  ranges=None) -> MetricReport:
    conv = None
    if reference is not None:
        F = frontier.objectives
        conv = convergence_metric(F, reference, ranges if ranges is not None else union_ranges(F))
    return MetricReport(frontier.algorithm, frontier.set_hvi(), rank_solutions(frontier), conv)
