"""Trajectory pairs of the switched system under admissible switching.

States are renormalized every step; the discarded scale is accumulated in
``log_scale`` so the raw trajectory is ``exp(log_scale[k]) * x[k]``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from . import cone as cn
from .automaton import Automaton, random_walk
from .cone import DEFAULT_TOL, PolyhedralCone
from .errors import NotInCone
from .hilbert import distance
from .verify import CyclePF, SwitchedSystem

CSV_COLUMNS = ["pair", "step", "symbol", "state", "hilbert_d", "normalized_gap", "log_scale"]


@dataclass
class TrajectoryPair:
    x: np.ndarray  # (steps + 1, n) unit states
    y: np.ndarray
    states: list  # automaton state q(k), length steps + 1
    symbols: list  # sigma(k) applied at step k, length steps
    hilbert_d: Optional[np.ndarray]  # None when no cones were supplied
    normalized_gap: np.ndarray
    log_scale_x: np.ndarray
    log_scale_y: np.ndarray

    @property
    def steps(self) -> int:
        return len(self.symbols)

    def rows(self, pair: int = 0):
        for k in range(self.steps + 1):
            yield [
                pair,
                k,
                self.symbols[k] if k < self.steps else "",
                self.states[k],
                "" if self.hilbert_d is None else repr(float(self.hilbert_d[k])),
                repr(float(self.normalized_gap[k])),
                repr(float(self.log_scale_x[k])),
            ]


def traces_csv(pairs) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for i, tp in enumerate(pairs):
        w.writerows(tp.rows(i))
    return buf.getvalue()


def simulate_pair(
    sys: SwitchedSystem,
    a: Automaton,
    cones: Optional[Mapping[str, PolyhedralCone]],
    x0,
    y0,
    steps: int,
    seed: Optional[int] = None,
    start: Optional[str] = None,
    rng: Optional[np.random.Generator] = None,
    tol: float = DEFAULT_TOL,
) -> TrajectoryPair:
    """Run ``x`` and ``y`` through one random admissible switching sequence.

    ``hilbert_d[k]`` is measured in the cone of ``q(k)``.
    """
    states, symbols = random_walk(a, steps, seed=seed, start=start, rng=rng)
    x = np.asarray(x0, dtype=float)
    y = np.asarray(y0, dtype=float)
    if cones is not None:
        K0 = cones[states[0]]
        if not (cn.contains(K0, x, tol) and cn.contains(K0, y, tol)):
            raise NotInCone(f"initial points are not in the cone of state {states[0]!r}")
    n = x.shape[0]
    X = np.empty((steps + 1, n))
    Y = np.empty((steps + 1, n))
    lx = np.zeros(steps + 1)
    ly = np.zeros(steps + 1)
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise NotInCone("initial points must be nonzero")
    X[0], Y[0], lx[0], ly[0] = x / nx, y / ny, math.log(nx), math.log(ny)
    for k, s in enumerate(symbols):
        A = sys[s]
        u, v = A @ X[k], A @ Y[k]
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        X[k + 1], Y[k + 1] = u / nu, v / nv
        lx[k + 1], ly[k + 1] = lx[k] + math.log(nu), ly[k] + math.log(nv)
    gap = np.linalg.norm(X - Y, axis=1)
    hd = None
    if cones is not None:
        hd = np.array([_safe_distance(cones[q], X[k], Y[k], tol) for k, q in enumerate(states)])
    return TrajectoryPair(X, Y, states, symbols, hd, gap, lx, ly)


def _safe_distance(K, x, y, tol):
    # trajectories of systems that are not path positive can leave the cones
    try:
        return distance(K, x, y, tol)
    except NotInCone:
        return math.nan


def cycle_attractor_check(sys: SwitchedSystem, cycle: CyclePF, x0, periods: int) -> float:
    """Largest angle between the trajectory and the cycle's rays.

    ``x0`` is driven through the cycle ``periods`` times; the angles are then
    recorded at every phase of one further traversal (at the start only,
    when ``periods`` is 0).
    """
    if cycle.eigenvalue is None:
        raise ValueError(f"cycle {cycle.labels} has no dominant eigenpair: {cycle.error}")
    mats = [sys[s] for s in cycle.labels]
    x = np.asarray(x0, dtype=float)
    x = x / np.linalg.norm(x)
    for _ in range(periods):
        for M in mats:
            x = M @ x
            x /= np.linalg.norm(x)
    if periods == 0:
        return cn.angle(x, cycle.rays[0])
    worst = 0.0
    for k, M in enumerate(mats):
        worst = max(worst, cn.angle(x, cycle.rays[k]))
        x = M @ x
        x /= np.linalg.norm(x)
    return worst
