"""Positivity and path-complete positivity certificates.

A transition ``i --s--> j`` is checked by testing ``A_s K_i`` against ``K_j``
and, when the inclusion is strict, measuring the Hilbert diameter of the
image to obtain the Birkhoff ratio ``tanh(D/4)``.
"""
from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from . import cone as cn
from .automaton import Automaton, simple_cycles
from .cone import DEFAULT_STRICT_EPS, DEFAULT_TOL, Inclusion, PolyhedralCone, Witness
from .errors import (
    InconsistentDimensions,
    MissingCone,
    NoConvergence,
    NoStrictDominance,
    NotPointed,
)
from .hilbert import INF, contraction_ratio, projective_diameter
from .linalg import as_square, dominant_eigenpair, matrix_product, unit


@dataclass(frozen=True)
class SwitchedSystem:
    matrices: dict  # symbol -> (n, n) array

    def __post_init__(self):
        mats = {str(k): as_square(v) for k, v in self.matrices.items()}
        if not mats:
            raise InconsistentDimensions("system has no matrices")
        dims = {M.shape[0] for M in mats.values()}
        if len(dims) != 1:
            raise InconsistentDimensions(f"matrices have different sizes: {sorted(dims)}")
        object.__setattr__(self, "matrices", mats)

    @property
    def dim(self) -> int:
        return next(iter(self.matrices.values())).shape[0]

    @property
    def symbols(self) -> list:
        return list(self.matrices)

    def __getitem__(self, symbol) -> np.ndarray:
        return self.matrices[str(symbol)]


class Verdict(str, enum.Enum):
    NOT_PATH_POSITIVE = "NotPathPositive"
    PATH_POSITIVE = "PathPositive"
    STRICTLY_PATH_POSITIVE = "StrictlyPathPositive"


@dataclass(frozen=True)
class TransitionCheck:
    inclusion: Inclusion
    diameter: Optional[float]  # None when the inclusion fails
    gamma: float
    witness: Optional[Witness] = None


@dataclass(frozen=True)
class TransitionRecord:
    src: str
    symbol: str
    dst: str
    check: TransitionCheck

    def to_dict(self) -> dict:
        c = self.check
        out = {
            "from": self.src,
            "sym": self.symbol,
            "to": self.dst,
            "inclusion": c.inclusion.value,
            "diameter": _json_float(c.diameter),
            "gamma": c.gamma,
        }
        if c.witness is not None:
            out["witness"] = c.witness.to_dict()
        return out


def _json_float(x):
    if x is None:
        return None
    return "inf" if x == INF else x


@dataclass(frozen=True)
class PositivityCertificate:
    transitions: list
    global_gamma: float
    verdict: Verdict
    cones: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "global_gamma": self.global_gamma,
            "transitions": [t.to_dict() for t in self.transitions],
            "cones": {q: {"generators": K.generators.tolist()} for q, K in self.cones.items()},
        }


def check_transition(
    A,
    K_src: PolyhedralCone,
    K_dst: PolyhedralCone,
    tol: float = DEFAULT_TOL,
    eps_strict: float = DEFAULT_STRICT_EPS,
) -> TransitionCheck:
    A = as_square(A)
    if A.shape[0] != K_src.dim or K_src.dim != K_dst.dim:
        raise InconsistentDimensions(
            f"matrix {A.shape} does not match cones of dimension {K_src.dim}/{K_dst.dim}"
        )
    try:
        img = cn.image(K_src, A, tol)
    except NotPointed:
        # an image containing a line cannot sit in a pointed cone
        return TransitionCheck(Inclusion.NO, None, 1.0, None)
    inc = cn.includes(K_dst, img, tol, eps_strict)
    if inc.verdict is Inclusion.NO:
        return TransitionCheck(Inclusion.NO, None, 1.0, inc.witness)
    if inc.verdict is Inclusion.NON_STRICT:
        return TransitionCheck(Inclusion.NON_STRICT, INF, 1.0)
    D = projective_diameter(A, K_src, K_dst, tol, eps_strict)
    return TransitionCheck(Inclusion.STRICT, D, contraction_ratio(D))


def check_positive(
    A,
    K: PolyhedralCone,
    tol: float = DEFAULT_TOL,
    eps_strict: float = DEFAULT_STRICT_EPS,
) -> TransitionCheck:
    """Single-cone check of ``A K ⊆ K`` / ``A K ⊆ int K``."""
    return check_transition(A, K, K, tol, eps_strict)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("CONEKIT_THREADS", "1")))
    except ValueError:
        return 1


def check_path_positive(
    sys: SwitchedSystem,
    a: Automaton,
    cones: Mapping[str, PolyhedralCone],
    tol: float = DEFAULT_TOL,
    eps_strict: float = DEFAULT_STRICT_EPS,
) -> PositivityCertificate:
    """Certificate for path-complete positivity of ``sys`` over ``a``."""
    missing_sym = [s for s in a.alphabet if s not in sys.matrices]
    if missing_sym:
        raise InconsistentDimensions(f"no matrix for symbols {missing_sym}")
    missing = [q for q in a.states if q not in cones]
    if missing:
        raise MissingCone(f"no cone assigned to states {missing}")
    for q in a.states:
        if cones[q].dim != sys.dim:
            raise InconsistentDimensions(f"cone of state {q} has dimension {cones[q].dim}")

    def run(t):
        i, s, j = t
        return TransitionRecord(i, s, j, check_transition(sys[s], cones[i], cones[j], tol, eps_strict))

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        records = list(pool.map(run, a.transitions))
    verdicts = [r.check.inclusion for r in records]
    if Inclusion.NO in verdicts:
        verdict = Verdict.NOT_PATH_POSITIVE
    elif all(v is Inclusion.STRICT for v in verdicts):
        verdict = Verdict.STRICTLY_PATH_POSITIVE
    else:
        verdict = Verdict.PATH_POSITIVE
    gamma = max((r.check.gamma for r in records), default=0.0)
    return PositivityCertificate(
        records, gamma, verdict, {q: cones[q] for q in a.states}
    )


@dataclass(frozen=True)
class CyclePF:
    """Perron-Frobenius data of the product along one automaton cycle.

    ``rays[k]`` is the normalized state at phase ``k``: ``rays[0]`` is the
    dominant eigenvector of the cycle product and ``rays[k+1]`` is
    proportional to ``A_{labels[k]} @ rays[k]``.
    """

    states: list
    labels: list
    eigenvalue: Optional[float]
    rays: list
    closure_error: Optional[float] = None  # angle between A_r..A_1 ray_0 and ray_0
    rotation_error: Optional[float] = None  # worst angle vs rotated-product eigenvectors
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "states": self.states,
            "labels": self.labels,
            "eigenvalue": self.eigenvalue,
            "rays": [list(map(float, r)) for r in self.rays],
            "closure_error": self.closure_error,
            "rotation_error": self.rotation_error,
            "error": self.error,
        }


def _orient(v: np.ndarray, K: Optional[PolyhedralCone]) -> np.ndarray:
    if K is not None:
        return v if (K.facets @ v).min() >= (K.facets @ -v).min() else -v
    return v


def cycle_pf(
    sys: SwitchedSystem,
    a: Automaton,
    max_len: int = 6,
    cones: Optional[Mapping[str, PolyhedralCone]] = None,
    tol: float = DEFAULT_TOL,
) -> list[CyclePF]:
    """Path-dependent dominant eigenpairs for every simple cycle of ``a``.

    Failures of strict dominance are reported per cycle in ``error``.
    """
    out = []
    for states, labels in simple_cycles(a, max_len):
        mats = [sys[s] for s in labels]
        try:
            split = dominant_eigenpair(matrix_product(mats), tol=tol)
        except (NoStrictDominance, NoConvergence) as exc:
            out.append(CyclePF(states, labels, None, [], error=str(exc)))
            continue
        ray = _orient(split.v, None if cones is None else cones.get(states[0]))
        rays = [ray]
        for M in mats[:-1]:
            rays.append(unit(M @ rays[-1]))
        closure = cn.angle(mats[-1] @ rays[-1], rays[0])
        rot_err = 0.0
        for k in range(1, len(labels)):
            rotated = mats[k:] + mats[:k]
            v_k = dominant_eigenpair(matrix_product(rotated), tol=tol).v
            rot_err = max(rot_err, min(cn.angle(v_k, rays[k]), cn.angle(-v_k, rays[k])))
        out.append(CyclePF(states, labels, split.lam, rays, closure, rot_err))
    return out
