"""Search for a common gamma-contracting cone by forward propagation and inflation.

Starting from the conic hull of (oriented) dominant eigenvectors, the inner
bound ``K_t`` is repeatedly replaced by the hull of itself and its images,
then pushed outward by points ``y' + (y' - x')/(rho - 1)`` which lie in every
gamma-contracting cone containing ``K_t``. The loop stops when ``K_t`` is
itself gamma-contracting, when ``K_t`` touches the complementary invariant
hyperplane of some matrix (no invariant cone can contain it), or when it
stops growing.
"""
from __future__ import annotations

import csv
import enum
import io
import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import cone as cn
from .cone import DEFAULT_STRICT_EPS, DEFAULT_TOL, Inclusion, PolyhedralCone
from .errors import (
    BasicTestFailed,
    DegenerateSigns,
    DimensionMismatch,
    EmptyCone,
    NoConvergence,
    NoStrictDominance,
    NotPointed,
    ParallelPoints,
)
from .hilbert import rho_for_gamma
from .linalg import InvariantSplitting, as_square, dominant_eigenpair, unit
from .verify import check_positive

log = logging.getLogger(__name__)


def as_family(matrices) -> dict:
    """Symbol -> matrix dict from a mapping or a plain sequence."""
    if isinstance(matrices, Mapping):
        fam = {str(k): as_square(v) for k, v in matrices.items()}
    else:
        fam = {str(k): as_square(v) for k, v in enumerate(matrices)}
    if not fam:
        raise ValueError("empty matrix family")
    dims = {M.shape[0] for M in fam.values()}
    if len(dims) != 1:
        raise DimensionMismatch(f"matrices have different sizes: {sorted(dims)}")
    return fam


@dataclass(frozen=True)
class SearchConfig:
    gamma: float
    seed_depth: int = 2
    max_iters: int = 200
    tol: float = DEFAULT_TOL
    eps_strict: float = DEFAULT_STRICT_EPS
    growth_eps: float = 1e-12
    inflate: str = "all"  # "all" image vertices, or only "boundary" ones
    max_generators: Optional[int] = None
    solidify_eps: float = 1e-3

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in the open interval (0, 1)")
        if self.seed_depth < 0 or self.max_iters < 0:
            raise ValueError("seed_depth and max_iters must be nonnegative")
        if self.inflate not in ("all", "boundary"):
            raise ValueError("inflate must be 'all' or 'boundary'")


class SearchStatus(str, enum.Enum):
    FOUND_GAMMA = "FoundGammaContracting"
    FOUND_DELTA = "FoundDeltaInvariant"
    NO = "No"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    generator_count: int
    best_gamma: float
    flags: str


@dataclass
class SearchOutcome:
    status: SearchStatus
    cone: Optional[PolyhedralCone] = None
    delta: Optional[float] = None
    iterations: int = 0
    trace: list = field(default_factory=list)
    reason: str = ""
    witness: Optional[dict] = None
    gammas: Optional[dict] = None  # per-matrix ratio on the returned cone

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "delta": self.delta,
            "iterations": self.iterations,
            "reason": self.reason,
            "witness": self.witness,
            "gammas": self.gammas,
            "cone": None if self.cone is None else self.cone.to_dict(),
        }

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iter", "generator_count", "best_gamma", "verdict_flags"])
        for r in self.trace:
            w.writerow([r.iteration, r.generator_count, repr(r.best_gamma), r.flags])
        return buf.getvalue()


def basic_test(matrices, tol: float = DEFAULT_TOL) -> list[InvariantSplitting]:
    """Necessary condition for a common contracting cone.

    Every matrix needs a strictly dominant eigenvalue, and no dominant
    eigenvector may lie in another matrix's complementary invariant
    hyperplane.
    """
    fam = as_family(matrices)
    splits = {}
    for s, A in fam.items():
        try:
            splits[s] = dominant_eigenpair(A, tol=tol)
        except (NoStrictDominance, NoConvergence) as exc:
            raise BasicTestFailed(f"matrix {s!r}: {exc}", offender=s) from exc
    for s, sp in splits.items():
        for t, other in splits.items():
            if s != t and abs(float(other.w @ sp.v)) <= tol:
                raise BasicTestFailed(
                    f"dominant eigenvector of {s!r} lies in the invariant hyperplane of {t!r}",
                    offender=(s, t),
                )
    return list(splits.values())


def orient(splittings: Sequence[InvariantSplitting]) -> list[InvariantSplitting]:
    """Flip eigenvectors so all lie on the positive side of the first ``w``.

    Each ``w`` is flipped together with its ``v`` so ``w @ v > 0`` is kept.
    """
    ref = splittings[0].w
    out = []
    for sp in splittings:
        s = 1.0 if float(ref @ sp.v) > 0 else -1.0
        out.append(InvariantSplitting(sp.lam, s * sp.v, s * sp.w, sp.gap))
    return out


def seed_cone(matrices, vectors, depth: int = 2, tol: float = DEFAULT_TOL) -> PolyhedralCone:
    """Conic hull of ``P v`` over products ``P`` of at most ``depth`` matrices."""
    mats = list(as_family(matrices).values())
    frontier = [unit(v) for v in vectors]
    points = list(frontier)
    for _ in range(depth):
        frontier = [unit(A @ p) for A in mats for p in frontier]
        frontier = list(cn._dedupe(np.array(frontier), tol))
        points.extend(frontier)
    return cn.from_generators(np.array(points), tol=tol)


def inflate_point(x_img, y_img, rho: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``y' + (y' - x')/(rho - 1)``, pushed away from ``x'``."""
    x = np.asarray(x_img, dtype=float)
    y = np.asarray(y_img, dtype=float)
    if not rho > 1.0:
        raise ValueError("rho must exceed 1")
    a = cn.angle(x, y)
    if min(a, np.pi - a) <= tol:
        raise ParallelPoints("inflation needs non-parallel points")
    if np.isinf(rho):
        return y.copy()
    return y + (y - x) / (rho - 1.0)


def scale_to_hyperplane(x, y, w, tol: float = DEFAULT_TOL) -> float:
    """The ``lam > 0`` with ``w @ (y - lam * x) == 0``."""
    x, y, w = (np.asarray(v, dtype=float) for v in (x, y, w))
    a, b = float(w @ x), float(w @ y)
    nw = np.linalg.norm(w)
    if abs(a) <= tol * nw * np.linalg.norm(x) or abs(b) <= tol * nw * np.linalg.norm(y) or a * b < 0:
        raise DegenerateSigns("x and y must lie strictly on the same side of the hyperplane")
    return b / a


def common_invariant_subspace(matrices, tol: float = 1e-9) -> Optional[np.ndarray]:
    """Heuristic: grow Krylov spans of each eigenvector under the whole family.

    Returns an orthonormal basis (rows) of a proper common invariant subspace
    when one is found, else None. Left eigenvectors are tried as well, which
    detects common invariant hyperplanes.
    """
    mats = list(as_family(matrices).values())
    n = mats[0].shape[0]
    for family in (mats, [M.T for M in mats]):
        for M in family:
            vals, vecs = np.linalg.eig(M)
            for k in range(n):
                start = [vecs[:, k].real]
                if abs(vals[k].imag) > tol:
                    start.append(vecs[:, k].imag)
                basis = _span(np.array(start), tol)
                while True:
                    grown = _span(np.vstack([basis] + [basis @ A.T for A in family]), tol)
                    if len(grown) == len(basis):
                        break
                    basis = grown
                if 0 < len(basis) < n:
                    if family is not mats:
                        # the orthogonal complement of a left-invariant span is right-invariant
                        basis = _complement(basis, tol)
                    return basis
    return None


def _span(V: np.ndarray, tol: float) -> np.ndarray:
    _, s, Vt = np.linalg.svd(V)
    r = int(np.sum(s > tol * max(1.0, s[0])))
    return Vt[:r]


def _complement(B: np.ndarray, tol: float) -> np.ndarray:
    _, s, Vt = np.linalg.svd(B)
    return Vt[len(B):]


def _thin(G: np.ndarray, k: int) -> np.ndarray:
    """Farthest-point subset of ``k`` rays."""
    chosen = [0]
    d = np.array([cn.angle(G[0], g) for g in G])
    while len(chosen) < k:
        j = int(np.argmax(d))
        chosen.append(j)
        d = np.minimum(d, [cn.angle(G[j], g) for g in G])
    return G[sorted(chosen)]


def solidify(K: PolyhedralCone, eps: float, tol: float = DEFAULT_TOL) -> PolyhedralCone:
    """Thicken a lower-dimensional cone by ``eps`` around its central ray.

    The added rays are not implied by contraction, so a cone produced here
    is no longer a certified inner bound.
    """
    c = unit(K.generators.sum(axis=0))
    _, _, Vt = np.linalg.svd(K.generators)
    r = np.linalg.matrix_rank(K.generators, tol=1e-9)
    extra = [unit(c + sgn * eps * u) for u in Vt[r:] for sgn in (1.0, -1.0)]
    return cn.from_generators(np.vstack([K.generators, extra]), tol)


def _evaluate(mats, K, cfg):
    checks = [check_positive(A, K, cfg.tol, cfg.eps_strict) for A in mats]
    strict = all(c.inclusion is Inclusion.STRICT for c in checks)
    return checks, strict, max(c.gamma for c in checks)


def _inflation_points(mats, splits, K: PolyhedralCone, K_prop: PolyhedralCone, rho, cfg):
    points = []
    for A, sp in zip(mats, splits):
        Y = K.generators @ A.T
        norms = np.linalg.norm(Y, axis=1)
        Y = Y[norms > 0] / norms[norms > 0, None]
        for y in Y:
            if cfg.inflate == "boundary" and cn.contains_interior(K_prop, y, cfg.eps_strict):
                continue
            angles = [cn.angle(y, x) for x in Y]
            for j in np.argsort(angles, kind="stable")[::-1]:
                x = Y[j]
                try:
                    lam = scale_to_hyperplane(x, y, sp.w, cfg.tol)
                    points.append(inflate_point(lam * x, y, rho, cfg.tol))
                except (ParallelPoints, DegenerateSigns):
                    continue
                break
    return points


def find_contracting_cone(matrices, cfg: SearchConfig) -> SearchOutcome:
    """Decide whether ``matrices`` share a ``cfg.gamma``-contracting cone.

    Returns FoundGammaContracting with a verified cone, No with a witness
    (basic-test failure, non-pointed hull or a touched invariant hyperplane),
    FoundDeltaInvariant when the inner bound stopped growing on a cone that
    contracts with some ratio in ``(gamma, 1)``, or Inconclusive.
    """
    fam = as_family(matrices)
    symbols = list(fam)
    mats = [fam[s] for s in symbols]
    sub = common_invariant_subspace(mats, cfg.tol)
    if sub is not None:
        log.warning(
            "matrices share an invariant subspace of dimension %d; the search may not terminate",
            len(sub),
        )
    try:
        splits = orient(basic_test(fam, cfg.tol))
    except BasicTestFailed as exc:
        return SearchOutcome(
            SearchStatus.NO,
            reason=f"basic test failed: {exc}",
            witness={"stage": "basic_test", "offender": exc.offender},
        )
    try:
        K = seed_cone(fam, [sp.v for sp in splits], cfg.seed_depth, cfg.tol)
    except NotPointed:
        return SearchOutcome(
            SearchStatus.NO,
            reason="seed cone is not pointed",
            witness={"stage": "seed"},
        )
    rho = rho_for_gamma(cfg.gamma)
    trace: list[TraceRow] = []
    t = 0
    # False once the cone holds rays not implied by contraction; refutations
    # from such a cone are not sound and degrade to Inconclusive.
    certified = True
    while True:
        flags = []
        if not K.solid:
            K = solidify(K, cfg.solidify_eps, cfg.tol)
            certified = False
            flags.append("solidified")
        checks, strict, best = _evaluate(mats, K, cfg)
        flags += ["strict"] if strict else []
        if strict and best <= cfg.gamma:
            trace.append(TraceRow(t, len(K.generators), best, "|".join(flags + ["found"])))
            return SearchOutcome(
                SearchStatus.FOUND_GAMMA,
                cone=K,
                delta=best,
                iterations=t,
                trace=trace,
                reason=f"cone contracts every matrix with ratio <= {best:.6g}",
                gammas={s: c.gamma for s, c in zip(symbols, checks)},
            )
        hit = [s for s, sp in zip(symbols, splits) if cn.meets_hyperplane(K, sp.w, cfg.tol)]
        if hit and not certified:
            trace.append(TraceRow(t, len(K.generators), best, "|".join(flags + ["hyperplane"])))
            return SearchOutcome(
                SearchStatus.INCONCLUSIVE,
                cone=K,
                iterations=t,
                trace=trace,
                reason=f"thickened inner bound meets the invariant hyperplane of {hit[0]!r}",
            )
        if hit:
            trace.append(TraceRow(t, len(K.generators), best, "|".join(flags + ["hyperplane"])))
            return SearchOutcome(
                SearchStatus.NO,
                cone=K,
                iterations=t,
                trace=trace,
                reason=f"inner bound meets the invariant hyperplane of {hit[0]!r}",
                witness={"stage": "hyperplane", "symbol": hit[0], "cone": K.to_dict()},
            )
        if t >= cfg.max_iters:
            trace.append(TraceRow(t, len(K.generators), best, "|".join(flags + ["max_iters"])))
            break
        try:
            K_prop = cn.from_generators(
                np.vstack([K.generators] + [K.generators @ A.T for A in mats]), cfg.tol
            )
            new = _inflation_points(mats, splits, K, K_prop, rho, cfg)
            G = np.vstack([K_prop.generators] + ([np.array(new)] if new else []))
            K_next = cn.from_generators(G, cfg.tol)
        except NotPointed:
            trace.append(TraceRow(t, len(K.generators), best, "|".join(flags + ["not_pointed"])))
            return SearchOutcome(
                SearchStatus.NO if certified else SearchStatus.INCONCLUSIVE,
                cone=K,
                iterations=t,
                trace=trace,
                reason="propagated inner bound is not pointed",
                witness={"stage": "propagate", "cone": K.to_dict()},
            )
        if cfg.max_generators and len(K_next.generators) > cfg.max_generators:
            K_next = cn.from_generators(_thin(K_next.generators, cfg.max_generators), cfg.tol)
            flags.append("thinned")
        moved = cn.ray_set_distance(K_next.generators, K.generators)
        trace.append(TraceRow(t, len(K.generators), best, "|".join(flags)))
        K = K_next
        t += 1
        if moved <= cfg.growth_eps:
            checks, strict, best = _evaluate(mats, K, cfg)
            if strict and best <= cfg.gamma:
                continue  # reported as found at the top of the loop
            trace.append(TraceRow(t, len(K.generators), best, "stagnated"))
            break
    checks, strict, best = _evaluate(mats, K, cfg)
    gammas = {s: c.gamma for s, c in zip(symbols, checks)}
    if strict and best < 1.0:
        return SearchOutcome(
            SearchStatus.FOUND_DELTA,
            cone=K,
            delta=best,
            iterations=t,
            trace=trace,
            reason=f"inner bound stopped growing; it contracts with ratio {best:.6g} > gamma",
            gammas=gammas,
        )
    return SearchOutcome(
        SearchStatus.INCONCLUSIVE,
        cone=K,
        iterations=t,
        trace=trace,
        reason="no contracting cone found before the iteration budget ran out",
        gammas=gammas,
    )
