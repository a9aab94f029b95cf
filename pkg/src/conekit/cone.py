"""Polyhedral cones kept in both generator and facet form.

A cone is ``K = cone(generators) = {x : F @ x >= 0}`` where the rows of ``F``
are inward facet normals. Conversion between the two forms uses the
incremental double-description method. Every stored vector has unit
Euclidean norm and all tolerances are relative to vector norms.

Cones that are not full-dimensional (images under singular maps) are
allowed. Their facet list then also carries ``+u`` and ``-u`` for each
normal ``u`` of the spanned subspace, so ``contains`` still works and
``contains_interior`` is always false.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionMismatch, EmptyCone, NotPointed, NotSolid
from .linalg import as_square

DEFAULT_TOL = 1e-9
DEFAULT_STRICT_EPS = 1e-7


@dataclass(frozen=True, eq=False)
class PolyhedralCone:
    generators: np.ndarray  # (k, n) unit extreme rays
    facets: np.ndarray  # (f, n) unit inward normals
    solid: bool = True

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    def __repr__(self):
        return (
            f"PolyhedralCone(dim={self.dim}, generators={len(self.generators)}, "
            f"facets={len(self.facets)}, solid={self.solid})"
        )

    def to_dict(self) -> dict:
        return {
            "generators": self.generators.tolist(),
            "facets": self.facets.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict, tol: float = DEFAULT_TOL) -> "PolyhedralCone":
        """Build from ``{"generators": [...]}`` or ``{"facets": [...]}``.

        When both keys are present the generators win and the facets are
        re-derived.
        """
        if data.get("generators"):
            return from_generators(_float_rows(data["generators"]), tol=tol)
        if data.get("facets"):
            return from_facets(_float_rows(data["facets"]), tol=tol)
        raise ValueError("cone needs a non-empty 'generators' or 'facets' array")


def _float_rows(rows) -> np.ndarray:
    # decimal strings are accepted as well as numbers
    return np.array([[float(v) for v in row] for row in rows], dtype=float)


def _normalize_rows(V: np.ndarray, tol: float) -> np.ndarray:
    V = np.atleast_2d(np.asarray(V, dtype=float))
    norms = np.linalg.norm(V, axis=1)
    scale = norms.max() if len(norms) else 0.0
    keep = norms > max(tol * scale, 1e-300)
    return V[keep] / norms[keep, None]


def _dedupe(V: np.ndarray, tol: float) -> np.ndarray:
    out: list[np.ndarray] = []
    for v in V:
        if not any(np.linalg.norm(v - u) <= tol * 10 for u in out):
            out.append(v)
    return np.array(out).reshape(-1, V.shape[1])


def angle(u, v) -> float:
    """Angle between two nonzero vectors, accurate near 0 and pi."""
    u = np.asarray(u, float) / np.linalg.norm(u)
    v = np.asarray(v, float) / np.linalg.norm(v)
    return float(2.0 * np.arctan2(np.linalg.norm(u - v), np.linalg.norm(u + v)))


def ray_set_distance(G1: np.ndarray, G2: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two ray sets, in radians."""
    if len(G1) == 0 or len(G2) == 0:
        return 0.0 if len(G1) == len(G2) else np.pi
    d12 = max(min(angle(a, b) for b in G2) for a in G1)
    d21 = max(min(angle(a, b) for b in G1) for a in G2)
    return max(d12, d21)


def _strict_feasibility(M: np.ndarray) -> float:
    """max t subject to M @ x >= t, |x|_inf <= 1, t <= 1."""
    m, d = M.shape
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-M, np.ones((m, 1))])
    b_ub = np.zeros(m)
    bounds = [(-1.0, 1.0)] * d + [(None, 1.0)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"feasibility LP failed: {res.message}")
    return float(-res.fun)


def _independent_rows(H: np.ndarray, tol: float) -> list[int]:
    chosen: list[int] = []
    d = H.shape[1]
    for i in np.argsort(-np.linalg.norm(H, axis=1), kind="stable"):
        trial = H[chosen + [int(i)]]
        if np.linalg.matrix_rank(trial, tol=max(tol, 1e-12) * 10) == len(chosen) + 1:
            chosen.append(int(i))
            if len(chosen) == d:
                break
    return chosen


def _double_description(H: np.ndarray, tol: float) -> np.ndarray:
    """Extreme rays of the pointed cone ``{x : H @ x >= 0}``.

    ``H`` must have full column rank. Rows are processed one at a time; a new
    ray is created for every adjacent (positive, negative) pair, adjacency
    being decided by the combinatorial test on zero sets.
    """
    m, d = H.shape
    basis = _independent_rows(H, tol)
    if len(basis) < d:
        raise NotPointed("inequality system has a nontrivial lineality space")
    rays = np.linalg.inv(H[basis]).T
    rays /= np.linalg.norm(rays, axis=1)[:, None]
    processed = list(basis)
    # zero sets as frozensets of processed row indices
    zeros = [frozenset(j for j in basis if j != basis[k]) for k in range(d)]
    for i in range(m):
        if i in basis:
            continue
        h = H[i]
        vals = rays @ h
        pos = [k for k in range(len(rays)) if vals[k] > tol]
        neg = [k for k in range(len(rays)) if vals[k] < -tol]
        zer = [k for k in range(len(rays)) if abs(vals[k]) <= tol]
        new_rays = [rays[k] for k in pos + zer]
        new_zeros = [zeros[k] for k in pos] + [zeros[k] | {i} for k in zer]
        for p, q in itertools.product(pos, neg):
            common = zeros[p] & zeros[q]
            if len(common) < d - 2:
                continue
            if any(
                k != p and k != q and common <= zeros[k] for k in range(len(rays))
            ):
                continue
            r = vals[p] * rays[q] - vals[q] * rays[p]
            r /= np.linalg.norm(r)
            new_rays.append(r)
            new_zeros.append(common | {i})
        rays = np.array(new_rays).reshape(-1, d)
        zeros = new_zeros
        processed.append(i)
    return _dedupe(rays, tol)


def _tight_rank(normals: np.ndarray, point: np.ndarray, tol: float) -> int:
    tight = normals[np.abs(normals @ point) <= tol * 10]
    if len(tight) == 0:
        return 0
    return int(np.linalg.matrix_rank(tight, tol=1e-7))


def from_generators(rays, tol: float = DEFAULT_TOL) -> PolyhedralCone:
    """Conic hull of ``rays`` with redundant rays dropped and facets derived.

    Raises NotPointed when the hull contains a line and EmptyCone when no
    nonzero ray is given.
    """
    R = _normalize_rows(np.asarray(rays, dtype=float), tol)
    if R.size == 0:
        raise EmptyCone("no nonzero generators")
    n = R.shape[1]
    R = _dedupe(R, tol)
    _, s, Vt = np.linalg.svd(R)
    r = int(np.sum(s > max(tol, 1e-12) * s[0] * 10))
    Q = Vt[:r]  # orthonormal basis of span(R)
    C = R @ Q.T
    if _strict_feasibility(C) <= tol:
        raise NotPointed("conic hull of the generators contains a line")
    dual = _double_description(C, tol)  # facets within span(R)
    keep = [
        k
        for k, c in enumerate(C)
        if r == 1 or _tight_rank(dual, c, tol) >= r - 1
    ]
    gens = R[keep]
    if r == 1:
        gens = gens[:1]
    facets = dual @ Q
    if r < n:
        null = Vt[r:]
        facets = np.vstack([facets, null, -null])
    facets = _normalize_rows(facets, tol)
    return PolyhedralCone(generators=gens, facets=facets, solid=(r == n))


def from_facets(normals, tol: float = DEFAULT_TOL) -> PolyhedralCone:
    """Cone ``{x : a @ x >= 0 for every row a}`` with redundant rows pruned.

    Raises NotSolid if the system has no interior point and NotPointed if
    it leaves a line free.
    """
    F = _normalize_rows(np.asarray(normals, dtype=float), tol)
    if F.size == 0:
        raise NotPointed("no facets: the cone is the whole space")
    n = F.shape[1]
    F = _dedupe(F, tol)
    if _strict_feasibility(F) <= tol:
        raise NotSolid("facet system has no interior point")
    if np.linalg.matrix_rank(F, tol=1e-10) < n:
        raise NotPointed("facet system leaves a line free")
    gens = _double_description(F, tol)
    keep = [k for k, a in enumerate(F) if _tight_rank(gens, a, tol) >= n - 1]
    return PolyhedralCone(generators=gens, facets=F[keep], solid=True)


def _check_dim(K: PolyhedralCone, n: int):
    if K.dim != n:
        raise DimensionMismatch(f"cone dimension {K.dim} != {n}")


def margins(K: PolyhedralCone, x) -> np.ndarray:
    """Facet values ``a @ x / |x|`` for every facet ``a``."""
    x = np.asarray(x, dtype=float)
    _check_dim(K, x.shape[0])
    return K.facets @ x / np.linalg.norm(x)


def contains(K: PolyhedralCone, x, tol: float = DEFAULT_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(x) == 0.0:
        return True
    return bool(margins(K, x).min() >= -tol)


def contains_interior(
    K: PolyhedralCone, x, eps_strict: float = DEFAULT_STRICT_EPS
) -> bool:
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(x) == 0.0:
        return False
    return bool(margins(K, x).min() >= eps_strict)


def image(K: PolyhedralCone, A, tol: float = DEFAULT_TOL) -> PolyhedralCone:
    """Image cone ``A K``; rays mapped to zero are dropped."""
    A = as_square(A)
    _check_dim(K, A.shape[0])
    return from_generators(K.generators @ A.T, tol=tol)


def hull_union(cones: Sequence[PolyhedralCone], tol: float = DEFAULT_TOL) -> PolyhedralCone:
    if not cones:
        raise ValueError("no cones given")
    n = cones[0].dim
    for K in cones:
        _check_dim(K, n)
    return from_generators(np.vstack([K.generators for K in cones]), tol=tol)


class Inclusion(str, enum.Enum):
    NO = "No"
    NON_STRICT = "NonStrict"
    STRICT = "Strict"


@dataclass(frozen=True)
class Witness:
    generator_index: int
    facet_index: int
    margin: float
    generator: tuple
    facet: tuple

    def to_dict(self) -> dict:
        return {
            "generator_index": self.generator_index,
            "facet_index": self.facet_index,
            "margin": self.margin,
            "generator": list(self.generator),
            "facet": list(self.facet),
        }


@dataclass(frozen=True)
class InclusionResult:
    verdict: Inclusion
    witness: Optional[Witness] = None

    def __eq__(self, other):
        if isinstance(other, (Inclusion, str)):
            return self.verdict == other
        return NotImplemented

    __hash__ = None


def includes(
    outer: PolyhedralCone,
    inner: PolyhedralCone,
    tol: float = DEFAULT_TOL,
    eps_strict: float = DEFAULT_STRICT_EPS,
) -> InclusionResult:
    """Decide ``inner ⊆ int outer`` (Strict), ``inner ⊆ outer`` or neither.

    On failure the witness is the first generator of ``inner`` (in storage
    order) that leaves ``outer``, paired with its most violated facet.
    """
    _check_dim(outer, inner.dim)
    M = inner.generators @ outer.facets.T  # generators are unit
    mins = M.min(axis=1)
    bad = np.flatnonzero(mins < -tol)
    if len(bad):
        g = int(bad[0])
        f = int(np.argmin(M[g]))
        return InclusionResult(
            Inclusion.NO,
            Witness(
                g,
                f,
                float(M[g, f]),
                tuple(inner.generators[g].tolist()),
                tuple(outer.facets[f].tolist()),
            ),
        )
    if mins.min() >= eps_strict:
        return InclusionResult(Inclusion.STRICT)
    return InclusionResult(Inclusion.NON_STRICT)


def meets_hyperplane(K: PolyhedralCone, w, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``K`` meets ``{x : w @ x = 0}`` outside the origin."""
    w = np.asarray(w, dtype=float)
    _check_dim(K, w.shape[0])
    s = K.generators @ (w / np.linalg.norm(w))
    if np.any(np.abs(s) <= tol):
        return True
    return bool(np.any(s > tol) and np.any(s < -tol))


def same_cone(K1: PolyhedralCone, K2: PolyhedralCone, tol: float = 1e-7) -> bool:
    """Set equality up to ray scaling and order."""
    return K1.dim == K2.dim and ray_set_distance(K1.generators, K2.generators) <= tol


def cone_from_any(obj: Iterable, tol: float = DEFAULT_TOL) -> PolyhedralCone:
    if isinstance(obj, PolyhedralCone):
        return obj
    if isinstance(obj, dict):
        return PolyhedralCone.from_dict(obj, tol=tol)
    return from_generators(np.asarray(obj, dtype=float), tol=tol)
