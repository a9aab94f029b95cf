"""Hilbert projective metric on polyhedral cones and Birkhoff contraction."""
from __future__ import annotations

import math

import numpy as np

from .cone import (
    DEFAULT_STRICT_EPS,
    DEFAULT_TOL,
    Inclusion,
    PolyhedralCone,
    contains,
    image,
    includes,
)
from .errors import EmptyCone, ImageNotContained, NotInCone, NotPointed

INF = math.inf


def _facet_values(K: PolyhedralCone, x, y, tol: float):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for name, z in (("x", x), ("y", y)):
        if np.linalg.norm(z) == 0.0 or not contains(K, z, tol):
            raise NotInCone(f"{name} = {z.tolist()} is not a nonzero point of the cone")
    p = K.facets @ x
    q = K.facets @ y
    p[p <= tol * np.linalg.norm(x)] = 0.0
    q[q <= tol * np.linalg.norm(y)] = 0.0
    return p, q


def ratio_bounds(K: PolyhedralCone, x, y, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """``(M, m)`` with ``M = inf{l : l*y - x in K}``, ``m = sup{u : x - u*y in K}``.

    ``M`` is ``inf`` when no multiple of ``y`` dominates ``x``.
    """
    p, q = _facet_values(K, x, y, tol)
    pos = q > 0.0
    if not pos.any():
        raise NotInCone("y lies on every facet")
    if np.any(~pos & (p > 0.0)):
        M = INF
    else:
        M = float(np.max(p[pos] / q[pos]))
    m = float(np.min(p[pos] / q[pos]))
    return M, m


def distance(K: PolyhedralCone, x, y, tol: float = DEFAULT_TOL) -> float:
    """Hilbert distance ``log(M/m)`` between the rays of ``x`` and ``y``."""
    M, m = ratio_bounds(K, x, y, tol)
    if M == INF or m == 0.0:
        return INF
    return max(0.0, math.log(M / m))


def oscillation(K: PolyhedralCone, x, y, tol: float = DEFAULT_TOL) -> float:
    M, m = ratio_bounds(K, x, y, tol)
    return INF if M == INF else M - m


def _pairwise_diameter(K: PolyhedralCone, P: np.ndarray, tol: float) -> float:
    if len(P) <= 1:
        return 0.0
    V = P @ K.facets.T  # (k, f), rows unit so values are relative margins
    if V.min() > tol:
        L = np.log(V)
        # Mx[i, j] = log M(p_i | p_j) = max_f (L[i, f] - L[j, f])
        Mx = np.array([(row - L).max(axis=1) for row in L])
        return float(max(0.0, (Mx + Mx.T).max()))
    best = 0.0
    for i in range(len(P)):
        for j in range(i + 1, len(P)):
            best = max(best, distance(K, P[i], P[j], tol))
            if best == INF:
                return INF
    return best


def projective_diameter(
    A,
    K_src: PolyhedralCone,
    K_dst: PolyhedralCone | None = None,
    tol: float = DEFAULT_TOL,
    eps_strict: float = DEFAULT_STRICT_EPS,
) -> float:
    """Hilbert diameter of ``A K_src`` measured in ``K_dst`` (default ``K_src``).

    The supremum over the image is attained on pairs of its extreme rays.
    Raises ImageNotContained unless ``A K_src ⊆ K_dst``.
    """
    K_dst = K_src if K_dst is None else K_dst
    try:
        img = image(K_src, A, tol)
    except EmptyCone:
        return 0.0
    except NotPointed as exc:
        raise ImageNotContained("image cone contains a line") from exc
    if includes(K_dst, img, tol, eps_strict).verdict is Inclusion.NO:
        raise ImageNotContained("image of the source cone leaves the target cone")
    return _pairwise_diameter(K_dst, img.generators, tol)


def contraction_ratio(D: float) -> float:
    """Birkhoff ratio ``tanh(D/4)``; 1 for an infinite diameter."""
    if D == INF:
        return 1.0
    if D < 0:
        raise ValueError("diameter must be nonnegative")
    return math.tanh(D / 4.0)


def rho_for_gamma(gamma: float) -> float:
    """Inflation parameter ``exp(4 artanh(gamma)) = ((1+gamma)/(1-gamma))**2``."""
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in the open interval (0, 1)")
    return ((1.0 + gamma) / (1.0 - gamma)) ** 2
