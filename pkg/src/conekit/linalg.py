"""Dense matrix helpers and dominant eigenstructure.

Desk-scale only (n up to ~8). The dominant pair is certified against a full
eigenvalue solve and then polished by shifted inverse iteration, which
converges in a handful of steps even when the spectral gap is tiny.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NoStrictDominance

DEFAULT_TOL = 1e-9
DEFAULT_GAP_EPS = 1e-6


def as_square(A) -> np.ndarray:
    """Return ``A`` as a finite float ``(n, n)`` array, or raise."""
    M = np.array(A, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def unit(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return x / nrm


@dataclass(frozen=True)
class InvariantSplitting:
    """Dominant eigenvalue with its right and left eigenvectors.

    ``v`` spans the dominant invariant line; ``w`` is the normal of the
    complementary invariant hyperplane ``{x : w @ x = 0}``. Both have unit
    norm, ``v`` has a positive largest-magnitude entry and ``w @ v > 0``.
    """

    lam: float
    v: np.ndarray
    w: np.ndarray
    gap: float

    @property
    def dim(self) -> int:
        return self.v.shape[0]

    def in_hyperplane(self, x, tol: float = DEFAULT_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        return abs(float(self.w @ x)) <= tol * np.linalg.norm(x)


def _leading_eigenvalue(A: np.ndarray, gap_eps: float) -> tuple[float, float]:
    vals = np.linalg.eigvals(A)
    order = np.argsort(-np.abs(vals), kind="stable")
    vals = vals[order]
    lead = vals[0]
    mag = abs(lead)
    if mag == 0.0:
        raise NoStrictDominance("matrix is nilpotent (spectral radius 0)")
    if abs(lead.imag) > 1e-12 * mag:
        raise NoStrictDominance(f"leading eigenvalue {lead} is complex")
    gap = abs(vals[1]) / mag if len(vals) > 1 else 0.0
    if gap > 1.0 - gap_eps:
        raise NoStrictDominance(
            f"no strictly dominant eigenvalue (|l2|/|l1| = {gap:.12g})"
        )
    if lead.real <= 0.0:
        raise NoStrictDominance(f"dominant eigenvalue {lead.real:.12g} is not positive")
    return float(lead.real), float(gap)


def _inverse_iteration(A: np.ndarray, lam0: float, tol: float, max_iter: int):
    n = A.shape[0]
    x = unit(np.random.default_rng(0).standard_normal(n))
    shift = lam0 * (1.0 + 1e-10)
    B = A - shift * np.eye(n)
    lam = lam0
    extra = 2  # a couple of polishing steps past the stopping test are nearly free
    for _ in range(max_iter + extra):
        try:
            y = np.linalg.solve(B, x)
        except np.linalg.LinAlgError:
            shift *= 1.0 + 1e-8
            B = A - shift * np.eye(n)
            continue
        x = unit(y)
        Ax = A @ x
        lam = float(x @ Ax)
        if np.linalg.norm(Ax - lam * x) <= tol * abs(lam):
            if extra == 0:
                return lam, x
            extra -= 1
    if extra < 2:
        return lam, x
    raise NoConvergence(f"inverse iteration did not reach tol={tol} in {max_iter} steps")


def dominant_eigenpair(
    A,
    tol: float = DEFAULT_TOL,
    max_iter: int = 100,
    gap_eps: float = DEFAULT_GAP_EPS,
) -> InvariantSplitting:
    """Certified dominant eigenpair of ``A`` and its invariant splitting.

    Raises NoStrictDominance when the leading eigenvalue is complex, tied in
    modulus within ``gap_eps`` or not positive.
    """
    A = as_square(A)
    lam0, gap = _leading_eigenvalue(A, gap_eps)
    lam, v = _inverse_iteration(A, lam0, tol, max_iter)
    lam_t, w = _inverse_iteration(A.T, lam0, tol, max_iter)
    if abs(lam - lam_t) > tol * abs(lam) * 10:
        raise NoConvergence(f"left/right eigenvalues disagree: {lam} vs {lam_t}")
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    if w @ v < 0:
        w = -w
    if abs(w @ v) <= tol:
        raise NoStrictDominance("left and right dominant eigenvectors are orthogonal")
    return InvariantSplitting(lam=lam, v=v, w=w, gap=gap)


def matrix_product(sequence: Sequence) -> np.ndarray:
    """Product of ``sequence`` with the first matrix applied first.

    ``matrix_product([A1, A2, A3]) == A3 @ A2 @ A1``.
    """
    mats = [as_square(M) for M in sequence]
    if not mats:
        raise ValueError("empty matrix sequence")
    n = mats[0].shape[0]
    out = mats[0]
    for M in mats[1:]:
        if M.shape[0] != n:
            raise DimensionMismatch(f"dimension {M.shape[0]} != {n}")
        out = M @ out
    return out
