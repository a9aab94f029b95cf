import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conekit import cone as cn
from conekit import hilbert as hb
from conekit.errors import ImageNotContained, NotInCone

from conftest import A0, B, ROT, birkhoff_orthant, interior_point, random_cone_rays

positive = st.floats(0.01, 100.0)


def birkhoff_diameter(A):
    """Oracle: max over column pairs (k, l) of log(a_ik a_jl / (a_jk a_il))."""
    n = A.shape[1]
    return max(birkhoff_orthant(A[:, k], A[:, l]) for k in range(n) for l in range(n))


def test_ratio_bounds_examples(orthant2, K0):
    assert hb.ratio_bounds(orthant2, [2, 1], [1, 1]) == pytest.approx((2.0, 1.0))
    assert hb.ratio_bounds(K0, [3, 1], [3, 1]) == pytest.approx((1.0, 1.0))
    M, m = hb.ratio_bounds(orthant2, [1, 0], [1, 1])
    assert m == 0.0
    assert hb.distance(orthant2, [1, 0], [1, 1]) == math.inf


def test_distance_examples(orthant2):
    assert hb.distance(orthant2, [2, 1], [1, 1]) == pytest.approx(math.log(2))
    assert hb.distance(orthant2, [2, 1], [2, 1]) == 0.0
    assert hb.oscillation(orthant2, [2, 1], [1, 1]) == pytest.approx(1.0)
    assert hb.oscillation(orthant2, [1, 1], [1, 1]) == 0.0
    assert hb.oscillation(orthant2, [1, 1], [1, 0]) == math.inf


def test_not_in_cone(K0):
    with pytest.raises(NotInCone):
        hb.distance(K0, [1, 2], [1, 0])


def test_projective_diameter_examples(orthant2, K0, K1):
    assert hb.projective_diameter(B, orthant2) == pytest.approx(math.log(4), abs=1e-12)
    assert hb.projective_diameter(np.eye(2), K0) == math.inf
    D = hb.projective_diameter(A0, K0, K1)
    assert math.isfinite(D) and D > 0
    with pytest.raises(ImageNotContained):
        hb.projective_diameter(ROT, orthant2)


def test_contraction_ratio_and_rho():
    assert hb.contraction_ratio(math.log(4)) == pytest.approx(1 / 3, abs=1e-15)
    assert hb.contraction_ratio(0.0) == 0.0
    assert hb.contraction_ratio(math.inf) == 1.0
    assert hb.rho_for_gamma(1 / 3) == pytest.approx(4.0)
    assert hb.rho_for_gamma(0.5) == pytest.approx(9.0)
    assert 1.0 < hb.rho_for_gamma(1e-6) < 1.0 + 1e-5
    for bad in (0.0, 1.0, -0.1, 2.0):
        with pytest.raises(ValueError):
            hb.rho_for_gamma(bad)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 5), st.data())
def test_orthant_distance_matches_birkhoff(n, data):
    x = np.array(data.draw(st.lists(positive, min_size=n, max_size=n)))
    y = np.array(data.draw(st.lists(positive, min_size=n, max_size=n)))
    K = cn.from_generators(np.eye(n))
    assert hb.distance(K, x, y) == pytest.approx(birkhoff_orthant(x, y), abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_positive_matrix_diameter_matches_birkhoff(n, seed):
    A = np.random.default_rng(seed).uniform(0.1, 2.0, (n, n))
    K = cn.from_generators(np.eye(n))
    assert hb.projective_diameter(A, K) == pytest.approx(birkhoff_diameter(A), abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6), positive, positive)
def test_metric_axioms(n, seed, a, b):
    rng = np.random.default_rng(seed)
    K = cn.from_generators(random_cone_rays(rng, n))
    x, y, z = (interior_point(K, rng) for _ in range(3))
    dxy = hb.distance(K, x, y)
    assert dxy == pytest.approx(hb.distance(K, y, x), abs=1e-9)
    assert hb.distance(K, a * x, b * y) == pytest.approx(dxy, abs=1e-9)
    assert hb.distance(K, x, z) <= dxy + hb.distance(K, y, z) + 1e-9


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_birkhoff_contraction(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.uniform(0.1, 2.0, (n, n))
    K = cn.from_generators(np.eye(n))
    gamma = hb.contraction_ratio(hb.projective_diameter(A, K))
    x, y = rng.uniform(0.05, 1, n), rng.uniform(0.05, 1, n)
    assert hb.distance(K, A @ x, A @ y) <= gamma * hb.distance(K, x, y) + 1e-9
