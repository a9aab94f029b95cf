import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from conekit import cone as cn
from conekit.cone import Inclusion
from conekit.errors import NotPointed, NotSolid

from conftest import A0, interior_point, random_cone_rays


def rows_match(G, expected, atol=1e-9):
    E = np.asarray(expected, float)
    E = E / np.linalg.norm(E, axis=1, keepdims=True)
    G = G / np.linalg.norm(G, axis=1, keepdims=True)
    if G.shape != E.shape:
        return False
    return all(np.min(np.linalg.norm(G - e, axis=1)) < atol for e in E)


def section_extreme_rays(R):
    """Oracle: extreme rays are the vertices of the section {x : c.x = 1}."""
    n = R.shape[1]
    c = np.ones(n) / np.sqrt(n)
    P = R / (R @ c)[:, None]
    Q = np.linalg.svd(np.eye(n) - np.outer(c, c))[0][:, : n - 1]
    pts = P @ Q
    if n == 2:
        return {int(np.argmin(pts[:, 0])), int(np.argmax(pts[:, 0]))}
    return set(ConvexHull(pts).vertices.tolist())


class TestConstruction:
    def test_example_cone_facets(self, K0):
        assert rows_match(K0.facets, [[1, 1], [1, -1]])
        assert K0.solid

    def test_interior_ray_removed(self):
        K = cn.from_generators([[1, 0], [0, 1], [1, 1]])
        assert rows_match(K.generators, np.eye(2))
        assert rows_match(K.facets, np.eye(2))

    def test_line_is_not_pointed(self):
        with pytest.raises(NotPointed):
            cn.from_generators([[1, 0], [-1, 0]])

    def test_from_facets(self):
        K = cn.from_facets([[1, 1], [1, -1]])
        assert rows_match(K.generators, [[1, 1], [1, -1]])
        K3 = cn.from_facets(np.eye(3))
        assert rows_match(K3.generators, np.eye(3))

    def test_slab_is_not_solid(self):
        with pytest.raises(NotSolid):
            cn.from_facets([[1, 0], [-1, 0]])

    def test_lower_dimensional_cone(self):
        K = cn.from_generators([[1, 0, 0], [0, 1, 0]])
        assert not K.solid
        assert cn.contains(K, [1, 1, 0])
        assert not cn.contains(K, [1, 1, 1e-3])

    def test_duplicate_and_scaled_rays(self):
        K = cn.from_generators([[1, 0], [3, 0], [0, 2], [1, 1e-13]])
        assert len(K.generators) == 2

    def test_dict_roundtrip_and_decimal_strings(self, K1):
        K = cn.PolyhedralCone.from_dict({"generators": [["4", "1"], ["4.0", "-1"]]})
        assert cn.same_cone(K, K1)
        assert cn.same_cone(cn.PolyhedralCone.from_dict(K1.to_dict()), K1)
        assert cn.same_cone(cn.PolyhedralCone.from_dict({"facets": K1.facets.tolist()}), K1)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(2, 4), st.integers(0, 10**6))
    def test_extreme_rays_match_convex_hull_oracle(self, n, seed):
        R = random_cone_rays(np.random.default_rng(seed), n, extra=4)
        K = cn.from_generators(R)
        idx = sorted(section_extreme_rays(R))
        assert rows_match(K.generators, R[idx], atol=1e-8)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(2, 4), st.integers(0, 10**6))
    def test_vh_roundtrip(self, n, seed):
        K = cn.from_generators(random_cone_rays(np.random.default_rng(seed), n))
        assert cn.same_cone(cn.from_facets(K.facets), K)
        # every facet normal is tight on at least n-1 independent generators
        for f in K.facets:
            tight = K.generators[np.abs(K.generators @ f) < 1e-8]
            assert np.linalg.matrix_rank(tight) == n - 1


class TestMembership:
    def test_examples(self, K0, K1, orthant2):
        assert cn.contains_interior(K1, [5, 1])
        assert cn.contains(orthant2, [1, 0]) and not cn.contains_interior(orthant2, [1, 0])
        assert not cn.contains(K0, [1, 2])

    def test_image(self, K0):
        img = cn.image(K0, A0)
        assert rows_match(img.generators, [[5, 1], [5, -1]])
        assert cn.same_cone(cn.image(K0, np.eye(2)), K0)

    def test_collapsing_image_is_not_solid(self, orthant2):
        img = cn.image(orthant2, np.diag([1.0, 0.0]))
        assert not img.solid

    def test_hull_union(self, K0, K1, orthant2):
        assert cn.same_cone(cn.hull_union([K0]), K0)
        assert cn.same_cone(cn.hull_union([K0, K1]), K0)
        with pytest.raises(NotPointed):
            cn.hull_union([orthant2, cn.from_generators(-np.eye(2))])

    def test_meets_hyperplane(self, K0, orthant2):
        assert not cn.meets_hyperplane(orthant2, [1, 1])
        assert cn.meets_hyperplane(orthant2, [1, -1])
        assert cn.meets_hyperplane(K0, [0, 1])

    def test_angle(self):
        assert cn.angle(np.array([1.0, 0]), np.array([0, 1.0])) == pytest.approx(np.pi / 2)
        assert cn.angle(np.array([1.0, 0]), np.array([1.0, 0])) == 0.0


class TestInclusion:
    def test_example_chain(self, K0, K1):
        assert cn.includes(K1, cn.image(K0, A0)) == Inclusion.STRICT
        assert cn.includes(K0, K1) == Inclusion.STRICT
        res = cn.includes(K1, K0)
        assert res == Inclusion.NO
        # the witness is a generator of K0 violating a facet of K1
        assert res.witness.margin < 0
        assert np.dot(res.witness.facet, res.witness.generator) == pytest.approx(res.witness.margin)

    def test_self_inclusion_is_nonstrict(self, K0):
        assert cn.includes(K0, K0) == "NonStrict"

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 4), st.integers(0, 10**6))
    def test_nested_cones(self, n, seed):
        rng = np.random.default_rng(seed)
        outer = cn.from_generators(random_cone_rays(rng, n))
        inner = cn.from_generators(
            [interior_point(outer, rng) for _ in range(n + 2)]
        )
        assert cn.includes(outer, inner) == Inclusion.STRICT
        assert cn.includes(inner, outer) == Inclusion.NO

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 4), st.integers(0, 10**6))
    def test_verdict_agrees_with_brute_force(self, n, seed):
        rng = np.random.default_rng(seed)
        A = cn.from_generators(random_cone_rays(rng, n))
        Bc = cn.from_generators(random_cone_rays(rng, n))
        M = np.array([[f @ g for f in A.facets] for g in Bc.generators])
        expected = "No" if M.min() < -1e-9 else ("Strict" if M.min() > 1e-7 * 1.0001 else "NonStrict")
        if 1e-9 < abs(M.min()) < 1e-6:
            return  # too close to call either way
        assert cn.includes(A, Bc).verdict.value == expected
