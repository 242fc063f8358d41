import numpy as np
import pytest

from altproj import (
    AffineSubspace,
    Ball,
    Box,
    FinitePointSet,
    FixedRankMatrices,
    Halfspace,
    Hyperplane,
    NormalConeProbe,
    Polyhedron,
    Sphere,
    check_transversality,
    normal_vectors,
    set_from_json,
)
from altproj.errors import DimensionMismatch, RankDrop

RNG = np.random.default_rng(29)

CONVEX_SETS = [
    Box([0, 0], [1, 1]),
    Ball([0.5, -0.5], 2.0),
    AffineSubspace([1, 0, 0], [[0, 1, 0], [0, 0, 1]]),
    Hyperplane([1.0, 2.0], 3.0),
    Halfspace([1.0, -1.0], 0.5),
    Polyhedron([[1, 0], [0, 1], [-1, 0], [0, -1]], [1, 1, 0, 0]),
]
NONCONVEX_SETS = [
    Sphere([0, 0], 1.0),
    FinitePointSet([[0, 0], [1, 1], [2, 0]]),
    FixedRankMatrices(2, 2, 1),
]


def ambient_sample(s, rng):
    return rng.standard_normal(s.ambient_dim) * 2.0


class TestProjectionBasics:
    def test_ball_distance(self):
        assert Ball([0, 0], 1.0).distance([2, 0]) == pytest.approx(1.0)

    def test_box_interior(self):
        assert Box([0, 0], [1, 1]).distance([0.5, 0.5]) == 0.0

    def test_sphere_345(self):
        assert Sphere([0, 0], 1.0).distance([0.6, 0.8]) == pytest.approx(0.0, abs=1e-12)

    def test_box_clamp(self):
        np.testing.assert_allclose(Box([0, 0], [1, 1]).project([2, 0.5]), [1, 0.5])

    def test_fixed_rank_truncation(self):
        s = FixedRankMatrices(2, 2, 1)
        z = np.diag([3.0, 1.0]).reshape(-1)
        np.testing.assert_allclose(s.project(z), np.diag([3.0, 0.0]).reshape(-1))

    def test_sphere_center_tie_break(self):
        np.testing.assert_allclose(Sphere([0, 0], 1.0).project([0, 0]), [1, 0])

    def test_finite_point_lowest_index_tie(self):
        s = FinitePointSet([[1, 0], [-1, 0]])
        np.testing.assert_allclose(s.project([0, 0]), [1, 0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            Ball([0, 0], 1.0).project([1, 2, 3])

    def test_polyhedron_empty_rejected(self):
        with pytest.raises(Exception):
            Polyhedron([[1.0], [-1.0]], [0.0, -1.0])


class TestProjectionProperties:
    @pytest.mark.parametrize("s", CONVEX_SETS + NONCONVEX_SETS)
    def test_idempotence(self, s):
        for _ in range(25):
            z = ambient_sample(s, RNG)
            p = s.project(z)
            np.testing.assert_allclose(s.project(p), p, atol=1e-10)

    @pytest.mark.parametrize("s", CONVEX_SETS)
    def test_convex_projection_lipschitz(self, s):
        for _ in range(25):
            z1 = ambient_sample(s, RNG)
            z2 = ambient_sample(s, RNG)
            lhs = np.linalg.norm(s.project(z1) - s.project(z2))
            assert lhs <= np.linalg.norm(z1 - z2) + 1e-10

    @pytest.mark.parametrize("s", CONVEX_SETS + NONCONVEX_SETS)
    def test_distance_is_gap_to_projection(self, s):
        z = ambient_sample(s, RNG)
        assert s.distance(z) == pytest.approx(np.linalg.norm(z - s.project(z)))

    def test_finite_point_exhaustive(self):
        pts = RNG.standard_normal((7, 3))
        s = FinitePointSet(pts)
        for _ in range(30):
            z = RNG.standard_normal(3)
            best = pts[np.argmin(np.linalg.norm(pts - z, axis=1))]
            np.testing.assert_array_equal(s.project(z), best)

    def test_prox_regularity_sphere(self):
        # z - P(z) must lie in the normal space at P(z), for z within reach
        s = Sphere([0, 0, 0], 2.0)
        for _ in range(20):
            x = RNG.standard_normal(3)
            x = 2.0 * x / np.linalg.norm(x)
            z = x + RNG.uniform(-0.9, 0.9) * (x / 2.0)  # within radius/2
            p = s.project(z)
            cone = s.normal_cone(p)
            v = z - p
            if np.linalg.norm(v) < 1e-12:
                continue
            v = v / np.linalg.norm(v)
            proj = cone.lineality.T @ (cone.lineality @ v)
            assert np.linalg.norm(v - proj) <= 1e-8

    def test_prox_regularity_fixed_rank(self):
        s = FixedRankMatrices(3, 3, 2)
        A = RNG.standard_normal((3, 3))
        U, sig, Vt = np.linalg.svd(A)
        base = U @ np.diag([3.0, 2.0, 0.0]) @ Vt
        z = (base + 0.1 * RNG.standard_normal((3, 3))).reshape(-1)
        p = s.project(z)
        cone = s.normal_cone(p)
        v = z - p
        if np.linalg.norm(v) > 1e-12:
            v = v / np.linalg.norm(v)
            proj = cone.lineality.T @ (cone.lineality @ v)
            assert np.linalg.norm(v - proj) <= 1e-8


class TestNormalCones:
    def test_sphere_radial_normal(self):
        cone = normal_vectors(NormalConeProbe(Sphere([0, 0], 1.0), [1, 0]))
        assert cone.lineality.shape == (1, 2)
        np.testing.assert_allclose(np.abs(cone.lineality[0]), [1, 0], atol=1e-12)

    def test_hyperplane_normal(self):
        h = Hyperplane([0.0, 2.0], 1.0)
        cone = normal_vectors(NormalConeProbe(h, [3.0, 0.5]))
        np.testing.assert_allclose(np.abs(cone.lineality[0]), [0, 1], atol=1e-12)

    def test_box_corner_cone(self):
        cone = normal_vectors(NormalConeProbe(Box([0, 0], [1, 1]), [1, 1]))
        rays = sorted(map(tuple, cone.rays))
        assert rays == [(0.0, 1.0), (1.0, 0.0)]

    def test_finite_point_full_space(self):
        cone = normal_vectors(NormalConeProbe(FinitePointSet([[0, 0]]), [0, 0]))
        assert cone.full

    def test_fixed_rank_drop(self):
        s = FixedRankMatrices(2, 2, 2)
        with pytest.raises(RankDrop):
            s.normal_cone(np.diag([1.0, 0.0]).reshape(-1))

    def test_fixed_rank_normal_space(self):
        s = FixedRankMatrices(3, 2, 1)
        point = np.outer([1.0, 0, 0], [1.0, 0]).reshape(-1)
        cone = s.normal_cone(point)
        assert cone.lineality.shape == (2, 6)  # (rows - r) * (cols - r)

    def test_probe_rejects_off_set_point(self):
        with pytest.raises(ValueError):
            NormalConeProbe(Sphere([0, 0], 1.0), [2, 0])


class TestTransversality:
    def test_orthogonal_axes(self):
        a = NormalConeProbe(AffineSubspace([0, 0], [[1, 0]]), [0, 0])
        b = NormalConeProbe(AffineSubspace([0, 0], [[0, 1]]), [0, 0])
        assert check_transversality(a, b).transversal

    def test_identical_hyperplanes_degenerate(self):
        h = Hyperplane([0.0, 1.0], 0.0)
        a = NormalConeProbe(h, [1, 0])
        b = NormalConeProbe(h, [1, 0])
        res = check_transversality(a, b)
        assert not res.transversal
        np.testing.assert_allclose(np.abs(res.witness / np.linalg.norm(res.witness)),
                                   [0, 1], atol=1e-9)

    def test_sphere_vs_hyperplane(self):
        a = NormalConeProbe(Sphere([0, 0], 1.0), [1, 0])
        b = NormalConeProbe(Hyperplane([0.0, 1.0], 0.0), [1, 0])
        assert check_transversality(a, b).transversal

    def test_opposing_halfspaces_degenerate(self):
        a = NormalConeProbe(Halfspace([1.0, 0.0], 0.0), [0, 0])
        b = NormalConeProbe(Halfspace([-1.0, 0.0], 0.0), [0, 0])
        res = check_transversality(a, b)
        assert not res.transversal
        w = res.witness / np.linalg.norm(res.witness)
        np.testing.assert_allclose(np.abs(w), [1, 0], atol=1e-9)

    def test_box_corner_vs_halfspace_transversal(self):
        a = NormalConeProbe(Box([0, 0], [1, 1]), [1, 1])
        b = NormalConeProbe(Halfspace([1.0, 0.0], 1.0), [1, 1])
        assert check_transversality(a, b).transversal


class TestJson:
    @pytest.mark.parametrize("s", CONVEX_SETS + NONCONVEX_SETS)
    def test_round_trip(self, s):
        again = set_from_json(s.to_json())
        assert again.to_json() == s.to_json()
        z = ambient_sample(s, np.random.default_rng(1))
        np.testing.assert_allclose(again.project(z), s.project(z))

    def test_missing_type(self):
        with pytest.raises(ValueError, match="type"):
            set_from_json({"center": [0, 0]})

    def test_missing_field_named(self):
        with pytest.raises(ValueError, match="radius"):
            set_from_json({"type": "ball", "center": [0, 0]})
