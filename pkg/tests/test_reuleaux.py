import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from oracles import arc_midpoint_by_search, opposite_arc_midpoint_distance, reuleaux_tetrahedron_volume, tetrahedron
from schurlab.errors import ArgumentError, ClassificationError, ConstructionError, DimensionError
from schurlab.geom_core import circumscribed_ball
from schurlab.reuleaux import (
    Kind,
    ReuleauxBody,
    acceptance_rate,
    arc_midpoint,
    base_hyperplane_normal,
    central_projection_check,
    circumball_check,
    cross_section,
    cross_section_check,
    face_carrier,
    face_carrier_check,
    face_of_boundary_point,
    face_subsets,
    halfspace_identity_check,
    max_contraction,
    ray_exit,
    red_blue_construction,
    reuleaux_simplex,
    rugby_ball,
    sample_body,
    sample_boundary,
)

DIMS = [3, 4, 5]


class TestConstruction:
    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_simplex_is_facet_aligned(self, d):
        body = reuleaux_simplex(d)
        assert np.allclose(body.vertices[:d, -1], 0.0)
        assert body.vertices[d, -1] > 0
        assert np.allclose(base_hyperplane_normal(body), np.eye(d)[-1])

    @pytest.mark.parametrize("r", [0.75, 1.0, 2.0])
    def test_spherical_bodies(self, r):
        body = reuleaux_simplex(3, r)
        assert np.allclose(np.linalg.norm(body.vertices, axis=1), r)
        assert rugby_ball(3, r).spherical

    def test_vertex_count_checked(self):
        with pytest.raises(DimensionError):
            ReuleauxBody(Kind.SIMPLEX, tetrahedron()[:3])

    def test_non_unit_rejected(self):
        with pytest.raises(ArgumentError):
            ReuleauxBody(Kind.SIMPLEX, 2 * tetrahedron())


class TestContains:
    def test_examples(self):
        body = reuleaux_simplex(3)
        v = body.vertices
        assert all(body.contains(p) for p in v)
        assert body.contains(v.mean(axis=0))
        out = v[0] - v.mean(axis=0)
        assert not body.contains(v[0] + 1.01 * out / np.linalg.norm(out))

    def test_spherical_points_must_be_on_sphere(self):
        with pytest.raises(Exception):
            reuleaux_simplex(3, 1.0).contains(np.zeros(4))


class TestFaces:
    def test_vertex_face(self):
        body = reuleaux_simplex(3)
        face = face_of_boundary_point(body, body.vertices[2])
        assert face.vertex_subset == (2,)
        # the carrier of a bare vertex is the sphere through the other three unit spheres' meet
        assert face.carrier.radius == pytest.approx(math.sqrt(4 / 6))

    def test_arc_midpoint_face(self):
        body = reuleaux_simplex(3)
        assert face_of_boundary_point(body, arc_midpoint(body, 0, 1)).vertex_subset == (0, 1)

    def test_rugby_apex_has_empty_face(self):
        theta = rugby_ball(3)
        apex = np.array([0.0, 0.0, math.sqrt(4 / 6)])
        face = face_of_boundary_point(theta, apex)
        assert face.vertex_subset == ()
        assert np.linalg.norm(apex - face.carrier.center) == pytest.approx(face.carrier.radius)
        assert () in face_subsets(theta) and () not in face_subsets(reuleaux_simplex(3))

    def test_interior_and_exterior_rejected(self):
        body = reuleaux_simplex(3)
        with pytest.raises(ClassificationError):
            face_of_boundary_point(body, body.vertices.mean(axis=0))
        with pytest.raises(ClassificationError):
            face_of_boundary_point(body, 3 * body.vertices[0])

    def test_carrier_examples(self):
        body = reuleaux_simplex(3)
        arc = face_carrier(body, (0, 1))
        assert arc.radius == pytest.approx(math.sqrt(3) / 2)
        facet = face_carrier(body, (0, 1, 2))
        assert facet.radius == 1.0
        assert np.allclose(facet.center, body.vertices[3])
        with pytest.raises(ArgumentError):
            face_carrier(body, (0, 1, 2, 3))
        with pytest.raises(ArgumentError):
            face_carrier(body, (7,))

    @pytest.mark.parametrize("d", DIMS)
    def test_sampled_faces_sit_on_carriers(self, d):
        body = reuleaux_simplex(d)
        pts, labels = sample_boundary(body, 300, seed=d)
        for p, lab in zip(pts, labels):
            face = face_of_boundary_point(body, p)
            assert face.vertex_subset == lab
            assert abs(np.linalg.norm(p - face.carrier.center) - face.carrier.radius) < 1e-9

    @pytest.mark.parametrize("d", DIMS)
    def test_face_carrier_check(self, d):
        rep = face_carrier_check(reuleaux_simplex(d), 400, seed=1)
        assert rep.passed and rep.details["max_residual"] < 1e-9

    def test_central_projection_of_face_centroids(self):
        body = reuleaux_simplex(3)
        center = body.vertices.mean(axis=0)
        for face in face_subsets(body):
            q = body.vertices[list(face)].mean(axis=0)
            hit = ray_exit(body, center, q - center)
            assert face_of_boundary_point(body, hit).vertex_subset == face

    def test_central_projection_near_relative_boundary(self, rng):
        # q close to an edge of a triangle face: the hit lands in the closure of the face
        body = reuleaux_simplex(3)
        center = body.vertices.mean(axis=0)
        v = body.vertices
        q = 0.5 * (v[0] + v[1]) * (1 - 1e-6) + 1e-6 * v[2]
        got = face_of_boundary_point(body, ray_exit(body, center, q - center)).vertex_subset
        assert set(got) <= {0, 1, 2}

    @pytest.mark.parametrize("d", DIMS)
    def test_central_projection_check(self, d):
        rep = central_projection_check(reuleaux_simplex(d), samples=300, seed=d)
        assert rep.passed and rep.trials == 300


class TestSections:
    def test_section_of_tetrahedron_is_triangle(self):
        body = reuleaux_simplex(3)
        sec = cross_section(body, (0, 1, 2))
        assert sec.dim == 2 and len(sec.vertices) == 3

    @pytest.mark.parametrize("d", DIMS)
    def test_agreement(self, d):
        rep = cross_section_check(reuleaux_simplex(d), tuple(range(1, d + 1)), 2000, seed=0)
        assert rep.passed and rep.details["agreement"] == 1.0

    def test_halfspace_examples(self):
        body = reuleaux_simplex(3)
        theta = rugby_ball(3)
        apex = np.array([0.0, 0.0, math.sqrt(4 / 6)])
        for p in (body.vertices[3], apex):
            assert body.contains(p) and theta.contains(p)

    @pytest.mark.parametrize("d", DIMS)
    def test_halfspace_identity(self, d):
        assert halfspace_identity_check(reuleaux_simplex(d), 5000, seed=3).passed

    @pytest.mark.parametrize("r", [0.75, 1.0, 2.0])
    def test_halfspace_identity_spherical(self, r):
        assert halfspace_identity_check(reuleaux_simplex(3, r), 5000, seed=3).passed


class TestCircumball:
    def test_examples(self):
        body = reuleaux_simplex(4)
        ball = circumscribed_ball(body.vertices)
        assert ball.radius - np.linalg.norm(body.vertices.mean(axis=0) - ball.center) == pytest.approx(ball.radius)
        assert np.allclose(np.linalg.norm(body.vertices - ball.center, axis=1), ball.radius)

    @pytest.mark.parametrize("d", DIMS)
    def test_check(self, d):
        rep = circumball_check(reuleaux_simplex(d), 5000, seed=2)
        assert rep.passed and rep.worst_margin >= -1e-12

    @pytest.mark.parametrize("r", [0.75, 1.0, 2.0])
    def test_spherical(self, r):
        assert circumball_check(reuleaux_simplex(3, r), 3000, seed=2).passed


class TestArcMidpoints:
    def test_opposite_midpoints_closed_form(self):
        body = reuleaux_simplex(3)
        a, b = arc_midpoint(body, 0, 1), arc_midpoint(body, 2, 3)
        assert np.linalg.norm(a - b) == pytest.approx(math.sqrt(3) - math.sqrt(2) / 2, abs=1e-12)
        assert opposite_arc_midpoint_distance() == pytest.approx(math.sqrt(3) - math.sqrt(2) / 2, abs=1e-14)

    def test_search_oracle(self):
        v = tetrahedron()
        body = ReuleauxBody(Kind.SIMPLEX, v)
        for i, j in [(0, 1), (2, 3), (1, 3)]:
            assert np.allclose(arc_midpoint(body, i, j), arc_midpoint_by_search(v, i, j), atol=1e-9)

    def test_brute_force_minimisation_oracle(self):
        # the two midpoints maximise their distance over pairs of arc points
        v = tetrahedron()

        def arc_point(t, i, j):
            rest = [k for k in range(4) if k not in (i, j)]
            a, b = v[rest]
            c = 0.5 * (a + b)
            basis = np.linalg.svd((b - a)[None, :])[2][1:]
            return c + math.sqrt(3) / 2 * (math.cos(t) * basis[0] + math.sin(t) * basis[1])

        body = ReuleauxBody(Kind.SIMPLEX, v)
        mid1 = arc_midpoint(body, 0, 1)
        rest = v[[2, 3]]
        basis = np.linalg.svd((rest[1] - rest[0])[None, :])[2][1:]
        t0 = math.atan2(*((mid1 - rest.mean(axis=0)) @ basis.T)[::-1])

        def neg_dist(x):
            p, q = arc_point(x[0], 0, 1), arc_point(x[1], 2, 3)
            pen = sum(max(0.0, np.linalg.norm(p - v[k]) - 1) for k in (0, 1))
            pen += sum(max(0.0, np.linalg.norm(q - v[k]) - 1) for k in (2, 3))
            return -np.linalg.norm(p - q) + 100 * pen

        grid = np.linspace(-0.6, 0.6, 61)
        best = min(((a, b) for a in grid for b in grid),
                   key=lambda x: neg_dist((t0 + x[0], x[1] + math.pi)))
        res = minimize(neg_dist, [t0 + best[0], best[1] + math.pi], method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14})
        assert -res.fun == pytest.approx(math.sqrt(3) - math.sqrt(2) / 2, abs=1e-7)

    @pytest.mark.parametrize("d", [3, 4, 6])
    def test_unit_distance_to_others(self, d):
        body = reuleaux_simplex(d)
        p = arc_midpoint(body, 0, 1)
        dist = np.linalg.norm(body.vertices - p, axis=1)
        assert np.allclose(dist[2:], 1.0, atol=1e-12)
        assert dist[0] == pytest.approx(dist[1]) and dist[0] < 1


class TestRedBlue:
    @pytest.mark.parametrize("d", range(3, 9))
    def test_margins(self, d):
        rb = red_blue_construction(d, 1e-3)
        rep = rb.report
        assert rep["blue_blue_margin"] > 0 and rep["red_blue_margin"] > 0 and rep["inside_margin"] > 0
        assert len(rb.blue) == (d + 1) // 2

    def test_d3_distance(self):
        rb = red_blue_construction(3, 1e-3)
        assert rb.report["min_blue_blue"] == pytest.approx((math.sqrt(3) - math.sqrt(2) / 2) * (1 - 1e-3), abs=1e-12)

    def test_uncontracted_rejected(self):
        with pytest.raises(ConstructionError) as err:
            red_blue_construction(3, 0.0)
        assert err.value.margins["red_blue_margin"] == pytest.approx(0.0, abs=1e-12)

    def test_too_much_contraction(self):
        dmax = max_contraction(3)
        assert 0 < dmax < 0.1
        red_blue_construction(3, 0.9 * dmax)
        with pytest.raises(ConstructionError):
            red_blue_construction(3, 1.1 * dmax)

    def test_small_d(self):
        with pytest.raises(ArgumentError):
            red_blue_construction(2)


class TestSampling:
    def test_deterministic(self):
        body = reuleaux_simplex(3)
        a, b = sample_body(body, 500, seed=7), sample_body(body, 500, seed=7)
        assert a.tobytes() == b.tobytes()
        assert body.contains_many(a).all()

    @pytest.mark.parametrize("r", [0.75, 2.0])
    def test_spherical(self, r):
        body = reuleaux_simplex(3, r)
        pts = sample_body(body, 300, seed=1)
        assert body.contains_many(pts).all()

    def test_acceptance_rate_matches_volume(self):
        body = reuleaux_simplex(3)
        n = 20000
        rate = acceptance_rate(body, n, seed=5)
        ball = circumscribed_ball(body.vertices)
        expected = reuleaux_tetrahedron_volume() / (4 / 3 * math.pi * ball.radius ** 3)
        tried = n / rate
        sigma = math.sqrt(expected * (1 - expected) / tried)
        assert abs(rate - expected) < 3 * sigma

    @settings(max_examples=25)
    @given(st.integers(0, 2**31 - 1))
    def test_boundary_points_are_on_boundary(self, seed):
        body = reuleaux_simplex(4)
        pts, _ = sample_boundary(body, 20, seed)
        top = np.linalg.norm(pts[:, None] - body.vertices[None], axis=2).max(axis=1)
        assert np.allclose(top, 1.0, atol=1e-9)
