"""Reuleaux simplices and rugby balls, Euclidean and spherical.

A Reuleaux simplex is the intersection of the unit balls centred at the
``d + 1`` vertices of a unit simplex in ``R^d``; a rugby ball uses only ``d``
of them.  On the sphere ``S^d_r`` the same definitions are read with chord
distance, so a body point is a point of the sphere within chord 1 of every
vertex.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import (
    ArgumentError,
    ClassificationError,
    ConstructionError,
    DimensionError,
    DomainError,
    SamplingError,
)
from .geom_core import (
    DEFAULT_TOL,
    Ball,
    Euclidean,
    Flat,
    PointConfig,
    Sphere,
    Tolerance,
    circumscribed_ball,
    regular_unit_simplex,
    uniform_ball,
    uniform_sphere,
)
from .reports import CheckReport
from .sphere_geom import (
    DiametralSphere,
    SphericalFrame,
    cap_sample,
    min_spherical_ball,
    rho,
)


class Kind(str, Enum):
    SIMPLEX = "simplex"
    RUGBY_BALL = "rugby_ball"


@dataclass(frozen=True)
class ReuleauxBody:
    kind: Kind
    vertices: np.ndarray
    frame: SphericalFrame | None = None
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "kind", Kind(self.kind))
        d = self.dim
        expected = d + 1 if self.kind is Kind.SIMPLEX else d
        if len(v) != expected:
            raise DimensionError(f"a {self.kind.value} in dimension {d} has {expected} vertices, got {len(v)}")
        if self.frame is not None:
            if v.shape[1] != self.frame.ambient_dim:
                raise DimensionError("vertices must be embedding vectors in R^{d+1}")
            if np.any(np.abs(np.linalg.norm(v, axis=1) - self.frame.r) > 1e-9 * max(1, self.frame.r)):
                raise DomainError("vertices must lie on the sphere")
        if len(v) > 1:
            dist = pdist(v)
            if np.max(np.abs(dist - 1.0)) > self.tol.eq_tol:
                raise ArgumentError("vertices must be pairwise at unit distance")

    @property
    def dim(self) -> int:
        return self.frame.d if self.frame is not None else self.vertices.shape[1]

    @property
    def spherical(self) -> bool:
        return self.frame is not None

    def vertex_config(self) -> PointConfig:
        space = Sphere(self.frame.d, self.frame.r) if self.spherical else Euclidean(self.dim)
        return PointConfig(space, self.vertices)

    def contains(self, p) -> bool:
        return bool(self.contains_many(np.atleast_2d(p))[0])

    def contains_many(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if pts.shape[1] != self.vertices.shape[1]:
            raise DimensionError("point dimension does not match the body")
        if self.spherical:
            norms = np.linalg.norm(pts, axis=1)
            if np.any(np.abs(norms - self.frame.r) > 1e-9 * max(1, self.frame.r)):
                raise DomainError("points must lie on the sphere")
        return np.all(cdist(pts, self.vertices) <= 1.0 + self.tol.geom_tol, axis=1)


def _facet_height(d: int) -> float:
    # distance from a vertex of a unit d-simplex to the opposite facet
    return math.sqrt((d + 1) / (2.0 * d))


def reuleaux_simplex(d: int, r: float | None = None, tol: Tolerance = DEFAULT_TOL) -> ReuleauxBody:
    """Regular Reuleaux simplex with ``v_1..v_d`` on the hyperplane ``x_last = 0``.

    The last vertex sits on the positive side of that hyperplane, so the side
    containing it is ``{x_last >= 0}`` in both the Euclidean and the spherical
    case.
    """
    facet = regular_unit_simplex(d, d).points
    if r is None:
        apex = np.zeros(d)
        apex[-1] = _facet_height(d)
        return ReuleauxBody(Kind.SIMPLEX, np.vstack([facet, apex]), tol=tol)
    frame = SphericalFrame(d, r)
    base, b = _spherical_base(d, r)
    y = (r * r - 0.5) / b
    apex = np.zeros(d + 1)
    apex[d - 1] = y
    apex[d] = math.sqrt(r * r - y * y)
    return ReuleauxBody(Kind.SIMPLEX, np.vstack([base, apex]), frame, tol)


def rugby_ball(d: int, r: float | None = None, tol: Tolerance = DEFAULT_TOL) -> ReuleauxBody:
    if r is None:
        return ReuleauxBody(Kind.RUGBY_BALL, regular_unit_simplex(d, d).points, tol=tol)
    base, _ = _spherical_base(d, r)
    return ReuleauxBody(Kind.RUGBY_BALL, base, SphericalFrame(d, r), tol)


def _spherical_base(d: int, r: float):
    # d unit-simplex vertices on S^d_r, all with last coordinate 0
    facet = regular_unit_simplex(d - 1, d).points
    circ = math.sqrt((d - 1) / (2.0 * d))
    if r <= circ:
        raise DomainError(f"a unit simplex on {d} vertices does not fit on a sphere of radius {r}")
    b = math.sqrt(r * r - circ * circ)
    base = np.zeros((d, d + 1))
    base[:, : d - 1] = facet
    base[:, d - 1] = b
    return base, b


def base_hyperplane_normal(body: ReuleauxBody) -> np.ndarray:
    """Unit normal of the hyperplane through ``v_1..v_d``, pointing at ``v_{d+1}``.

    For a rugby ball the orientation is arbitrary but fixed.
    """
    facet = body.vertices[: body.dim]
    if body.spherical:
        n = DiametralSphere.through(facet).normal
        anchor = np.zeros_like(n)
    else:
        anchor = facet.mean(axis=0)
        n = np.linalg.svd(facet - anchor)[2][-1]
    if body.kind is Kind.SIMPLEX:
        if (body.vertices[-1] - anchor) @ n < 0:
            n = -n
    elif n[np.argmax(np.abs(n))] < 0:
        n = -n
    return n


@dataclass(frozen=True)
class Face:
    """Boundary stratum of a body: the vertices at chord distance < 1 plus its carrier sphere."""

    vertex_subset: tuple[int, ...]
    carrier: Ball


def face_carrier(body: ReuleauxBody, vertex_subset) -> Ball:
    """Sphere carrying the face whose strict-distance vertices are ``vertex_subset``.

    It is the intersection of the unit spheres around the complementary
    vertices: centred at their centroid, of radius ``sqrt((m+1)/(2m))`` for
    ``m`` complementary vertices.
    """
    subset = tuple(sorted(set(int(i) for i in vertex_subset)))
    nv = len(body.vertices)
    if any(i < 0 or i >= nv for i in subset):
        raise ArgumentError(f"vertex indices must lie in [0, {nv})")
    complement = [i for i in range(nv) if i not in subset]
    if not complement:
        raise ArgumentError("the full vertex set is not a face")
    if len(complement) > body.dim:
        raise ArgumentError("the unit spheres around every vertex of a simplex do not meet")
    m = len(complement)
    center = body.vertices[complement].mean(axis=0)
    return Ball(center, math.sqrt((m + 1) / (2.0 * m)))


def face_of_boundary_point(body: ReuleauxBody, p) -> Face:
    p = np.asarray(p, dtype=float)
    dist = np.linalg.norm(body.vertices - p, axis=1)
    eq = body.tol.eq_tol
    top = dist.max()
    if top < 1.0 - eq:
        raise ClassificationError(f"point is interior (max vertex distance {top:.3e} below 1)")
    if top > 1.0 + eq:
        raise ClassificationError(f"point is exterior (max vertex distance {top:.3e} above 1)")
    subset = tuple(int(i) for i in np.flatnonzero(dist < 1.0 - eq))
    return Face(subset, face_carrier(body, subset))


def face_subsets(body: ReuleauxBody) -> list[tuple[int, ...]]:
    """Every vertex subset that labels a nonempty face."""
    nv = len(body.vertices)
    lo = 1 if body.kind is Kind.SIMPLEX else 0
    return [s for k in range(lo, nv) for s in itertools.combinations(range(nv), k)]


def _carrier_directions(body: ReuleauxBody, complement) -> np.ndarray:
    # orthonormal basis of the directions orthogonal to the complement's affine hull
    pts = body.vertices[list(complement)]
    dim = body.vertices.shape[1]
    if len(pts) == 1:
        return np.eye(dim)
    _, s, vt = np.linalg.svd(pts[1:] - pts[0])
    rank = int(np.sum(s > 1e-10))
    return vt[rank:]


def ray_exit(body: ReuleauxBody, origin, direction) -> np.ndarray:
    """Where the ray from an interior ``origin`` leaves a Euclidean body."""
    if body.spherical:
        raise DomainError("ray shooting is implemented for Euclidean bodies only")
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    rel = np.asarray(origin, dtype=float) - body.vertices
    b = rel @ u
    c = np.einsum("ij,ij->i", rel, rel) - 1.0
    t = -b + np.sqrt(np.maximum(b * b - c, 0.0))
    return origin + t.min() * u


def sample_body(body: ReuleauxBody, n: int, seed: int = 0, proposal: Ball | None = None) -> np.ndarray:
    """``n`` points uniform in the body by rejection; bit-identical for a fixed seed."""
    pts, _ = _rejection_sample(body, n, np.random.default_rng(seed), proposal)
    return pts


def acceptance_rate(body: ReuleauxBody, n: int, seed: int = 0, proposal: Ball | None = None) -> float:
    _, tried = _rejection_sample(body, n, np.random.default_rng(seed), proposal)
    return n / tried


def default_proposal(body: ReuleauxBody) -> Ball:
    if body.kind is Kind.SIMPLEX:
        return circumscribed_ball(body.vertices)
    return bounding_ball(body)


def bounding_ball(body: ReuleauxBody) -> Ball:
    """A ball around the vertex centroid that provably contains the body.

    For ``x`` within distance 1 of each of ``k`` vertices,
    ``|x - g|^2 = mean_i |x - v_i|^2 - R^2 <= 1 - R^2`` with ``R`` the vertex
    circumradius.
    """
    k = len(body.vertices)
    circ2 = (k - 1) / (2.0 * k)
    return Ball(body.vertices.mean(axis=0), math.sqrt(1.0 - circ2))


def _rejection_sample(body, n, rng, proposal, max_rounds=10_000):
    if n <= 0:
        raise ArgumentError("n must be positive")
    chunks, have, tried = [], 0, 0
    for _ in range(max_rounds):
        m = max(256, 2 * (n - have))
        if body.spherical:
            cand = cap_sample(body.vertices[0], body.frame.phi, m, body.frame, rng)
        else:
            ball = proposal or default_proposal(body)
            cand = ball.center + ball.radius * uniform_ball(m, body.dim, rng)
        keep = body.contains_many(cand)
        tried_here = m
        if have + keep.sum() >= n:
            idx = np.flatnonzero(keep)[: n - have]
            tried_here = int(idx[-1]) + 1
            keep = np.zeros(m, bool)
            keep[idx] = True
        chunks.append(cand[keep])
        have += int(keep.sum())
        tried += tried_here
        if have >= n:
            return np.vstack(chunks), tried
    raise SamplingError(f"rejection sampling produced only {have} of {n} points")


def sample_face(body: ReuleauxBody, vertex_subset, n: int, rng: np.random.Generator, max_rounds=2000) -> np.ndarray:
    """Points of the relatively open face, drawn uniformly from its carrier sphere."""
    if body.spherical:
        raise DomainError("face sampling is implemented for Euclidean bodies only")
    subset = tuple(sorted(vertex_subset))
    carrier = face_carrier(body, subset)
    complement = [i for i in range(len(body.vertices)) if i not in subset]
    basis = _carrier_directions(body, complement)
    eq = body.tol.eq_tol
    out, have = [], 0
    for _ in range(max_rounds):
        g = uniform_sphere(256, len(basis), rng) @ basis
        cand = carrier.center + carrier.radius * g
        if subset:
            ok = np.all(cdist(cand, body.vertices[list(subset)]) < 1.0 - eq, axis=1)
            cand = cand[ok]
        out.append(cand)
        have += len(cand)
        if have >= n:
            return np.vstack(out)[:n]
    raise SamplingError(f"face {subset} rejected every carrier sample")


def sample_boundary(body: ReuleauxBody, n: int, seed: int = 0) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """Boundary points spread over all faces, with the face each was drawn from."""
    rng = np.random.default_rng(seed)
    faces = face_subsets(body)
    picks = rng.integers(len(faces), size=n)
    pts = np.empty((n, body.vertices.shape[1]))
    labels = []
    for fi, face in enumerate(faces):
        idx = np.flatnonzero(picks == fi)
        if len(idx):
            pts[idx] = sample_face(body, face, len(idx), rng)
    labels = [faces[i] for i in picks]
    return pts, labels


def central_projection_check(body: ReuleauxBody, face_vertex_subset=None, samples: int = 1000,
                             seed: int = 0) -> CheckReport:
    """Rays from the centre through an open face of the vertex hull hit the face with the same vertex set."""
    if body.spherical or body.kind is not Kind.SIMPLEX:
        raise DomainError("central projection is checked on Euclidean Reuleaux simplices")
    rng = np.random.default_rng(seed)
    faces = [tuple(sorted(face_vertex_subset))] if face_vertex_subset is not None else face_subsets(body)
    center = body.vertices.mean(axis=0)
    rep = CheckReport("central_projection", details={"faces": len(faces), "closure_hits": 0})
    picks = rng.integers(len(faces), size=samples)
    for fi in picks:
        face = faces[fi]
        w = rng.dirichlet(np.ones(len(face)))
        q = w @ body.vertices[list(face)]
        hit = ray_exit(body, center, q - center)
        got = face_of_boundary_point(body, hit).vertex_subset
        rep.trials += 1
        outward = np.linalg.norm(hit - center) - np.linalg.norm(q - center)
        rep.margin(outward)
        if got != face:
            if set(got) < set(face):
                rep.details["closure_hits"] += 1
            rep.violate({"face": face, "q": q, "hit": hit, "classified": got})
    return rep


def face_carrier_check(body: ReuleauxBody, samples: int = 1000, seed: int = 0) -> CheckReport:
    """Every classified boundary point lies on its face's carrier sphere.

    Boundary points come from two independent sources: rays in uniformly
    random directions (hitting mostly facets) and per-face carrier sampling
    (covering the lower-dimensional faces).
    """
    if body.spherical:
        raise DomainError("carrier check is implemented for Euclidean bodies only")
    rng = np.random.default_rng(seed)
    center = body.vertices.mean(axis=0)
    rays = uniform_sphere(samples // 2, body.dim, rng)
    hits = np.array([ray_exit(body, center, u) for u in rays])
    face_pts, labels = sample_boundary(body, samples - len(hits), seed + 1)
    rep = CheckReport("face_carrier", details={"max_residual": 0.0, "label_mismatches": 0})
    for k, p in enumerate(np.vstack([hits, face_pts])):
        face = face_of_boundary_point(body, p)
        residual = abs(np.linalg.norm(p - face.carrier.center) - face.carrier.radius)
        rep.trials += 1
        rep.details["max_residual"] = max(rep.details["max_residual"], residual)
        rep.margin(1e-9 - residual)
        if residual >= 1e-9:
            rep.violate({"point": p, "face": face.vertex_subset, "residual": residual})
        if k >= len(hits) and face.vertex_subset != labels[k - len(hits)]:
            rep.details["label_mismatches"] += 1
            rep.violate({"point": p, "face": face.vertex_subset, "drawn_from": labels[k - len(hits)]})
    return rep


def section_flat(body: ReuleauxBody, facet_vertices) -> Flat:
    facet = sorted(facet_vertices)
    if len(facet) != body.dim:
        raise ArgumentError(f"a facet of a {body.dim}-dimensional body has {body.dim} vertices")
    return Flat.spanned_by(body.vertices[facet])


def cross_section(body: ReuleauxBody, facet_vertices) -> ReuleauxBody:
    """Intersection of a Reuleaux simplex with the hyperplane through a facet.

    The result is the Reuleaux simplex on the facet vertices, expressed in
    the orthonormal coordinates of :func:`section_flat`.
    """
    if body.spherical or body.kind is not Kind.SIMPLEX:
        raise DomainError("cross sections are taken of Euclidean Reuleaux simplices")
    flat = section_flat(body, facet_vertices)
    local = flat.to_local(body.vertices[sorted(facet_vertices)])
    return ReuleauxBody(Kind.SIMPLEX, local, tol=body.tol)


def cross_section_check(body: ReuleauxBody, facet_vertices, samples: int = 10_000, seed: int = 0) -> CheckReport:
    rng = np.random.default_rng(seed)
    flat = section_flat(body, facet_vertices)
    section = cross_section(body, facet_vertices)
    local = 1.05 * uniform_ball(samples, body.dim - 1, rng)
    local += flat.to_local(body.vertices[sorted(facet_vertices)]).mean(axis=0)
    in_section = section.contains_many(local)
    in_body = body.contains_many(flat.to_ambient(local))
    mismatch = np.flatnonzero(in_section != in_body)
    rep = CheckReport("cross_section", trials=samples,
                      details={"inside": int(in_section.sum()), "agreement": 1 - len(mismatch) / samples})
    rep.worst_margin = 0.0 if len(mismatch) == 0 else -1.0
    if len(mismatch):
        rep.violate({"point": flat.to_ambient(local[mismatch[0]])}, count=len(mismatch))
    return rep


def halfspace_identity_check(simplex: ReuleauxBody, samples: int = 100_000, seed: int = 0) -> CheckReport:
    """On the side of the base hyperplane holding the apex, the simplex and the rugby ball agree."""
    if simplex.kind is not Kind.SIMPLEX:
        raise ArgumentError("expected a Reuleaux simplex")
    rng = np.random.default_rng(seed)
    d = simplex.dim
    theta = ReuleauxBody(Kind.RUGBY_BALL, simplex.vertices[:d], simplex.frame, simplex.tol)
    normal = base_hyperplane_normal(simplex)
    if simplex.spherical:
        origin = np.zeros_like(normal)
        batch = lambda m: cap_sample(simplex.vertices[0], 1.05 * simplex.frame.phi, m, simplex.frame, rng)
    else:
        ball = bounding_ball(theta)
        origin = ball.center
        batch = lambda m: ball.center + 1.05 * ball.radius * uniform_ball(m, d, rng)
    chunks, have = [], 0
    while have < samples:
        cand = batch(2 * (samples - have) + 64)
        cand = cand[(cand - origin) @ normal >= 0]
        chunks.append(cand)
        have += len(cand)
    pts = np.vstack(chunks)[:samples]
    in_delta = simplex.contains_many(pts)
    in_theta = theta.contains_many(pts)
    mismatch = np.flatnonzero(in_delta != in_theta)
    rep = CheckReport("halfspace_identity", trials=samples,
                      details={"inside_both": int((in_delta & in_theta).sum())})
    rep.worst_margin = 0.0 if len(mismatch) == 0 else -1.0
    if len(mismatch):
        rep.violate({"point": pts[mismatch[0]]}, count=len(mismatch))
    return rep


def circumball_check(simplex: ReuleauxBody, samples: int = 100_000, seed: int = 0) -> CheckReport:
    """The body sits inside the vertices' circumscribed ball and touches its sphere only at vertices.

    Volume samples come from the larger :func:`bounding_ball`, so a point
    outside the circumscribed ball would be drawn if one existed.
    """
    if simplex.kind is not Kind.SIMPLEX:
        raise ArgumentError("expected a Reuleaux simplex")
    eq = simplex.tol.eq_tol
    rep = CheckReport("circumball", details={"near_sphere": 0})
    if simplex.spherical:
        f = simplex.frame
        center, radius = min_spherical_ball(simplex.vertices, f)
        pts, _ = _rejection_sample(simplex, samples, np.random.default_rng(seed), None)
        gap = radius - rho(pts, np.broadcast_to(center, pts.shape), f)
        rep.trials = samples
        rep.worst_margin = float(gap.min())
        bad = np.flatnonzero(gap < -simplex.tol.geom_tol)
        if len(bad):
            rep.violate({"point": pts[bad[0]]}, count=len(bad))
        rep.details["cap_radius"] = radius
        return rep
    ball = circumscribed_ball(simplex.vertices)
    pts = sample_body(simplex, samples, seed, proposal=bounding_ball(simplex))
    boundary, _ = sample_boundary(simplex, max(1, samples // 10), seed + 1)
    allpts = np.vstack([pts, boundary])
    gap = ball.radius - np.linalg.norm(allpts - ball.center, axis=1)
    rep.trials = len(allpts)
    rep.worst_margin = float(gap.min())
    outside = np.flatnonzero(gap < -simplex.tol.geom_tol)
    if len(outside):
        rep.violate({"point": allpts[outside[0]]}, count=len(outside))
    near = np.flatnonzero(gap <= eq)
    rep.details["near_sphere"] = len(near)
    if len(near):
        vdist = cdist(allpts[near], simplex.vertices).min(axis=1)
        stray = near[vdist > 1e3 * eq]
        if len(stray):
            rep.violate({"point": allpts[stray[0]], "reason": "touches sphere away from a vertex"},
                        count=len(stray))
    return rep


def arc_midpoint(body: ReuleauxBody, i: int, j: int) -> np.ndarray:
    """Midpoint of the boundary arc joining ``v_i`` and ``v_j``.

    The arc lies on the circle around the centroid ``C`` of the other vertices;
    its midpoint is ``C + s u`` with ``u`` the unit vector from ``C`` to the
    midpoint of ``v_i v_j`` and ``s > 0`` putting it at unit distance from the
    other vertices.
    """
    if body.spherical or body.kind is not Kind.SIMPLEX:
        raise DomainError("arc midpoints are defined here for Euclidean Reuleaux simplices")
    if i == j:
        raise ArgumentError("an arc needs two distinct vertices")
    v = body.vertices
    rest = [k for k in range(len(v)) if k not in (i, j)]
    c = v[rest].mean(axis=0)
    u = (v[i] + v[j]) / 2.0 - c
    u /= np.linalg.norm(u)
    rel = c - v[rest[0]]
    b = rel @ u
    s = -b + math.sqrt(b * b - (rel @ rel - 1.0))
    return c + s * u


@dataclass
class RedBlue:
    red: PointConfig
    blue: PointConfig
    report: dict


def _red_blue_margins(red: np.ndarray, mids: np.ndarray, delta: float) -> tuple[np.ndarray, dict]:
    center = red.mean(axis=0)
    blue = center + (1.0 - delta) * (mids - center)
    bb = pdist(blue).min() if len(blue) > 1 else math.inf
    rb = cdist(red, blue)
    return blue, {
        "min_blue_blue": float(bb),
        "max_red_blue": float(rb.max()),
        "blue_blue_margin": float(bb - 1.0),
        "red_blue_margin": float(1.0 - rb.max()),
        "inside_margin": float(1.0 - rb.max(axis=0).max()),
    }


def red_blue_construction(d: int, delta: float = 1e-3, tol: Tolerance = DEFAULT_TOL) -> RedBlue:
    """Red unit ``d``-simplex and blue near-unit simplex with every red-blue distance below 1.

    Blue points are midpoints of ``(d + 1) // 2`` pairwise disjoint arcs of the
    red Reuleaux simplex (pairs ``{0,1}, {2,3}, ...``), pulled towards the red
    centroid by the factor ``1 - delta``.
    """
    if d < 3:
        raise ArgumentError("the construction needs d >= 3")
    if not (0.0 <= delta < 1.0):
        raise ArgumentError("delta must lie in [0, 1)")
    red = regular_unit_simplex(d, d + 1).points
    body = ReuleauxBody(Kind.SIMPLEX, red, tol=tol)
    ell = (d + 1) // 2
    mids = np.array([arc_midpoint(body, 2 * k, 2 * k + 1) for k in range(ell)])
    blue, margins = _red_blue_margins(red, mids, delta)
    margins.update({"d": d, "delta": delta, "blue_count": ell,
                    "uncontracted_blue_blue": float(pdist(mids).min())})
    eq = tol.eq_tol
    failing = [k for k in ("blue_blue_margin", "red_blue_margin", "inside_margin") if margins[k] <= eq]
    margins["passed"] = not failing
    if failing:
        raise ConstructionError(f"margin check failed: {', '.join(failing)}", margins)
    return RedBlue(PointConfig(Euclidean(d), red), PointConfig(Euclidean(d), blue), margins)


def max_contraction(d: int, iterations: int = 200) -> float:
    """Largest contraction for which the blue simplex keeps all sides above 1 (bisection)."""
    red = regular_unit_simplex(d, d + 1).points
    body = ReuleauxBody(Kind.SIMPLEX, red)
    mids = np.array([arc_midpoint(body, 2 * k, 2 * k + 1) for k in range((d + 1) // 2)])

    def margin(delta):
        _, m = _red_blue_margins(red, mids, delta)
        return min(m["blue_blue_margin"], m["red_blue_margin"])

    lo, hi = 1e-6, 1.0
    if margin(lo) <= 0:
        raise ConstructionError("no admissible contraction", {"d": d})
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if margin(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return lo
