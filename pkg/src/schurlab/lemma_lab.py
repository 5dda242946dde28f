"""Randomized checks of the distance lemmas behind the shared-vertex theorem.

Every ``verify_*`` function draws its instances from a seeded generator and
returns a :class:`CheckReport`.  Margins are signed so that a positive value
means the inequality held; margins within ``eq_tol`` of zero are equality
cases and are tallied separately, never as violations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ArgumentError, CaseError, DomainError, ProcedureError
from .geom_core import (
    DEFAULT_TOL,
    Tolerance,
    barycentric,
    random_rotation,
    regular_unit_simplex,
    uniform_ball,
    uniform_sphere,
)
from .reports import CheckReport
from .reuleaux import Kind, ReuleauxBody, reuleaux_simplex, rugby_ball, sample_face
from .sphere_geom import DiametralSphere, SphericalFrame, cap_sample, project, rho, to_sphere

LemmaReport = CheckReport

HALF_SQRT2 = 1.0 / math.sqrt(2.0)


# -- sampling helpers -------------------------------------------------------

def _ray_exit_many(vertices, origin, dirs, plane_normal=None, plane_point=None):
    """Exit points of rays from ``origin`` out of the intersection of unit balls.

    With ``plane_normal`` the body is further cut to ``(x - plane_point) . n >= 0``.
    """
    rel = origin - vertices
    b = dirs @ rel.T
    c = np.einsum("ij,ij->i", rel, rel) - 1.0
    t = (-b + np.sqrt(np.maximum(b * b - c, 0.0))).min(axis=1)
    if plane_normal is not None:
        s = dirs @ plane_normal
        h = (origin - plane_point) @ plane_normal
        with np.errstate(divide="ignore"):
            tp = np.where(s < 0, -h / s, np.inf)
        t = np.minimum(t, tp)
    return origin + t[:, None] * dirs


def _sample_half_body(d: int, n: int, rng, boundary_frac: float = 0.5) -> np.ndarray:
    """Points of the upper half of the facet-aligned Reuleaux simplex.

    A fraction are uniform in volume, the rest on the boundary (rays from an
    interior point), so that near-extremal pairs are well represented.
    """
    body = reuleaux_simplex(d)
    v = body.vertices
    nb = int(round(boundary_frac * n))
    radius = math.sqrt((d + 1) / (2.0 * d))
    vol = []
    have = 0
    while have < n - nb:
        cand = radius * uniform_ball(2 * (n - nb - have) + 64, d, rng)
        cand[:, -1] = np.abs(cand[:, -1])
        cand = cand[body.contains_many(cand)]
        vol.append(cand)
        have += len(cand)
    vol = np.vstack(vol)[: n - nb] if vol else np.empty((0, d))
    origin = np.zeros(d)
    origin[-1] = v[-1, -1] / 3.0
    normal = np.zeros(d)
    normal[-1] = 1.0
    bnd = _ray_exit_many(v, origin, uniform_sphere(nb, d, rng), normal, np.zeros(d))
    pts = np.vstack([vol, bnd])
    return pts[rng.permutation(len(pts))]


def _sample_reuleaux(vertices, n, rng, boundary_frac=0.5):
    """Volume and boundary points of the Reuleaux simplex on ``vertices``."""
    k, dim = vertices.shape
    center = vertices.mean(axis=0)
    radius = math.sqrt(1.0 - (k - 1) / (2.0 * k))
    nb = int(round(boundary_frac * n))
    chunks, have = [], 0
    while have < n - nb:
        cand = center + radius * uniform_ball(2 * (n - nb - have) + 64, dim, rng)
        cand = cand[np.all(cdist(cand, vertices) <= 1.0, axis=1)]
        chunks.append(cand)
        have += len(cand)
    vol = np.vstack(chunks)[: n - nb] if chunks else np.empty((0, dim))
    bnd = _ray_exit_many(vertices, center, uniform_sphere(nb, dim, rng))
    pts = np.vstack([vol, bnd])
    return pts[rng.permutation(len(pts))]


def _equality_probes(body, m, rng):
    """Pairs ``(v_i, w)`` in the upper half at distance exactly 1.

    ``v_i`` is a vertex.  For the apex ``w`` is a base vertex; for a base
    vertex ``w`` is drawn from the opposite face of the base cross-section.
    """
    d = body.dim
    base = ReuleauxBody(Kind.SIMPLEX, body.vertices[:d, : d - 1])
    idx = rng.integers(d + 1, size=m)
    v = body.vertices[idx]
    w = np.zeros_like(v)
    apex = np.flatnonzero(idx == d)
    w[apex] = body.vertices[rng.integers(d, size=len(apex))]
    for i in range(d):
        sel = np.flatnonzero(idx == i)
        if len(sel):
            face = tuple(j for j in range(d) if j != i)
            w[sel, : d - 1] = sample_face(base, face, len(sel), rng)
    return v, w


def _min_vertex_distance(pts, vertices):
    return cdist(pts, vertices).min(axis=1)


# -- Lemma: two points above the base, one projecting into the base simplex ---

def verify_lemimp(d: int, trials: int = 100_000, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """``|v - w| <= 1`` for ``v, w`` in the upper half-body when ``v`` projects into the base simplex.

    The inequality is strict when the projection of ``v`` is interior to the
    base simplex and neither point is a vertex; the worst margin over those
    trials is reported as ``worst_strict_margin``.
    """
    if d < 3:
        raise ArgumentError("d must be at least 3")
    rng = np.random.default_rng(seed)
    body = reuleaux_simplex(d)
    facet = body.vertices[:d, : d - 1]
    eq = tol.eq_tol
    rep = CheckReport(f"lemimp[d={d}]", details={
        "equality_vertex": 0, "equality_boundary": 0, "strict_trials": 0,
        "worst_strict_margin": math.inf, "strict_near_equal": 0,
    })
    v_pool = np.empty((0, d))
    while len(v_pool) < trials:
        cand = _sample_half_body(d, trials, rng)
        bary = barycentric(cand[:, : d - 1], facet)
        v_pool = np.vstack([v_pool, cand[bary.min(axis=1) >= 0]])
    v = v_pool[:trials]
    w = _sample_half_body(d, trials, rng)
    n_probe = max(1, trials // 100)
    v[:n_probe], w[:n_probe] = _equality_probes(body, n_probe, rng)
    dist = np.linalg.norm(v - w, axis=1)
    margin = 1.0 - dist
    rep.trials = trials
    rep.worst_margin = float(margin.min())
    bad = np.flatnonzero(margin < -eq)
    if len(bad):
        rep.violate({"v": v[bad[0]], "w": w[bad[0]], "distance": dist[bad[0]]}, count=len(bad))
    bary_v = barycentric(v[:, : d - 1], facet).min(axis=1)
    vertexish = (_min_vertex_distance(v, body.vertices) <= eq) | (_min_vertex_distance(w, body.vertices) <= eq)
    strict = (bary_v > eq) & ~vertexish
    rep.details["strict_trials"] = int(strict.sum())
    if strict.any():
        rep.details["worst_strict_margin"] = float(margin[strict].min())
    near = np.abs(margin) <= eq
    rep.details["equality_vertex"] = int((near & vertexish).sum())
    rep.details["equality_boundary"] = int((near & ~vertexish & ~strict).sum())
    rep.details["strict_near_equal"] = int((near & strict).sum())
    return rep


# -- Lemma: a point of the base simplex is farther from some vertex than from w

def verify_lemrelo(d: int, trials: int = 100_000, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    """``max_i |v_i - v'| >= |w - v'|`` for ``v'`` in the vertex hull and ``w`` in the body.

    The body is the Reuleaux simplex on ``d`` vertices in ``R^{d-1}``.
    """
    if d < 3:
        raise ArgumentError("d must be at least 3")
    rng = np.random.default_rng(seed)
    verts = regular_unit_simplex(d - 1, d).points
    eq = tol.eq_tol
    weights = rng.dirichlet(np.ones(d), size=trials)
    on_edge = rng.random(trials) < 0.3
    drop = rng.integers(d, size=trials)
    weights[on_edge, drop[on_edge]] = 0.0
    weights /= weights.sum(axis=1, keepdims=True)
    vp = weights @ verts
    w = _sample_reuleaux(verts, trials, rng)
    keep = (_min_vertex_distance(vp, verts) > eq) & (_min_vertex_distance(w, verts) > eq)
    vp, w, weights = vp[keep], w[keep], weights[keep]
    far = cdist(vp, verts).max(axis=1)
    margin = far - np.linalg.norm(w - vp, axis=1)
    strict = weights.min(axis=1) > eq
    rep = CheckReport(f"lemrelo[d={d}]", trials=len(vp), details={
        "strict_trials": int(strict.sum()),
        "worst_strict_margin": float(margin[strict].min()) if strict.any() else None,
        "near_equal_on_hull_boundary": int((np.abs(margin) <= eq)[~strict].sum()),
        "strict_near_equal": int((np.abs(margin) <= eq)[strict].sum()),
    })
    rep.worst_margin = float(margin.min())
    bad = np.flatnonzero(margin < -eq)
    if len(bad):
        rep.violate({"v_prime": vp[bad[0]], "w": w[bad[0]]}, count=len(bad))
    return rep


# -- Lemma: moving a point of an open spherical region to its boundary --------

def _boundary_farthest(center, axis, alpha, tangent_x, radius_vec_fn):
    # unit b orthogonal to the cap axis minimising <tangent_x, b>
    perp = tangent_x - (tangent_x @ axis) * axis
    norm = np.linalg.norm(perp)
    if norm < 1e-14:
        return None
    b = -perp / norm
    return radius_vec_fn(math.cos(alpha) * axis + math.sin(alpha) * b)


def farthest_boundary_point(x, center, axis, alpha: float, radius: float, spherical: bool = False) -> np.ndarray:
    """Point of the boundary of the cap region farthest from ``x``.

    The region is the part of the sphere of the given ``radius`` around
    ``center`` whose direction lies within ``alpha`` of ``axis``.  With
    ``spherical`` everything lives on the unit sphere: ``radius`` is an angle
    and ``axis`` a tangent vector at ``center``.
    """
    x, center, axis = (np.asarray(a, dtype=float) for a in (x, center, axis))
    if spherical:
        tangent_x = x - (x @ center) * center
        point_at = lambda e: math.cos(radius) * center + math.sin(radius) * e
    else:
        tangent_x = x - center
        point_at = lambda e: center + radius * e
    y = _boundary_farthest(center, axis, alpha, tangent_x, point_at)
    if y is None:
        basis = np.linalg.svd(np.vstack([axis, center]) if spherical else axis[None, :])[2]
        y = point_at(math.cos(alpha) * axis + math.sin(alpha) * basis[-1])
    return y


def verify_lemred(euclidean: bool = True, trials: int = 10_000, seed: int = 0,
                  tol: Tolerance = DEFAULT_TOL, d: int | None = None) -> CheckReport:
    """For ``Y`` in an open cap region ``Omega`` of a sphere centred on ``omega``, some boundary point is farther from ``X``.

    ``Omega`` is the set of points of the sphere ``Upsilon`` (centre ``C`` on
    the hyperplane ``omega``) whose direction from ``C`` is within ``alpha`` of
    an axis ``a``, with the cap kept inside ``omega+``.  The farthest boundary
    point is found in closed form and cross-checked against 32 sampled
    boundary points.  In the spherical variant every object lives on the unit
    sphere and distances are angles.  ``d`` fixes the dimension; by default
    each trial draws it from 2..5.
    """
    if d is not None and d < 2:
        raise ArgumentError("need d >= 2")
    rng = np.random.default_rng(seed)
    eq = tol.eq_tol
    name = ("lemred[euclidean]" if euclidean else "lemred[spherical]") + ("" if d is None else f"[d={d}]")
    rep = CheckReport(name, details={"equality_center": 0, "strict_trials": 0,
                                     "worst_strict_margin": math.inf, "search_disagreements": 0})
    for _ in range(trials):
        dim = int(rng.integers(2, 6)) if d is None else d
        if euclidean:
            center = rng.standard_normal(dim)
            normal = uniform_sphere(1, dim, rng)[0]
            tangent_basis = np.eye(dim)
        else:
            center = uniform_sphere(1, dim + 1, rng)[0]
            q = np.linalg.svd(center[None, :])[2][1:]
            tangent_basis = q
            normal = uniform_sphere(1, dim, rng)[0] @ q
        axis = uniform_sphere(1, tangent_basis.shape[0], rng)[0] @ tangent_basis
        if axis @ normal < 0:
            axis = axis - 2 * (axis @ normal) * normal
        tilt = math.acos(min(1.0, axis @ normal))
        alpha = rng.uniform(0.02, 1.0) * (math.pi / 2 - tilt)
        radius = rng.uniform(0.2, 2.0) if euclidean else rng.uniform(0.05, 1.5)

        # uniform direction inside the open cap of tangent directions around axis
        f_dir = SphericalFrame(tangent_basis.shape[0] - 1, 1.0)
        e = cap_sample(tangent_basis @ axis, alpha, 1, f_dir, rng)[0] @ tangent_basis
        e /= np.linalg.norm(e)

        if euclidean:
            point_at = lambda direction: center + radius * direction
        else:
            point_at = lambda direction: math.cos(radius) * center + math.sin(radius) * direction
        y = point_at(e)

        at_center = rng.random() < 0.05
        if at_center:
            x = center.copy()
        elif euclidean:
            z = rng.standard_normal(dim) * rng.uniform(0.1, 3.0)
            if z @ normal < 0:
                z -= 2 * (z @ normal) * normal
            x = center + z
        else:
            x = uniform_sphere(1, dim + 1, rng)[0]
            if x @ normal < 0:
                x -= 2 * (x @ normal) * normal
        dist = (lambda p, q: float(np.linalg.norm(p - q))) if euclidean else (
            lambda p, q: 2.0 * math.asin(min(1.0, np.linalg.norm(p - q) / 2.0)))
        tangent_x = x - center if euclidean else x - (x @ center) * center
        y_best = _boundary_farthest(center, axis, alpha, tangent_x, point_at)
        if y_best is None:
            # X on the line through C and the axis (or X = C): any boundary point
            y_best = point_at(math.cos(alpha) * axis + math.sin(alpha) * _any_perp(axis, tangent_basis))
        margin = dist(x, y_best) - dist(x, y)

        probes = _boundary_probes(axis, alpha, tangent_basis, rng, 32)
        sampled = max(dist(x, point_at(p)) for p in probes) if len(probes) else -math.inf
        if sampled > dist(x, y_best) + 1e-12:
            rep.details["search_disagreements"] += 1
            rep.violate({"x": x, "y": y, "reason": "sampled boundary point beats closed form"})

        rep.trials += 1
        if at_center:
            if abs(margin) <= eq:
                rep.details["equality_center"] += 1
            else:
                rep.violate({"x": x, "y": y, "y_prime": y_best, "margin": margin})
            continue
        rep.details["strict_trials"] += 1
        rep.margin(margin)
        rep.details["worst_strict_margin"] = min(rep.details["worst_strict_margin"], margin)
        if margin < -eq:
            rep.violate({"x": x, "y": y, "y_prime": y_best, "margin": margin})
    return rep


def _any_perp(axis, basis):
    for row in basis:
        p = row - (row @ axis) * axis
        if np.linalg.norm(p) > 1e-6:
            return p / np.linalg.norm(p)
    raise DomainError("no perpendicular direction")


def _boundary_probes(axis, alpha, basis, rng, m):
    if basis.shape[0] < 2:
        return np.empty((0, axis.size))
    g = rng.standard_normal((m, basis.shape[0])) @ basis
    g -= np.outer(g @ axis, axis)
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return math.cos(alpha) * axis + math.sin(alpha) * g


# -- Lemma: the intersection sphere keeps radius above 1/sqrt(2) -------------

@dataclass(frozen=True)
class LemradValues:
    b: float
    a: float
    r_omega: float
    identity_residual: float


def lemrad_closed_form(r: float, k: int) -> LemradValues:
    """Distances for a unit simplex on ``k`` vertices inscribed in ``S^d_r``.

    ``b`` is the distance from the sphere centre to the simplex centre, ``a``
    the distance from the simplex centre to the centre of the intersection
    sphere ``Omega`` and ``r_omega`` its radius.  Equating
    ``r^2 - (b - a)^2`` with ``(k+1)/(2k) - a^2`` gives ``a = 1 / (2 k b)``.
    """
    if not r > HALF_SQRT2:
        raise DomainError(f"radius must exceed 1/sqrt(2), got {r}")
    if k < 2:
        raise DomainError("k must be at least 2")
    circ2 = (k - 1) / (2.0 * k)
    b = math.sqrt(r * r - circ2)
    a = 1.0 / (2.0 * k * b)
    r_omega = math.sqrt((k + 1) / (2.0 * k) - a * a)
    identity = 2.0 * r_omega ** 2 - (1.0 + 2.0 * a * (b - a))
    return LemradValues(b, a, r_omega, identity)


def intersection_sphere(vertices, r: float) -> tuple[np.ndarray, float]:
    """Centre and radius of ``{x : |x| = r, |x - v_i| = 1 for all i}`` by linear algebra.

    Subtracting the sphere equations leaves ``<x, v_i> = r^2 - 1/2``; the
    centre is the least-norm solution of that system.
    """
    v = np.asarray(vertices, dtype=float)
    rhs = np.full(len(v), r * r - 0.5)
    center = np.linalg.lstsq(v, rhs, rcond=None)[0]
    rad2 = r * r - center @ center
    if rad2 < 0:
        raise DomainError("the spheres do not meet")
    return center, math.sqrt(rad2)


def place_unit_simplex_on_sphere(k: int, d: int, r: float, rng) -> np.ndarray:
    """Random unit simplex on ``k`` vertices inscribed in ``S^d_r`` (embedded in ``R^{d+1}``)."""
    if k > d + 1:
        raise DomainError("too many vertices for the sphere")
    simplex = regular_unit_simplex(k - 1, k).points if k > 1 else np.zeros((1, 1))
    circ = math.sqrt((k - 1) / (2.0 * k))
    if r < circ:
        raise DomainError("sphere too small for the simplex")
    pts = np.zeros((k, d + 1))
    pts[:, : simplex.shape[1]] = simplex
    pts[:, k - 1] = math.sqrt(r * r - circ * circ)
    return pts @ random_rotation(d + 1, rng).T


def lemrad_geometric_check(r: float, k: int, d: int, trials: int = 10, seed: int = 0) -> CheckReport:
    """Measured ``(b, a, r_omega)`` of random inscribed simplices against the closed form."""
    if k > d:
        raise ArgumentError("need k <= d for the intersection to be a sphere")
    rng = np.random.default_rng(seed)
    closed = lemrad_closed_form(r, k)
    rep = CheckReport(f"lemrad[r={r},k={k},d={d}]", details={"max_abs_error": 0.0, "r_omega": closed.r_omega})
    for _ in range(trials):
        v = place_unit_simplex_on_sphere(k, d, r, rng)
        center, r_omega = intersection_sphere(v, r)
        g = v.mean(axis=0)
        measured = (np.linalg.norm(g), np.linalg.norm(g - center), r_omega)
        err = max(abs(measured[0] - closed.b), abs(measured[1] - closed.a), abs(measured[2] - closed.r_omega))
        # a point of Omega must sit on the sphere and at unit distance from the vertices
        null = np.linalg.svd(v)[2][k:]
        p = center + r_omega * (uniform_sphere(1, len(null), rng)[0] @ null)
        err = max(err, abs(np.linalg.norm(p) - r), float(np.max(np.abs(np.linalg.norm(v - p, axis=1) - 1.0))))
        rep.trials += 1
        rep.details["max_abs_error"] = max(rep.details["max_abs_error"], err)
        rep.margin(min(1e-9 - err, r_omega - HALF_SQRT2))
        if err >= 1e-9 or r_omega <= HALF_SQRT2:
            rep.violate({"vertices": v, "measured": measured, "closed": closed.__dict__})
    return rep


# -- rotation procedure -------------------------------------------------------

@dataclass
class RotationOutcome:
    event: str
    theta: float
    v_prime: np.ndarray
    witness_index: int
    residual: float
    log: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        from .reports import jsonable

        return jsonable({"event": self.event, "theta": self.theta, "v_prime": self.v_prime,
                         "witness_index": self.witness_index, "residual": self.residual, "log": self.log})


UNIT_DISTANCE = "unit_distance"
HYPERPLANE_HIT = "hyperplane_hit"


class _Rotation:
    """Rotation of ``v_1`` about the flat through ``v_2..v_d``, towards the far side of the base."""

    def __init__(self, simplex, toward):
        k1 = np.asarray(simplex, dtype=float)
        self.k1 = k1
        self.d = k1.shape[1]
        self.c = k1[1:].mean(axis=0)
        self.o = k1.mean(axis=0)
        n = np.linalg.svd(k1 - self.o)[2][-1]
        self.n = n if (toward - self.o) @ n >= 0 else -n
        arm = k1[0] - self.c
        self.h = float(np.linalg.norm(arm))
        self.e1 = arm / self.h

    def vertex(self, theta):
        return self.c + self.h * (math.cos(theta) * self.e1 - math.sin(theta) * self.n)

    def normal(self, theta):
        return math.cos(theta) * self.n + math.sin(theta) * self.e1

    def simplex(self, theta):
        out = self.k1.copy()
        out[0] = self.vertex(theta)
        return out


def rotation_procedure(simplex, witnesses, seed: int = 0, tol: Tolerance = DEFAULT_TOL,
                       log_samples: int = 100) -> RotationOutcome:
    """Rotate ``v_1`` until it reaches unit distance from ``w_1`` or some ``w_i`` meets the moving hyperplane.

    ``simplex`` holds ``v_1..v_d`` (a unit simplex spanning the base hyperplane
    in ``R^d``); ``witnesses`` holds ``w_1..w_d``.  Events are bracketed on a
    one-degree grid and refined by bisection; the first one wins.  The log
    records, at ``log_samples`` angles before the stop, whether ``w_1`` stayed
    in the rotated rugby ball but outside the rotated circumball, and whether
    the other witnesses stayed in the rotated rugby ball.  ``seed`` is unused
    by the deterministic procedure and kept for interface symmetry.
    """
    k1 = np.asarray(simplex, dtype=float)
    w = np.asarray(witnesses, dtype=float)
    d = k1.shape[1]
    if k1.shape != (d, d) or w.shape[1] != d:
        raise CaseError("expected d vertices and witnesses in R^d")
    rot = _Rotation(k1, w[0])
    gt = tol.geom_tol
    r_ball = math.sqrt((d - 1) / (2.0 * d))
    side = (w - rot.o) @ rot.n
    if not (side[0] > 0 and np.all(side[1:] < 0)):
        raise CaseError("need w_1 strictly above the base hyperplane and the others strictly below")
    if np.any(cdist(w, k1) > 1.0 + gt):
        raise CaseError("witnesses must lie in the rugby ball of the simplex")
    if np.linalg.norm(w[0] - rot.o) <= r_ball:
        raise CaseError("w_1 must lie outside the circumscribed ball")
    if np.linalg.norm(w[0] - k1[0]) >= 1.0:
        raise CaseError("w_1 must be closer than 1 to v_1")

    def events(theta):
        f1 = np.linalg.norm(rot.vertex(theta) - w[0]) - 1.0
        g = (w[1:] - rot.c) @ rot.normal(theta)
        return f1, g

    def first(theta):
        f1, g = events(theta)
        return max(f1, g.max()) if len(g) else f1

    grid = np.arange(0, 91) * (math.pi / 180.0)
    lo = hi = None
    for a, b in zip(grid[:-1], grid[1:]):
        if first(b) >= 0:
            lo, hi = a, b
            break
    if lo is None:
        raise ProcedureError("no event before a quarter turn",)
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if first(mid) >= 0:
            hi = mid
        else:
            lo = mid
    theta = hi
    f1, g = events(theta)
    if len(g) == 0 or abs(f1) <= abs(g).min():
        event, idx, residual = UNIT_DISTANCE, 0, abs(f1)
    else:
        j = int(np.argmin(np.abs(g)))
        event, idx, residual = HYPERPLANE_HIT, j + 1, abs(g[j])

    log = {"samples": 0, "fact1_violations": 0, "fact2_violations": 0,
           "min_outside_ball_margin": math.inf, "min_in_rugby_margin": math.inf}
    for t in np.linspace(0.0, theta, log_samples, endpoint=False):
        moved = rot.simplex(t)
        o_t = moved.mean(axis=0)
        in_rugby_w1 = 1.0 + gt - np.linalg.norm(moved - w[0], axis=1).max()
        outside = np.linalg.norm(w[0] - o_t) - r_ball
        others = 1.0 + gt - cdist(w[1:], moved).max() if len(w) > 1 else math.inf
        log["samples"] += 1
        log["min_outside_ball_margin"] = min(log["min_outside_ball_margin"], outside)
        log["min_in_rugby_margin"] = min(log["min_in_rugby_margin"], in_rugby_w1, others)
        if in_rugby_w1 < 0 or outside <= 0:
            log["fact1_violations"] += 1
        if others < 0:
            log["fact2_violations"] += 1
    return RotationOutcome(event, theta, rot.vertex(theta), idx, float(residual), log)


def base_simplex(d: int) -> np.ndarray:
    """Unit simplex on ``d`` vertices in the hyperplane ``x_last = 0`` of ``R^d``, centred at 0."""
    return regular_unit_simplex(d, d).points


def case_ii_instance(d: int, rng: np.random.Generator, max_tries: int = 100_000) -> tuple[np.ndarray, np.ndarray]:
    """Random ``(K_1, witnesses)`` in the one-point-above configuration.

    ``w_1`` lies above the base, inside the rugby ball, outside the
    circumscribed ball and within distance 1 of ``v_1``; ``w_2..w_d`` lie below
    the base inside the rugby ball.  Instances are kept only if some event
    function is already positive at a quarter turn, so an event is certain.
    """
    k1 = base_simplex(d)
    theta = rugby_ball(d)
    r_ball = math.sqrt((d - 1) / (2.0 * d))
    reach = math.sqrt((d + 1) / (2.0 * d))
    for _ in range(max_tries):
        cand = reach * uniform_ball(64, d, rng)
        inside = theta.contains_many(cand)
        up = cand[inside & (cand[:, -1] > 1e-6) & (np.linalg.norm(cand, axis=1) > r_ball + 1e-9)
                  & (np.linalg.norm(cand - k1[0], axis=1) < 1.0 - 1e-9)]
        down = cand[inside & (cand[:, -1] < -1e-6)]
        if len(up) == 0 or len(down) < d - 1:
            continue
        w = np.vstack([up[:1], down[: d - 1]])
        rot = _Rotation(k1, w[0])
        quarter = max(np.linalg.norm(rot.vertex(math.pi / 2) - w[0]) - 1.0,
                      ((w[1:] - rot.c) @ rot.normal(math.pi / 2)).max())
        if quarter > 1e-6:
            return k1, w
    raise ProcedureError("could not construct a case (ii) instance")


def verify_rotation(d: int, instances: int = 100, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> CheckReport:
    rng = np.random.default_rng(seed)
    rep = CheckReport(f"rotation[d={d}]", details={UNIT_DISTANCE: 0, HYPERPLANE_HIT: 0, "max_residual": 0.0,
                                                   "fact1_violations": 0, "fact2_violations": 0})
    for _ in range(instances):
        k1, w = case_ii_instance(d, rng)
        out = rotation_procedure(k1, w, tol=tol)
        rep.trials += 1
        rep.details[out.event] += 1
        rep.details["max_residual"] = max(rep.details["max_residual"], out.residual)
        rep.details["fact1_violations"] += out.log["fact1_violations"]
        rep.details["fact2_violations"] += out.log["fact2_violations"]
        rep.margin(min(out.log["min_outside_ball_margin"], out.log["min_in_rugby_margin"],
                       1e-9 - out.residual))
        if (out.residual >= 1e-9 or not (0 < out.theta < math.pi / 2)
                or out.log["fact1_violations"] or out.log["fact2_violations"]):
            rep.violate({"simplex": k1, "witnesses": w, "outcome": out.to_json()})
    return rep


# -- observations -------------------------------------------------------------

def check_two_balls(c, radius, c2, radius2, points, tol: Tolerance = DEFAULT_TOL) -> tuple[int, float]:
    """Nesting of two balls on either side of the hyperplane through their spheres' intersection.

    Requires ``radius > radius2``, spheres meeting in a codimension-2 sphere
    and both centres on the same side of that hyperplane.  On that side the
    larger ball contains the smaller; on the other side the reverse holds.
    Returns ``(violations, worst margin)`` over ``points``.
    """
    c, c2 = np.asarray(c, float), np.asarray(c2, float)
    dist = float(np.linalg.norm(c2 - c))
    if not radius > radius2:
        raise DomainError("the first ball must be strictly larger")
    if not (radius - radius2 < dist < radius + radius2):
        raise DomainError("the spheres must meet in a sphere of codimension 2")
    u = (c2 - c) / dist
    t = (dist * dist + radius * radius - radius2 * radius2) / (2.0 * dist)
    if t < dist:
        raise DomainError("the centres lie on different sides of the radical hyperplane")
    pts = np.atleast_2d(points)
    s = (pts - c) @ u
    in_b = radius - np.linalg.norm(pts - c, axis=1)
    in_b2 = radius2 - np.linalg.norm(pts - c2, axis=1)
    gt = tol.geom_tol
    plus = s <= t
    bad1 = plus & (in_b2 >= 0) & (in_b < -gt)
    bad2 = ~plus & (in_b >= 0) & (in_b2 < -gt)
    margins = np.concatenate([in_b[plus & (in_b2 >= 0)], in_b2[~plus & (in_b >= 0)]])
    return int(bad1.sum() + bad2.sum()), float(margins.min()) if len(margins) else math.inf


def _obs_two_balls(trials, rng, tol):
    rep = CheckReport("observation[two_balls]")
    for _ in range(trials):
        dim = int(rng.integers(2, 6))
        r2 = rng.uniform(0.2, 1.0)
        dist = rng.uniform(0.05, 0.99) * r2
        r1 = rng.uniform(math.sqrt(r2 * r2 + dist * dist), r2 + dist)
        c = rng.standard_normal(dim)
        c2 = c + dist * uniform_sphere(1, dim, rng)[0]
        pts = c + 1.1 * r1 * uniform_ball(64, dim, rng)
        bad, margin = check_two_balls(c, r1, c2, r2, pts, tol)
        rep.trials += 1
        rep.margin(margin)
        if bad:
            rep.violate({"c": c, "r": r1, "c2": c2, "r2": r2}, count=bad)
    return rep


def _obs_projection(trials, rng, tol):
    """Rugby-ball points outside the circumscribed ball project into the base simplex."""
    rep = CheckReport("observation[projection_in_hull]", details={"strict_trials": 0})
    per_dim = max(1, trials // 3)
    for d in (3, 4, 5):
        theta = rugby_ball(d)
        facet = theta.vertices[:, : d - 1]
        r_ball = math.sqrt((d - 1) / (2.0 * d))
        reach = math.sqrt((d + 1) / (2.0 * d))
        got = []
        have = 0
        while have < per_dim:
            cand = reach * uniform_ball(4 * per_dim, d, rng)
            cand = cand[theta.contains_many(cand) & (np.linalg.norm(cand, axis=1) >= r_ball)]
            got.append(cand)
            have += len(cand)
        pts = np.vstack(got)[:per_dim]
        bary = barycentric(pts[:, : d - 1], facet).min(axis=1)
        strict = np.linalg.norm(pts, axis=1) > r_ball + tol.geom_tol
        rep.trials += len(pts)
        rep.details["strict_trials"] += int(strict.sum())
        rep.margin(bary.min())
        bad = np.flatnonzero((bary < -tol.geom_tol) | (strict & (bary <= 0)))
        if len(bad):
            rep.violate({"d": d, "point": pts[bad[0]]}, count=len(bad))
    return rep


def _obs_bisector(trials, rng, tol):
    rep = CheckReport("observation[bisector]", details={"on_plane_equalities": 0})
    dim = 4
    x = rng.standard_normal((trials, dim))
    y = rng.standard_normal((trials, dim))
    mid = 0.5 * (x + y)
    u = (x - y) / np.linalg.norm(x - y, axis=1, keepdims=True)
    z = rng.standard_normal((trials, dim)) * 2.0
    on_plane = rng.random(trials) < 0.1
    s = np.einsum("ij,ij->i", z - mid, u)
    z[on_plane] -= s[on_plane, None] * u[on_plane]
    s = np.einsum("ij,ij->i", z - mid, u)
    z[s < 0] -= 2 * s[s < 0, None] * u[s < 0]
    margin = np.linalg.norm(z - y, axis=1) - np.linalg.norm(z - x, axis=1)
    rep.trials = trials
    rep.worst_margin = float(margin.min())
    rep.details["on_plane_equalities"] = int((np.abs(margin[on_plane]) <= tol.eq_tol).sum())
    bad = np.flatnonzero(margin < -tol.eq_tol)
    if len(bad):
        rep.violate({"x": x[bad[0]], "y": y[bad[0]], "z": z[bad[0]]}, count=len(bad))
    return rep


def _obs_rotation_nesting(trials, rng, tol):
    """Rotating ``v_1``: the rotated circumball and rugby ball nest across the bisector ``gamma``."""
    rep = CheckReport("observation[rotation_nesting]")
    gt = tol.geom_tol
    for _ in range(trials):
        d = int(rng.integers(3, 6))
        k1 = base_simplex(d)
        up = np.zeros(d)
        up[-1] = 1.0
        rot = _Rotation(k1, up)
        theta = rng.uniform(1e-3, math.pi / 2 - 1e-3)
        moved = rot.simplex(theta)
        v, v2 = k1[0], moved[0]
        g_n = (v - v2) / np.linalg.norm(v - v2)
        g_p = 0.5 * (v + v2)
        r_ball = math.sqrt((d - 1) / (2.0 * d))
        o, o2 = k1.mean(axis=0), moved.mean(axis=0)
        pts = math.sqrt((d + 1) / (2.0 * d)) * 1.05 * uniform_ball(256, d, rng)
        side = (pts - g_p) @ g_n
        in_b = r_ball - np.linalg.norm(pts - o, axis=1)
        in_b2 = r_ball - np.linalg.norm(pts - o2, axis=1)
        in_t = 1.0 - cdist(pts, k1).max(axis=1)
        in_t2 = 1.0 - cdist(pts, moved).max(axis=1)
        bad_ball = (side >= 0) & (in_b2 >= 0) & (in_b < -gt)
        bad_rugby = (side <= 0) & (in_t >= 0) & (in_t2 < -gt)
        above_out = (pts[:, -1] >= 0) & (in_t >= 0) & (in_b < 0)
        bad_side = above_out & (side < -gt)
        rep.trials += 1
        margins = np.concatenate([in_b[(side >= 0) & (in_b2 >= 0)], in_t2[(side <= 0) & (in_t >= 0)],
                                  side[above_out]])
        if len(margins):
            rep.margin(margins.min())
        bad = int(bad_ball.sum() + bad_rugby.sum() + bad_side.sum())
        if bad:
            rep.violate({"d": d, "theta": theta}, count=bad)
    return rep


def _obs_spherical(trials, rng, tol):
    """Spherical Reuleaux simplices sit in the open hemisphere around any point of their vertex hull; projections move less than a quarter turn."""
    rep = CheckReport("observation[spherical_hemisphere]")
    for _ in range(trials):
        d = int(rng.integers(2, 5))
        r = float(rng.choice([0.75, 1.0, 2.0])) if rng.random() < 0.5 else rng.uniform(0.72, 3.0)
        body = reuleaux_simplex(d, r)
        f = body.frame
        x = to_sphere(rng.dirichlet(np.ones(d + 1)) @ body.vertices, f)
        ys = cap_sample(body.vertices[0], f.phi, 128, f, rng)
        ys = ys[body.contains_many(ys)]
        ys = np.vstack([ys, body.vertices])
        gaps = math.pi / 2 - rho(np.broadcast_to(x, ys.shape), ys, f)
        gamma = DiametralSphere(rng.standard_normal(d + 1))
        p = to_sphere(rng.standard_normal(d + 1), f)
        gap2 = math.pi / 2 - rho(p, project(p, gamma, f), f)
        rep.trials += 1
        worst = min(float(np.min(gaps)), gap2)
        rep.margin(worst)
        if worst <= 0:
            rep.violate({"r": r, "d": d, "x": x})
    return rep


def verify_observations(trials: int = 10_000, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> list[CheckReport]:
    """One report per observation, each over ``trials`` random instances."""
    seeds = np.random.SeedSequence(seed).spawn(5)
    rngs = [np.random.default_rng(s) for s in seeds]
    return [
        _obs_two_balls(trials, rngs[0], tol),
        _obs_projection(trials, rngs[1], tol),
        _obs_bisector(trials, rngs[2], tol),
        _obs_rotation_nesting(trials, rngs[3], tol),
        _obs_spherical(trials, rngs[4], tol),
    ]
