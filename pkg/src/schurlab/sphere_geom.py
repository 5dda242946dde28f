"""Internal geometry of the sphere ``S^d_r``, done with embedding vectors.

A point of the sphere is a vector of norm ``r`` in ``R^{d+1}``.  A diametral
hypersphere is given by a unit normal ``n``: it is the set of sphere points
orthogonal to ``n``, and its pole pair is ``{r n, -r n}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .errors import ArgumentError, DomainError

ON_SPHERE_TOL = 1e-9


@dataclass(frozen=True)
class SphericalFrame:
    d: int
    r: float

    def __post_init__(self):
        if self.r < 0.5:
            raise DomainError("a unit chord needs a sphere of radius at least 1/2")

    @property
    def phi(self) -> float:
        """Angular length of a unit chord."""
        return unit_chord_angle(self.r)

    @property
    def ambient_dim(self) -> int:
        return self.d + 1

    def chord(self, angle: float) -> float:
        return 2.0 * self.r * math.sin(angle / 2.0)


def unit_chord_angle(r: float) -> float:
    return 2.0 * math.asin(1.0 / (2.0 * r))


@dataclass(frozen=True)
class DiametralSphere:
    normal: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        norm = np.linalg.norm(n)
        if norm == 0:
            raise DomainError("zero normal")
        object.__setattr__(self, "normal", n / norm)

    def poles(self, f: SphericalFrame) -> np.ndarray:
        return np.array([f.r * self.normal, -f.r * self.normal])

    def side(self, p) -> np.ndarray:
        return np.asarray(p) @ self.normal

    @classmethod
    def through(cls, points) -> DiametralSphere:
        """Diametral hypersphere through ``d`` sphere points (``d + 1`` coordinates)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if np.linalg.matrix_rank(pts, tol=1e-12 * np.abs(pts).max()) != pts.shape[1] - 1:
            raise DomainError("points do not determine a unique diametral hypersphere")
        _, _, vt = np.linalg.svd(pts)
        return cls(vt[-1])


def _check_on_sphere(p, f: SphericalFrame) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != f.ambient_dim:
        raise DomainError(f"expected {f.ambient_dim} embedding coordinates")
    norms = np.linalg.norm(p, axis=-1)
    if np.any(np.abs(norms - f.r) > ON_SPHERE_TOL * max(1.0, f.r)):
        raise DomainError("point is off the sphere")
    return p


def to_sphere(p, f: SphericalFrame) -> np.ndarray:
    """Radially push a nonzero vector (or rows) onto the sphere."""
    p = np.asarray(p, dtype=float)
    return f.r * p / np.linalg.norm(p, axis=-1, keepdims=True)


def rho(u1, u2, f: SphericalFrame):
    """Spherical (angular) distance in ``[0, pi]``."""
    u1 = _check_on_sphere(u1, f)
    u2 = _check_on_sphere(u2, f)
    chord = np.linalg.norm(u1 - u2, axis=-1)
    out = 2.0 * np.arcsin(np.clip(chord / (2.0 * f.r), 0.0, 1.0))
    return float(out) if np.ndim(out) == 0 else out


def _tangent(at, toward):
    a = at / np.linalg.norm(at)
    t = toward - (toward @ a) * a
    return t


def angle_at(u1, u2, u3, f: SphericalFrame) -> float:
    """Angle ``A(u1, u2, u3)`` at ``u2`` between the arcs ``u2u1`` and ``u2u3``."""
    u1, u2, u3 = (_check_on_sphere(u, f) for u in (u1, u2, u3))
    t1 = _tangent(u2, u1)
    t3 = _tangent(u2, u3)
    n1, n3 = np.linalg.norm(t1), np.linalg.norm(t3)
    if n1 < 1e-12 * f.r or n3 < 1e-12 * f.r:
        raise DomainError("angle undefined: coincident or antipodal points")
    c = float(np.clip(t1 @ t3 / (n1 * n3), -1.0, 1.0))
    s = float(np.linalg.norm(t1 / n1 - c * t3 / n3))
    return math.atan2(s, c)


def cosine_law(rho12: float, rho23: float, angle: float) -> float:
    """Third side of a spherical triangle (angles measured on the unit sphere)."""
    if not (0.0 <= rho12 <= math.pi and 0.0 <= rho23 <= math.pi):
        raise DomainError("side lengths must lie in [0, pi]")
    if not (0.0 <= angle <= math.pi):
        raise DomainError("angle must lie in [0, pi]")
    c = math.cos(rho12) * math.cos(rho23) + math.sin(rho12) * math.sin(rho23) * math.cos(angle)
    return math.acos(max(-1.0, min(1.0, c)))


def project(p, gamma: DiametralSphere, f: SphericalFrame) -> np.ndarray:
    """Closest point of ``gamma`` on the great circle through the poles and ``p``."""
    p = _check_on_sphere(p, f)
    foot = p - np.multiply.outer(gamma.side(p), gamma.normal)
    norms = np.linalg.norm(foot, axis=-1)
    if np.any(norms < 1e-12 * f.r):
        raise DomainError("projection undefined for a pole of the hypersphere")
    return f.r * foot / norms[..., None] if foot.ndim > 1 else f.r * foot / norms


def reflect(p, gamma: DiametralSphere, f: SphericalFrame | None = None) -> np.ndarray:
    p = np.asarray(p, dtype=float) if f is None else _check_on_sphere(p, f)
    return p - 2.0 * np.multiply.outer(gamma.side(p), gamma.normal)


def is_orthogonal(sigma_span, gamma: DiametralSphere, tol: float = 1e-9) -> bool:
    """Whether the reflection in ``gamma`` maps the plane ``sigma`` onto itself.

    ``sigma_span`` holds vectors spanning the linear subspace whose trace on
    the sphere is the plane.
    """
    span = np.atleast_2d(np.asarray(sigma_span, dtype=float))
    _, s, vt = np.linalg.svd(span, full_matrices=False)
    basis = vt[s > 1e-12 * max(1.0, s.max())]
    image = reflect(basis, gamma)
    residual = image - (image @ basis.T) @ basis
    return bool(np.max(np.linalg.norm(residual, axis=1)) <= tol)


def in_spherical_hull(x, vertices, tol: float = 1e-9) -> bool:
    """Whether ``x`` is a nonnegative combination of the vertex vectors."""
    x = np.asarray(x, dtype=float)
    a = np.atleast_2d(np.asarray(vertices, dtype=float)).T
    norm = np.linalg.norm(x)
    if norm == 0:
        raise DomainError("zero vector")
    lam, residual = nnls(a, x / norm)
    return bool(residual <= tol and lam.sum() > 0)


def min_spherical_ball(points, f: SphericalFrame) -> tuple[np.ndarray, float]:
    """Smallest spherical cap containing ``points``: ``(center, angular radius)``.

    The best cap axis maximises ``min_i <c, p_i>`` over unit ``c``.  That is the
    least-distance program ``min |y|  s.t.  <p_i, y> >= 1``, solved through its
    NNLS dual; an infeasible program means no open hemisphere holds the points.
    """
    pts = _check_on_sphere(np.atleast_2d(points), f)
    if len(pts) == 0:
        raise ArgumentError("empty point set")
    dim = pts.shape[1]
    e = np.vstack([pts.T, np.ones(len(pts))])
    target = np.zeros(dim + 1)
    target[-1] = 1.0
    u, _ = nnls(e, target)
    res = e @ u - target
    if abs(res[-1]) < 1e-12:
        raise DomainError("points are not contained in an open hemisphere")
    y = -res[:dim] / res[-1]
    axis = y / np.linalg.norm(y)
    cosines = pts @ axis / f.r
    radius = float(np.arccos(np.clip(cosines.min(), -1.0, 1.0)))
    return f.r * axis, radius


def cap_sample(center, angle: float, n: int, f: SphericalFrame, rng: np.random.Generator) -> np.ndarray:
    """``n`` points uniform (w.r.t. surface measure) in a spherical cap."""
    axis = np.asarray(center, dtype=float) / np.linalg.norm(center)
    dim = f.d
    out = np.empty((0, axis.size))
    while len(out) < n:
        m = max(2 * (n - len(out)), 64)
        # angle from the axis has density proportional to sin^(d-1)
        theta = rng.random(m) * angle
        keep = rng.random(m) <= (np.sin(theta) / max(np.sin(min(angle, math.pi / 2)), 1e-300)) ** (dim - 1)
        theta = theta[keep]
        g = rng.standard_normal((len(theta), axis.size))
        g -= np.outer(g @ axis, axis)
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        pts = f.r * (np.cos(theta)[:, None] * axis + np.sin(theta)[:, None] * g)
        out = np.vstack([out, pts])
    return out[:n]
