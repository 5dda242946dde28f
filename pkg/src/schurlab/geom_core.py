"""Euclidean primitives shared by every other module.

Points are plain ``numpy`` arrays.  A :class:`PointConfig` couples a point
array with the space it lives in: Euclidean ``R^d`` or the sphere ``S^d_r``
embedded in ``R^{d+1}``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist

from .errors import ArgumentError, DegenerateError, DimensionError, DomainError


@dataclass(frozen=True)
class Tolerance:
    """Tolerance model.

    ``eq_tol`` decides whether a distance "equals 1"; ``geom_tol`` is the slack
    allowed in membership and containment tests.
    """

    eq_tol: float = 1e-9
    geom_tol: float = 1e-9

    def __post_init__(self):
        for name in ("eq_tol", "geom_tol"):
            value = getattr(self, name)
            if not (0.0 < value <= 1e-6):
                raise ArgumentError(f"{name} must lie in (0, 1e-6], got {value!r}")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class Euclidean:
    dim: int

    @property
    def ambient_dim(self) -> int:
        return self.dim

    def to_json(self) -> dict:
        return {"type": "euclidean", "dim": self.dim}


@dataclass(frozen=True)
class Sphere:
    dim: int
    radius: float

    @property
    def ambient_dim(self) -> int:
        return self.dim + 1

    def to_json(self) -> dict:
        return {"type": "sphere", "dim": self.dim, "radius": self.radius}


Space = Euclidean | Sphere


def space_from_json(obj: dict) -> Space:
    kind = obj.get("type")
    if kind == "euclidean":
        return Euclidean(int(obj["dim"]))
    if kind == "sphere":
        return Sphere(int(obj["dim"]), float(obj["radius"]))
    raise ArgumentError(f"unknown space type {kind!r}")


@dataclass(frozen=True)
class PointConfig:
    """Labelled points in a Euclidean space or on a sphere."""

    space: Space
    points: np.ndarray
    labels: tuple[str, ...] | None = None
    tol: Tolerance = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1 and pts.size == 0:
            pts = pts.reshape(0, self.space.ambient_dim)
        if pts.ndim != 2 or pts.shape[1] != self.space.ambient_dim:
            raise DimensionError(
                f"points must have shape (n, {self.space.ambient_dim}), got {pts.shape}"
            )
        if not np.all(np.isfinite(pts)):
            raise DomainError("point coordinates must be finite")
        if isinstance(self.space, Sphere):
            norms = np.linalg.norm(pts, axis=1)
            bad = np.abs(norms - self.space.radius) > 1e-7 * max(1.0, self.space.radius)
            if np.any(bad):
                raise DomainError(
                    f"point {int(np.argmax(bad))} is off the sphere of radius {self.space.radius}"
                )
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(pts):
                raise ArgumentError("labels must match the number of points")
            object.__setattr__(self, "labels", labels)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.space.dim

    def to_json(self) -> dict:
        out = {"space": self.space.to_json(), "points": self.points.tolist()}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> PointConfig:
        space = space_from_json(obj["space"])
        points = obj["points"]
        for i, p in enumerate(points):
            if len(p) != space.ambient_dim:
                raise DimensionError(
                    f"point {i} has {len(p)} coordinates, space needs {space.ambient_dim}"
                )
        return cls(space, np.array(points, dtype=float).reshape(-1, space.ambient_dim),
                   obj.get("labels"))


def load_config(path) -> PointConfig:
    with open(path, encoding="utf-8") as fh:
        return PointConfig.from_json(json.load(fh))


def save_config(config: PointConfig, path) -> None:
    Path(path).write_text(json.dumps(config.to_json()) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise DomainError("ball radius must be nonnegative")
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    def contains(self, p, tol: float = 0.0) -> bool:
        return float(np.linalg.norm(np.asarray(p) - self.center)) <= self.radius + tol


@dataclass(frozen=True)
class Hyperplane:
    """The set ``{x : normal . x = offset}``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        if abs(np.linalg.norm(n) - 1.0) > 1e-9:
            raise DomainError("hyperplane normal must be a unit vector")
        object.__setattr__(self, "normal", n)

    @classmethod
    def through(cls, point, normal) -> Hyperplane:
        n = np.asarray(normal, dtype=float)
        n = n / np.linalg.norm(n)
        return cls(n, float(n @ np.asarray(point, dtype=float)))

    def signed_distance(self, p):
        return np.asarray(p) @ self.normal - self.offset


def regular_unit_simplex(d: int, k: int) -> PointConfig:
    """``k`` points in ``R^d`` at pairwise distance 1, centred at the origin.

    The vertices start as ``e_i / sqrt(2)`` in ``R^k`` (the hyperplane
    ``x_1 + ... + x_k = 1/sqrt(2)``) and are mapped isometrically onto the
    first ``k - 1`` coordinates of ``R^d`` with a Helmert basis.
    """
    if k < 1:
        raise ArgumentError("a simplex needs at least one vertex")
    if k > d + 1:
        raise DimensionError(f"{k} affinely independent points do not fit in R^{d}")
    lifted = np.eye(k) / math.sqrt(2.0)
    lifted -= lifted.mean(axis=0)
    coords = lifted @ _helmert(k).T
    pts = np.zeros((k, d))
    pts[:, : k - 1] = coords
    return PointConfig(Euclidean(d), pts)


def _helmert(k: int) -> np.ndarray:
    # rows: orthonormal basis of the complement of (1, ..., 1) in R^k
    h = np.zeros((k - 1, k))
    for i in range(1, k):
        h[i - 1, :i] = 1.0
        h[i - 1, i] = -float(i)
        h[i - 1] /= math.sqrt(i * (i + 1))
    return h


def circumball_of(points: np.ndarray) -> tuple[np.ndarray, float, int]:
    """Circumscribed ball of ``points`` inside their affine hull.

    Returns ``(center, radius, rank)``; ``rank`` is the affine rank, so a
    caller can tell whether the points were affinely independent.
    """
    pts = np.asarray(points, dtype=float)
    base = pts[0]
    if len(pts) == 1:
        return base.copy(), 0.0, 0
    a = pts[1:] - base
    gram = a @ a.T
    rhs = 0.5 * np.einsum("ij,ij->i", a, a)
    lam, *_, = np.linalg.lstsq(gram, rhs, rcond=None)
    rank = int(np.linalg.matrix_rank(a, tol=1e-10 * max(1.0, float(np.abs(a).max()))))
    center = base + lam @ a
    radius = float(np.max(np.linalg.norm(pts - center, axis=1)))
    return center, radius, rank


def min_enclosing_ball(points, seed: int = 0) -> Ball:
    """Smallest ball containing ``points``.

    Randomised move-to-front variant of Welzl's algorithm; the recursion depth
    is bounded by the support size (at most ``dim + 1``), not by ``n``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise ArgumentError("min_enclosing_ball needs a nonempty (n, d) array")
    dim = pts.shape[1]
    order = list(np.random.default_rng(seed).permutation(len(pts)))
    scale = max(1.0, float(np.abs(pts).max()))

    def ball_of(support):
        if not support:
            return None, -1.0
        c, r, _ = circumball_of(pts[support])
        return c, r

    def mtf(end, support):
        c, r = ball_of(support)
        if len(support) == dim + 1:
            return c, r
        i = 0
        while i < end:
            idx = order[i]
            if c is None or np.linalg.norm(pts[idx] - c) > r + 1e-12 * scale:
                c, r = mtf(i, support + [idx])
                order.insert(0, order.pop(i))
            i += 1
        return c, r

    c, r = mtf(len(order), [])
    return Ball(c, max(r, 0.0))


def min_enclosing_ball_bruteforce(points) -> Ball:
    """Exhaustive oracle: smallest containing circumball over all support sets."""
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        raise ArgumentError("empty point set")
    n, dim = pts.shape
    scale = max(1.0, float(np.abs(pts).max()))
    best = None
    for size in range(1, min(n, dim + 1) + 1):
        for subset in itertools.combinations(range(n), size):
            c, r, rank = circumball_of(pts[list(subset)])
            if rank != size - 1:
                continue
            if np.all(np.linalg.norm(pts - c, axis=1) <= r + 1e-9 * scale):
                if best is None or r < best.radius:
                    best = Ball(c, r)
    return best


def circumscribed_ball(simplex) -> Ball:
    """Circumscribed ball of an affinely independent vertex set."""
    pts = simplex.points if isinstance(simplex, PointConfig) else np.asarray(simplex, float)
    c, r, rank = circumball_of(pts)
    if rank != len(pts) - 1:
        raise DegenerateError(f"vertices have affine rank {rank}, expected {len(pts) - 1}")
    return Ball(c, r)


def unit_simplex_circumradius(k: int) -> float:
    """Circumradius of a regular unit simplex on ``k`` vertices."""
    return math.sqrt((k - 1) / (2.0 * k))


def project_to_hyperplane(p, h: Hyperplane) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != h.normal.shape[0]:
        raise DimensionError("point and hyperplane dimensions differ")
    return p - np.multiply.outer(h.signed_distance(p), h.normal)


def diameter(config) -> float:
    """Largest pairwise Euclidean (chord) distance."""
    pts = config.points if isinstance(config, PointConfig) else np.asarray(config, float)
    if len(pts) < 2:
        raise ArgumentError("diameter needs at least two points")
    return float(pdist(pts).max())


def diameter_bruteforce(config) -> float:
    pts = config.points if isinstance(config, PointConfig) else np.asarray(config, float)
    if len(pts) < 2:
        raise ArgumentError("diameter needs at least two points")
    return max(math.dist(a, b) for a, b in itertools.combinations(pts.tolist(), 2))


@dataclass(frozen=True)
class Flat:
    """Affine subspace ``origin + span(basis)`` with orthonormal ``basis`` rows."""

    origin: np.ndarray
    basis: np.ndarray

    @classmethod
    def spanned_by(cls, points) -> Flat:
        pts = np.asarray(points, dtype=float)
        origin = pts.mean(axis=0)
        u, s, vt = np.linalg.svd(pts - origin)
        rank = int(np.sum(s > 1e-10))
        return cls(origin, vt[:rank])

    def to_local(self, p) -> np.ndarray:
        return (np.asarray(p) - self.origin) @ self.basis.T

    def to_ambient(self, q) -> np.ndarray:
        return self.origin + np.asarray(q) @ self.basis


def barycentric(point, vertices) -> np.ndarray:
    """Barycentric coordinates of ``point`` (or rows of it) w.r.t. a simplex.

    The point is projected onto the simplex's affine hull first, so this also
    gives the coordinates of an orthogonal projection.
    """
    v = np.asarray(vertices, dtype=float)
    a = (v[1:] - v[0]).T
    rel = np.atleast_2d(np.asarray(point, dtype=float)) - v[0]
    lam, *_ = np.linalg.lstsq(a, rel.T, rcond=None)
    coords = np.vstack([1.0 - lam.sum(axis=0), lam]).T
    return coords[0] if np.ndim(point) == 1 else coords


def random_rotation(dim: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def uniform_ball(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` points uniform in the unit ball of ``R^dim``."""
    g = rng.standard_normal((n, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * rng.random(n)[:, None] ** (1.0 / dim)


def uniform_sphere(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` points uniform on the unit sphere of ``R^dim``."""
    g = rng.standard_normal((n, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)
