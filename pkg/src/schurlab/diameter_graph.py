"""Diameter graphs of point configurations and the clique audits built on them."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import ArgumentError, DegenerateError
from .geom_core import DEFAULT_TOL, Euclidean, PointConfig, Sphere, Tolerance, random_rotation

BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True)
class DiameterGraph:
    """Config rescaled to diameter 1 plus its unit-distance adjacency.

    ``edge_deficit`` is the largest ``1 - |p_i - p_j|`` over edges (how far an
    accepted edge is from exact), ``edge_slack`` the smallest ``1 - |p_i - p_j|``
    over non-edges (how close a rejected pair came).
    """

    config: PointConfig
    adjacency: np.ndarray
    tol: Tolerance
    scale: float
    edge_deficit: float
    edge_slack: float

    @property
    def n(self) -> int:
        return len(self.config)

    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    def neighbours(self) -> list[set[int]]:
        return [set(np.flatnonzero(row).tolist()) for row in self.adjacency]


def build(config: PointConfig, tol: Tolerance = DEFAULT_TOL) -> DiameterGraph:
    """Rescale so the diameter is 1 and join the pairs at distance ``>= 1 - eq_tol``.

    A spherical configuration is rescaled together with its sphere, so the
    result lives on ``S^d_{r/diam}``.
    """
    if len(config) < 2:
        raise ArgumentError("a diameter graph needs at least two points")
    dist = pdist(config.points)
    diam = float(dist.max())
    if diam <= 0.0:
        raise DegenerateError("all points coincide")
    pts = config.points / diam
    space = config.space
    if isinstance(space, Sphere):
        space = Sphere(space.dim, space.radius / diam)
    normalized = PointConfig(space, pts, config.labels)
    unit = dist / diam
    is_edge = unit >= 1.0 - tol.eq_tol
    adjacency = squareform(is_edge)
    deficit = float(np.max(1.0 - unit[is_edge]))
    slack = float(np.min(1.0 - unit[~is_edge])) if np.any(~is_edge) else math.inf
    return DiameterGraph(normalized, adjacency, tol, diam, max(deficit, 0.0), slack)


def graph_from_adjacency(adjacency) -> DiameterGraph:
    """Wrap a bare adjacency matrix (used to test the clique counters on abstract graphs)."""
    adj = np.asarray(adjacency, dtype=bool)
    if adj.shape[0] != adj.shape[1] or np.any(adj != adj.T) or np.any(np.diag(adj)):
        raise ArgumentError("adjacency must be symmetric with an empty diagonal")
    n = adj.shape[0]
    return DiameterGraph(PointConfig(Euclidean(1), np.zeros((n, 1))), adj, DEFAULT_TOL, 1.0, 0.0, math.inf)


@dataclass
class CliqueReport:
    l: int
    count: int
    cliques: list[tuple[int, ...]]
    pairwise_shared: int | None

    def to_json(self) -> dict:
        return {
            "l": self.l,
            "count": self.count,
            "pairwise_shared": self.pairwise_shared,
            "cliques": [list(c) for c in self.cliques],
        }


def _min_shared(cliques) -> int | None:
    if len(cliques) < 2:
        return None
    sets = [set(c) for c in cliques]
    return min(len(a & b) for a, b in itertools.combinations(sets, 2))


def count_cliques(g: DiameterGraph, l: int) -> CliqueReport:
    """Every ``l``-clique, by ordered branch-and-bound extension.

    Each clique is grown in increasing vertex order from the common
    higher-numbered neighbours of its members, and a branch is cut as soon as
    too few candidates remain to reach size ``l``.
    """
    n = g.n
    if not (1 <= l <= n):
        raise ArgumentError(f"clique size must lie in [1, {n}]")
    nbrs = g.neighbours()
    higher = [{j for j in nbrs[i] if j > i} for i in range(n)]
    found: list[tuple[int, ...]] = []

    def grow(clique, candidates):
        if len(clique) == l:
            found.append(tuple(clique))
            return
        need = l - len(clique)
        for v in sorted(candidates):
            if len(candidates) < need:
                return
            candidates = candidates - {v}
            grow(clique + [v], candidates & higher[v])

    grow([], set(range(n)))
    found.sort()
    return CliqueReport(l, len(found), found, _min_shared(found))


def brute_force_cliques(g: DiameterGraph, l: int) -> CliqueReport:
    """Oracle: test every ``l``-subset."""
    n = g.n
    if n > BRUTE_FORCE_LIMIT:
        raise ArgumentError(f"brute force refused for n = {n} > {BRUTE_FORCE_LIMIT}")
    if not (1 <= l <= n):
        raise ArgumentError(f"clique size must lie in [1, {n}]")
    adj = g.adjacency
    found = [
        c for c in itertools.combinations(range(n), l)
        if all(adj[a, b] for a, b in itertools.combinations(c, 2))
    ]
    return CliqueReport(l, len(found), found, _min_shared(found))


@dataclass
class AuditReport:
    n: int
    d: int
    space: dict
    count: int
    bound: int
    violation: bool
    min_shared: int | None
    shared_bound: int
    shared_violation: bool
    shares_vertex: bool
    edge_count: int
    edge_deficit: float
    edge_slack: float
    asserted: bool = True
    warnings: list[str] = field(default_factory=list)
    cliques: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.asserted or not (self.violation or self.shared_violation)

    def to_json(self) -> dict:
        from .reports import jsonable

        return jsonable({
            "n": self.n, "d": self.d, "space": self.space,
            "d_cliques": self.count, "bound": self.bound, "violation": self.violation,
            "min_shared": self.min_shared, "shared_bound": self.shared_bound,
            "shared_violation": self.shared_violation, "shares_vertex": self.shares_vertex,
            "edges": self.edge_count, "edge_deficit": self.edge_deficit, "edge_slack": self.edge_slack,
            "asserted": self.asserted, "passed": self.passed, "warnings": self.warnings,
            "cliques": [list(c) for c in self.cliques],
        })


def schur_audit(config: PointConfig, tol: Tolerance = DEFAULT_TOL, d: int | None = None) -> AuditReport:
    """At most ``n`` cliques of size ``d``, any two sharing at least ``d - 2`` vertices.

    On spheres of radius at most ``1/sqrt(2)`` (after rescaling), or when
    ``d`` is not the dimension, the audit still runs but nothing is asserted.
    """
    g = build(config, tol)
    d = config.dim if d is None else d
    warnings = []
    asserted = True
    if isinstance(g.config.space, Sphere) and g.config.space.radius <= 1.0 / math.sqrt(2.0) + tol.eq_tol:
        warnings.append(
            f"sphere radius {g.config.space.radius:.6g} <= 1/sqrt(2): bound not asserted"
        )
        asserted = False
    if d != config.dim:
        # the bounds are only theorems for cliques of size equal to the dimension
        warnings.append(f"clique size {d} differs from dimension {config.dim}: bound not asserted")
        asserted = False
    if d <= g.n:
        rep = count_cliques(g, d)
    else:
        rep = CliqueReport(d, 0, [], None)
    shared_bound = max(d - 2, 0)
    min_shared = rep.pairwise_shared
    shared_violation = min_shared is not None and min_shared < shared_bound
    shares_vertex = min_shared is None or min_shared >= 1
    return AuditReport(
        n=g.n, d=d, space=g.config.space.to_json(), count=rep.count, bound=g.n,
        violation=rep.count > g.n, min_shared=min_shared, shared_bound=shared_bound,
        shared_violation=shared_violation, shares_vertex=shares_vertex,
        edge_count=len(g.edges()), edge_deficit=g.edge_deficit, edge_slack=g.edge_slack,
        asserted=asserted, warnings=warnings, cliques=rep.cliques,
    )


@dataclass
class SharedVertexReport:
    cliques: int
    min_shared: int | None
    shares_vertex: bool
    meets_d_minus_2: bool
    vacuous: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def shared_vertex_check(g: DiameterGraph, d: int) -> SharedVertexReport:
    if d < 3:
        raise ArgumentError("the shared-vertex property is claimed for d >= 3")
    rep = count_cliques(g, d) if d <= g.n else CliqueReport(d, 0, [], None)
    m = rep.pairwise_shared
    if m is None:
        return SharedVertexReport(rep.count, None, True, True, True)
    return SharedVertexReport(rep.count, m, m >= 1, m >= d - 2, False)


def reuleaux_polygon(n: int) -> PointConfig:
    """Regular ``n``-gon (``n`` odd) scaled so its longest diagonals have length 1.

    Its diameter graph is a single ``n``-cycle.
    """
    if n < 3 or n % 2 == 0:
        raise ArgumentError("a Reuleaux polygon needs an odd number n >= 3 of vertices")
    radius = 1.0 / (2.0 * math.cos(math.pi / (2 * n)))
    angles = 2.0 * math.pi * np.arange(n) / n
    return PointConfig(Euclidean(2), radius * np.column_stack([np.cos(angles), np.sin(angles)]))


def random_audit_config(d: int, rng: np.random.Generator, n_max: int = 12) -> PointConfig:
    """A random configuration rich in diameters, for stress-testing the audits.

    The base is an extremal structure (Reuleaux polygon for ``d = 2``, unit
    simplex otherwise, sometimes missing a vertex).  Boundary points of the
    matching Reuleaux body are added greedily while the diameter stays 1; each
    carries unit distances to the vertices it is opposite to.  Finally a few
    points may be jittered (destroying their edges) and the whole set moved by
    a random similarity.
    """
    from .reuleaux import Kind, ReuleauxBody, sample_face

    if d == 2:
        k = int(rng.choice([3, 5, 7, 9]))
        base = reuleaux_polygon(k).points
        partners = [((i + k // 2) % k, (i + k // 2 + 1) % k) for i in range(k)]
    else:
        base = ReuleauxBody(Kind.SIMPLEX, _random_unit_simplex(d, rng)).vertices
    pts = list(base)
    if d > 2 and rng.random() < 0.2:
        pts.pop(int(rng.integers(len(pts))))
    body = None if d == 2 else ReuleauxBody(Kind.SIMPLEX, base)
    target = int(rng.integers(len(pts), n_max + 1))
    attempts = 0
    while len(pts) < target and attempts < 50:
        attempts += 1
        if d == 2:
            c = int(rng.integers(len(base)))
            a, b = partners[c]
            ang = [math.atan2(*(base[a] - base[c])[::-1]), math.atan2(*(base[b] - base[c])[::-1])]
            lo, hi = min(ang), max(ang)
            if hi - lo > math.pi:
                lo, hi = hi, lo + 2 * math.pi
            t = rng.uniform(lo, hi)
            p = base[c] + np.array([math.cos(t), math.sin(t)])
        else:
            size = int(rng.choice([2, 2, 2, 3])) if d >= 3 else 2
            face = tuple(sorted(rng.choice(d + 1, size=min(size, d), replace=False).tolist()))
            p = sample_face(body, face, 1, rng)[0]
        if max(np.linalg.norm(np.asarray(pts) - p, axis=1)) <= 1.0 + 1e-12:
            pts.append(p)
    pts = np.asarray(pts)
    if rng.random() < 0.3:
        idx = rng.choice(len(pts), size=int(rng.integers(1, 3)), replace=False)
        pts[idx] += 1e-3 * rng.standard_normal((len(idx), d))
    pts = rng.uniform(0.5, 2.0) * pts @ random_rotation(d, rng).T + rng.standard_normal(d)
    return PointConfig(Euclidean(d), pts)


def _random_unit_simplex(d: int, rng: np.random.Generator) -> np.ndarray:
    from .geom_core import regular_unit_simplex

    return regular_unit_simplex(d, d + 1).points @ random_rotation(d, rng).T
