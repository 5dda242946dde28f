"""Simulated-annealing search for point sets with many unit cliques.

The count of ``l``-cliques is piecewise constant, so annealing runs on a
smooth surrogate: every pair gets a soft edge weight ``exp(-(1 - u) / tau)``
where ``u`` is its distance divided by the current diameter, and a clique
scores the product of its pair weights.  At checkpoints the current state is
polished: near-diameter pairs are greedily snapped to exact unit length by
least squares (keeping every other distance at most 1), and the polished set
is recounted exactly.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares
from scipy.spatial.distance import cdist, pdist

from .diameter_graph import build, count_cliques, reuleaux_polygon
from .errors import ArgumentError, ToleranceArtifactError
from .geom_core import DEFAULT_TOL, Euclidean, PointConfig, Space, Sphere, regular_unit_simplex, uniform_ball
from .reuleaux import red_blue_construction

__all__ = [
    "SearchProblem",
    "SearchResult",
    "search",
    "counterexample_hunt",
    "surrogate_energy",
    "reuleaux_polygon",
    "thread_count",
]

NEAR_EDGE = 2e-2
SNAP_TOL = 1e-11
# soft clique counts reward collapsing points onto each other; pairs closer
# than MIN_SEP (in diameter units) are pushed apart
MIN_SEP = 0.05
REPULSION = 10.0


def thread_count() -> int:
    """Worker cap from ``SCHURLAB_THREADS`` (default 1, i.e. run restarts in-process)."""
    raw = os.environ.get("SCHURLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ArgumentError(f"SCHURLAB_THREADS must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class SearchProblem:
    space: Space
    n: int
    l: int
    budget: int = 100_000
    restarts: int = 4
    seed: int = 0
    sigma: tuple[float, float] = (0.1, 1e-4)
    tau: tuple[float, float] = (0.3, 1e-3)
    temperature: tuple[float, float] = (0.1, 1e-4)
    checkpoints: int = 10

    def __post_init__(self):
        if self.budget <= 0:
            raise ArgumentError("budget must be positive")
        if not (1 <= self.l <= self.n):
            raise ArgumentError("need 1 <= l <= n")
        if self.restarts < 1:
            raise ArgumentError("need at least one restart")

    @property
    def dim(self) -> int:
        return self.space.ambient_dim

    def to_json(self) -> dict:
        return {"space": self.space.to_json(), "n": self.n, "l": self.l, "budget": self.budget,
                "restarts": self.restarts, "seed": self.seed}


@dataclass
class SearchResult:
    config: PointConfig
    count: int
    slack: float
    trace: list[list[int]]
    problem: dict
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        from .reports import jsonable

        return jsonable({"problem": self.problem, "count": self.count, "slack": self.slack,
                         "trace": self.trace, "diagnostics": self.diagnostics,
                         "config": self.config.to_json()})


def _clique_pairs(n: int, l: int) -> np.ndarray:
    """Condensed-distance indices of the pairs in each ``l``-subset."""
    def cidx(i, j):
        return n * i - i * (i + 1) // 2 + (j - i - 1)

    rows = [[cidx(a, b) for a, b in itertools.combinations(c, 2)] for c in itertools.combinations(range(n), l)]
    return np.array(rows, dtype=np.intp).reshape(len(rows), -1)


def surrogate_energy(points, l: int, tau: float, pairs: np.ndarray | None = None) -> float:
    """Negative soft clique count of ``points`` at sharpness ``tau``, plus a short-range repulsion."""
    pts = np.asarray(points, dtype=float)
    dist = pdist(pts)
    u = dist / dist.max()
    crowd = REPULSION * float(np.sum(np.maximum(0.0, 1.0 - u / MIN_SEP) ** 2))
    if l == 1:
        return -float(len(pts)) + crowd
    if pairs is None:
        pairs = _clique_pairs(len(pts), l)
    w = np.exp(-(1.0 - u) / tau)
    return -float(np.prod(w[pairs], axis=1).sum()) + crowd


def _normalize(x: np.ndarray, space: Space) -> np.ndarray:
    if isinstance(space, Sphere):
        return space.radius * x / np.linalg.norm(x, axis=1, keepdims=True)
    c = x.mean(axis=0)
    return (x - c) / pdist(x).max()


def _snap(x: np.ndarray, edges: list[tuple[int, int]], space: Space) -> np.ndarray | None:
    """Least-squares snap so ``edges`` have unit length and all pairs stay within 1."""
    n, dim = x.shape
    ei = np.array([e[0] for e in edges], dtype=np.intp)
    ej = np.array([e[1] for e in edges], dtype=np.intp)
    ii, jj = np.triu_indices(n, 1)
    spherical = isinstance(space, Sphere)

    def resid(flat):
        y = flat.reshape(n, dim)
        parts = [np.linalg.norm(y[ei] - y[ej], axis=1) - 1.0,
                 np.maximum(np.linalg.norm(y[ii] - y[jj], axis=1) - 1.0, 0.0)]
        if spherical:
            parts.append(np.linalg.norm(y, axis=1) - space.radius)
        return np.concatenate(parts)

    sol = least_squares(resid, x.ravel(), xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
    y = sol.x.reshape(n, dim)
    if spherical:
        y = space.radius * y / np.linalg.norm(y, axis=1, keepdims=True)
    dist = np.linalg.norm(y[ii] - y[jj], axis=1)
    if dist.max() > 1.0 + SNAP_TOL or dist.min() < MIN_SEP / 2:
        return None
    if len(edges) and np.max(np.abs(np.linalg.norm(y[ei] - y[ej], axis=1) - 1.0)) > SNAP_TOL:
        return None
    return y


def _exact(y: np.ndarray, space: Space, l: int):
    if isinstance(space, Sphere):
        # keep the sphere fixed: the diameter must already be 1
        cfg = PointConfig(space, y)
    else:
        cfg = PointConfig(Euclidean(space.dim), y)
    g = build(cfg)
    count = count_cliques(g, l).count if l <= g.n else 0
    return g.config, count, g.edge_slack


def polish(x: np.ndarray, space: Space, l: int, near: float = NEAR_EDGE):
    """Greedy snapping of near-diameter pairs, longest first; returns ``(config, count, slack)``."""
    n = len(x)
    u = pdist(x) / pdist(x).max()
    if u.min() < MIN_SEP / 2:
        return None
    ii, jj = np.triu_indices(n, 1)
    order = np.argsort(-u, kind="stable")
    edges: list[tuple[int, int]] = []
    y = x if isinstance(space, Sphere) else _normalize(x, space)
    for k in order:
        if u[k] < 1.0 - near:
            break
        trial = _snap(y, edges + [(int(ii[k]), int(jj[k]))], space)
        if trial is not None:
            edges.append((int(ii[k]), int(jj[k])))
            y = trial
    if isinstance(space, Sphere) and pdist(y).max() < 1.0 - SNAP_TOL:
        return None
    return _exact(y, space, l)


def _better(a, b) -> bool:
    """Order on ``(count, slack)``: more cliques first, then more edge slack."""
    if b is None:
        return True
    return (a[1], a[2]) > (b[1], b[2])


def _anneal(problem: SearchProblem, seq: np.random.SeedSequence, steps: int):
    rng = np.random.default_rng(seq)
    n, dim, space = problem.n, problem.dim, problem.space
    pairs = _clique_pairs(n, problem.l)
    if isinstance(space, Sphere):
        x = _normalize(rng.standard_normal((n, dim)), space)
    else:
        x = _normalize(uniform_ball(n, dim, rng), space)
    s0, s1 = problem.sigma
    t0, t1 = problem.tau
    T0, T1 = problem.temperature
    energy = surrogate_energy(x, problem.l, t0, pairs)
    best = None
    trace = []
    every = max(1, steps // problem.checkpoints)
    for step in range(steps):
        frac = step / max(1, steps - 1)
        sigma = s0 * (s1 / s0) ** frac
        tau = t0 * (t1 / t0) ** frac
        temp = T0 * (T1 / T0) ** frac
        if step % 500 == 0:
            energy = surrogate_energy(x, problem.l, tau, pairs)
        i = rng.integers(n)
        y = x.copy()
        y[i] += sigma * rng.standard_normal(dim)
        y = _normalize(y, space)
        e_new = surrogate_energy(y, problem.l, tau, pairs)
        if e_new <= energy or rng.random() < math.exp(-(e_new - energy) / temp):
            x, energy = y, e_new
        if (step + 1) % every == 0 or step == steps - 1:
            cand = polish(x, space, problem.l)
            if cand is not None and _better(cand, best):
                best = cand
            trace.append(best[1] if best is not None else 0)
    return best, trace


def _anneal_job(args):
    return _anneal(*args)


def search(problem: SearchProblem) -> SearchResult:
    """Anneal ``problem.restarts`` independent runs splitting ``problem.budget`` steps.

    Restarts get child seeds of ``problem.seed`` and are merged by clique
    count, then edge slack, then restart index, so the result does not
    depend on ``SCHURLAB_THREADS``.
    """
    seqs = np.random.SeedSequence(problem.seed).spawn(problem.restarts)
    steps = problem.budget // problem.restarts
    jobs = [(problem, s, steps) for s in seqs]
    workers = min(thread_count(), problem.restarts)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(_anneal_job, jobs))
    else:
        outs = [_anneal_job(j) for j in jobs]
    best = None
    for cand, _ in outs:
        if cand is not None and _better(cand, best):
            best = cand
    if best is None:
        raise ToleranceArtifactError("no restart produced a feasible polished configuration")
    config, count, slack = best
    # re-audit the emitted configuration from scratch
    g = build(config)
    recount = count_cliques(g, problem.l).count
    diagnostics = {"recount": recount, "edge_deficit": g.edge_deficit, "steps_per_restart": steps}
    if recount != count:
        raise ToleranceArtifactError(f"recount {recount} disagrees with search count {count}")
    if problem.l == problem.space.dim and isinstance(problem.space, Euclidean) and count > problem.n:
        raise ToleranceArtifactError(
            f"{count} {problem.l}-cliques on {problem.n} points exceeds the proven bound; "
            f"edge slack {slack:.3g} suggests a tolerance artifact"
        )
    return SearchResult(config, count, slack, [t for _, t in outs], problem.to_json(), diagnostics)


# -- vertex-disjoint simplices with small union diameter ----------------------

def _kabsch(src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rotation ``q`` and shift ``t`` minimising ``|src @ q.T + t - dst|``."""
    cs, cd = src.mean(axis=0), dst.mean(axis=0)
    u, _, vt = np.linalg.svd((dst - cd).T @ (src - cs))
    fix = np.eye(src.shape[1])
    fix[-1, -1] = np.sign(np.linalg.det(u @ vt))
    q = u @ fix @ vt
    return q, cd - cs @ q.T


def _skew_step(dim: int, sigma: float, rng) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) * sigma
    a = a - a.T
    # Cayley transform keeps the step a proper rotation
    eye = np.eye(dim)
    return np.linalg.solve(eye - a / 2, eye + a / 2)


def counterexample_hunt(d: int, budget: int = 100_000, seed: int = 0, blue_size: int | None = None,
                        seed_construction: bool = False, separation: float = 1e-2,
                        restarts: int = 4) -> SearchResult:
    """Look for a unit ``d``-simplex and a vertex-disjoint unit simplex with union diameter at most 1.

    The red simplex is fixed; the blue one (``blue_size`` vertices, default
    ``floor((d+1)/2) + 1``) moves rigidly.  The score is
    ``slack = 1 - max red-blue distance``, subject to every red-blue distance
    being at least ``separation`` (vertex-disjointness with a margin).  A
    nonnegative slack with ``blue_size > floor((d+1)/2)`` would be a witness
    against the conjecture; smaller blue simplices are known to fit.
    ``seed_construction`` starts every restart from the contracted arc
    midpoints of the red/blue construction, scaled so the blue side is 1.
    """
    if d < 3:
        raise ArgumentError("the hunt is defined for d >= 3")
    half = (d + 1) // 2
    k = half + 1 if blue_size is None else blue_size
    if not (2 <= k <= d + 1):
        raise ArgumentError("blue_size must lie in [2, d+1]")
    red = regular_unit_simplex(d, d + 1).points
    template = regular_unit_simplex(d, k).points

    start = None
    if seed_construction:
        rb = red_blue_construction(d, 1e-3).blue.points
        side = pdist(rb).min() if len(rb) > 1 else 1.0
        mids = rb * (1.0 / side)
        m = min(k, len(mids))
        start = _kabsch(template[:m], mids[:m])

    def score(blue):
        dist = cdist(red, blue)
        penalty = max(0.0, separation - dist.min()) * 10.0
        return 1.0 - dist.max() - penalty, dist.min()

    seqs = np.random.SeedSequence(seed).spawn(restarts)
    steps = max(1, budget // restarts)
    best = None
    trace = []
    for seq in seqs:
        rng = np.random.default_rng(seq)
        if start is not None:
            q, t = start
        else:
            q = np.linalg.qr(rng.standard_normal((d, d)))[0]
            t = 0.3 * rng.standard_normal(d)
        cur = score(template @ q.T + t)[0]
        run_best = cur
        for step in range(steps):
            frac = step / max(1, steps - 1)
            sigma = 0.1 * (1e-4 / 0.1) ** frac
            temp = 1e-2 * (1e-6 / 1e-2) ** frac
            q2 = _skew_step(d, sigma, rng) @ q
            t2 = t + sigma * rng.standard_normal(d)
            s2 = score(template @ q2.T + t2)[0]
            if s2 >= cur or rng.random() < math.exp((s2 - cur) / temp):
                q, t, cur = q2, t2, s2
            if cur > run_best:
                run_best = cur
            if best is None or cur > best[0]:
                best = (cur, q.copy(), t.copy())
        trace.append(float(run_best))
    _, q, t = best
    blue = template @ q.T + t
    _, sep = score(blue)
    slack = 1.0 - cdist(red, blue).max()
    union = np.vstack([red, blue])
    labels = ["red"] * len(red) + ["blue"] * len(blue)
    config = PointConfig(Euclidean(d), union, labels)
    g = build(config, DEFAULT_TOL)
    count = count_cliques(g, d).count
    diag = {"min_red_blue": float(sep), "blue_size": k, "separation": separation,
            "seeded": bool(seed_construction), "counterexample": bool(slack >= 0 and sep >= separation and k > half)}
    problem = {"space": Euclidean(d).to_json(), "n": len(union), "l": d, "budget": budget,
               "restarts": restarts, "seed": seed, "hunt": True}
    return SearchResult(config, count, float(slack), trace, problem, diag)
