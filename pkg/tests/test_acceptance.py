"""End-to-end acceptance checks, one test per criterion.

Each suite returns a JSON-serialisable body.  Bodies are cached so the
determinism criterion can re-run every suite and compare bytes.
"""
import json
import math
import time

import numpy as np
import pytest
from scipy.optimize import minimize

from oracles import arc_midpoint_by_search, intersection_sphere_by_solving, opposite_arc_midpoint_distance
from schurlab.diameter_graph import brute_force_cliques, build, count_cliques, random_audit_config, schur_audit
from schurlab.extremal_search import SearchProblem, counterexample_hunt, search
from schurlab.geom_core import (
    Euclidean,
    circumscribed_ball,
    min_enclosing_ball,
    min_enclosing_ball_bruteforce,
    regular_unit_simplex,
)
from schurlab.lemma_lab import (
    HYPERPLANE_HIT,
    UNIT_DISTANCE,
    intersection_sphere,
    lemrad_closed_form,
    lemrad_geometric_check,
    place_unit_simplex_on_sphere,
    verify_lemimp,
    verify_lemred,
    verify_lemrelo,
    verify_rotation,
)
from schurlab.reports import jsonable
from schurlab.reuleaux import (
    arc_midpoint,
    central_projection_check,
    circumball_check,
    cross_section_check,
    face_carrier_check,
    halfspace_identity_check,
    red_blue_construction,
    reuleaux_simplex,
)

SEED = 20240601
BODIES: dict[int, str] = {}


def dump(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, allow_nan=False)


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# -- suites ------------------------------------------------------------------

def suite_1():
    radii = {}
    for k in range(2, 9):
        ball = circumscribed_ball(regular_unit_simplex(k - 1, k))
        radii[k] = ball.radius - math.sqrt((k - 1) / (2 * k))
    rng = np.random.default_rng(SEED)
    worst_center = worst_radius = 0.0
    for _ in range(1000):
        n, dim = int(rng.integers(1, 9)), int(rng.integers(1, 6))
        pts = rng.standard_normal((n, dim)) * rng.uniform(0.1, 10)
        fast, slow = min_enclosing_ball(pts), min_enclosing_ball_bruteforce(pts)
        worst_radius = max(worst_radius, abs(fast.radius - slow.radius))
        worst_center = max(worst_center, float(np.linalg.norm(fast.center - slow.center)))
    return {"jung_errors": radii, "meb_radius_error": worst_radius, "meb_center_error": worst_center}


def suite_2():
    rng = np.random.default_rng(SEED)
    rows = []
    for r in (0.72, 0.75, 1.0, 2.0, 10.0):
        for d in range(2, 6):
            for k in range(2, d + 1):
                closed = lemrad_closed_form(r, k)
                geo = lemrad_geometric_check(r, k, d, trials=5, seed=SEED)
                v = place_unit_simplex_on_sphere(k, d, r, rng)
                _, solved = intersection_sphere_by_solving(v, r, rng)
                _, direct = intersection_sphere(v, r)
                rows.append({
                    "r": r, "k": k, "d": d, "r_omega": closed.r_omega,
                    "geometric_error": geo.details["max_abs_error"],
                    "oracle_error": abs(solved - closed.r_omega),
                    "direct_error": abs(direct - closed.r_omega),
                    "identity": abs(2 * closed.r_omega ** 2 - 1 - 2 * closed.a * (closed.b - closed.a)),
                    "a_formula": abs(closed.a - 1 / (2 * k * closed.b)),
                })
    anchor = lemrad_closed_form(1.0, 2).r_omega
    return {"rows": rows, "anchor_error": abs(anchor - math.sqrt(2 / 3))}


def suite_3():
    out = {}
    for d in (3, 4, 5):
        body = reuleaux_simplex(d)
        out[d] = {
            "containment": circumball_check(body, 100_000, seed=SEED).to_json(),
            "cross_section": cross_section_check(body, tuple(range(1, d + 1)), 10_000, seed=SEED).to_json(),
            "carriers": face_carrier_check(body, 1000, seed=SEED).to_json(),
            "projection": central_projection_check(body, samples=1000, seed=SEED).to_json(),
            "halfspace": halfspace_identity_check(body, 100_000, seed=SEED).to_json(),
        }
    return out


def _midpoint_distance_by_minimisation():
    # maximise the distance between a point on arc (0,1) and one on arc (2,3)
    body = reuleaux_simplex(3)
    v = body.vertices

    def arc(t, i, j):
        rest = [k for k in range(4) if k not in (i, j)]
        a, b = v[rest]
        c = 0.5 * (a + b)
        basis = np.linalg.svd((b - a)[None, :])[2][1:]
        return c + math.sqrt(3) / 2 * (math.cos(t) * basis[0] + math.sin(t) * basis[1])

    def angle_of(p, i, j):
        rest = [k for k in range(4) if k not in (i, j)]
        basis = np.linalg.svd((v[rest[1]] - v[rest[0]])[None, :])[2][1:]
        return math.atan2(*((p - v[rest].mean(axis=0)) @ basis.T)[::-1])

    def on_arc(p, i, j):
        return sum(max(0.0, np.linalg.norm(p - v[k]) - 1) for k in (i, j))

    def neg(x):
        p, q = arc(x[0], 0, 1), arc(x[1], 2, 3)
        return -np.linalg.norm(p - q) + 100 * (on_arc(p, 0, 1) + on_arc(q, 2, 3))

    t0 = angle_of(arc_midpoint_by_search(v, 0, 1), 0, 1)
    s0 = angle_of(arc_midpoint_by_search(v, 2, 3), 2, 3)
    grid = np.linspace(-0.5, 0.5, 41)
    best = min(((t0 + a, s0 + b) for a in grid for b in grid), key=neg)
    res = minimize(neg, best, method="Nelder-Mead", options={"xatol": 1e-13, "fatol": 1e-15})
    return -float(res.fun)


def suite_4():
    rows = {d: red_blue_construction(d, 1e-3).report for d in range(3, 9)}
    body = reuleaux_simplex(3)
    direct = float(np.linalg.norm(arc_midpoint(body, 0, 1) - arc_midpoint(body, 2, 3)))
    return {"margins": rows, "target": math.sqrt(3) - math.sqrt(2) / 2, "direct": direct,
            "axis_oracle": opposite_arc_midpoint_distance(),
            "minimisation_oracle": _midpoint_distance_by_minimisation(),
            "construction": rows[3]["uncontracted_blue_blue"]}


def suite_5():
    out = {}
    for d in (3, 4, 5):
        out[d] = {
            "lemimp": verify_lemimp(d, 100_000, seed=SEED).to_json(),
            "lemrelo": verify_lemrelo(d, 100_000, seed=SEED).to_json(),
            "lemred_euclidean": verify_lemred(True, 10_000, seed=SEED, d=d).to_json(),
            "lemred_spherical": verify_lemred(False, 10_000, seed=SEED, d=d).to_json(),
        }
    return out


def suite_6():
    return {d: verify_rotation(d, 100, seed=SEED).to_json() for d in (3, 4)}


def suite_7():
    rng = np.random.default_rng(SEED)
    out = {}
    for d in (2, 3, 4):
        stats = {"configs": 0, "violations": 0, "shared_violations": 0, "brute_checked": 0,
                 "brute_mismatches": 0, "max_n": 0, "cliques": 0}
        for _ in range(1000):
            cfg = random_audit_config(d, rng, n_max=12)
            rep = schur_audit(cfg)
            stats["configs"] += 1
            stats["max_n"] = max(stats["max_n"], rep.n)
            stats["cliques"] += rep.count
            stats["violations"] += int(rep.violation)
            stats["shared_violations"] += int(rep.shared_violation)
            if rep.n <= 10:
                g = build(cfg)
                stats["brute_checked"] += 1
                if brute_force_cliques(g, d).cliques != count_cliques(g, d).cliques:
                    stats["brute_mismatches"] += 1
        out[d] = stats
    return out


SEARCH_CASES = [(2, 5, 2), (2, 7, 2), (2, 9, 2), (3, 5, 3), (3, 6, 3)]


def suite_8():
    rows = []
    for d, n, l in SEARCH_CASES:
        res = search(SearchProblem(Euclidean(d), n, l, budget=100_000, seed=SEED))
        rows.append({"d": d, "n": n, "l": l, "count": res.count, "recount": res.diagnostics["recount"],
                     "independent_recount": count_cliques(build(res.config), l).count,
                     "result": res.to_json()})
    hunt = counterexample_hunt(3, 100_000, seed=SEED)
    return {"search": rows, "hunt": hunt.to_json()}


SUITES = {1: suite_1, 2: suite_2, 3: suite_3, 4: suite_4, 5: suite_5, 6: suite_6, 7: suite_7, 8: suite_8}


def run_suite(i):
    out, secs = timed(SUITES[i])
    BODIES.setdefault(i, dump(out))
    return out, secs


# -- criteria ----------------------------------------------------------------

def test_criterion_1_jung_and_meb():
    out, secs = run_suite(1)
    assert max(abs(e) for e in out["jung_errors"].values()) < 1e-12
    assert out["meb_radius_error"] < 1e-9 and out["meb_center_error"] < 1e-6
    assert secs < 10, secs


def test_criterion_2_lemrad():
    out, secs = run_suite(2)
    rows = out["rows"]
    assert len(rows) == 5 * 10
    for row in rows:
        assert row["geometric_error"] < 1e-9, row
        assert row["oracle_error"] < 1e-9, row
        assert row["direct_error"] < 1e-9, row
        assert row["r_omega"] > 1 / math.sqrt(2), row
        assert row["identity"] < 1e-12, row
        assert row["a_formula"] < 1e-15, row
    assert out["anchor_error"] < 1e-12
    assert secs < 30, secs


def test_criterion_3_reuleaux_structure():
    out, secs = run_suite(3)
    for d, reps in out.items():
        assert reps["containment"]["violations"] == 0 and reps["containment"]["trials"] >= 100_000, d
        assert reps["cross_section"]["details"]["agreement"] == 1.0 and reps["cross_section"]["trials"] == 10_000, d
        assert reps["carriers"]["details"]["max_residual"] < 1e-9, d
        assert reps["carriers"]["violations"] == 0, d
        assert reps["projection"]["violations"] == 0 and reps["projection"]["trials"] == 1000, d
        assert reps["halfspace"]["violations"] == 0 and reps["halfspace"]["trials"] == 100_000, d
    assert secs < 120, secs


def test_criterion_4_red_blue():
    out, secs = run_suite(4)
    for d, m in out["margins"].items():
        assert m["passed"], d
        assert m["blue_blue_margin"] > 0 and m["red_blue_margin"] > 0 and m["inside_margin"] > 0, d
    target = out["target"]
    for key in ("direct", "axis_oracle", "minimisation_oracle", "construction"):
        assert out[key] == pytest.approx(target, abs=1e-9), key
    assert secs < 10, secs


def test_criterion_5_lemma_suites():
    out, secs = run_suite(5)
    for d, reps in out.items():
        assert reps["lemimp"]["trials"] == 100_000 and reps["lemrelo"]["trials"] == 100_000
        assert reps["lemred_euclidean"]["trials"] == 10_000 and reps["lemred_spherical"]["trials"] == 10_000
        for name, rep in reps.items():
            assert rep["violations"] == 0, (d, name, rep)
    assert secs < 120, secs


def test_criterion_6_rotation():
    out, secs = run_suite(6)
    for d, rep in out.items():
        det = rep["details"]
        assert rep["trials"] == 100 and det[UNIT_DISTANCE] + det[HYPERPLANE_HIT] == 100, d
        assert det["max_residual"] < 1e-9, d
        assert det["fact1_violations"] == 0 and det["fact2_violations"] == 0, d
        assert rep["violations"] == 0, d
    assert secs < 60, secs


def test_criterion_7_audits():
    out, secs = run_suite(7)
    for d, s in out.items():
        assert s["configs"] == 1000 and s["max_n"] <= 12, d
        assert s["violations"] == 0 and s["shared_violations"] == 0, (d, s)
        assert s["brute_checked"] > 0 and s["brute_mismatches"] == 0, (d, s)
    assert secs < 180, secs


@pytest.mark.slow
def test_criterion_8_extremal_search():
    out, secs = run_suite(8)
    for row in out["search"]:
        assert row["count"] >= row["n"], row
        assert row["count"] == row["recount"] == row["independent_recount"], row
    assert out["hunt"]["slack"] < 0
    assert secs < 300, secs


@pytest.mark.slow
def test_criterion_9_determinism():
    for i, fn in SUITES.items():
        if i not in BODIES:
            run_suite(i)
        assert dump(fn()) == BODIES[i], f"suite {i} changed between runs"
