"""``schurlab`` command line: JSON-lines reports with a leading manifest line.

Exit codes: 0 when every asserted property holds, 2 on a property violation
(a witness point set is written), 1 on usage, IO or input errors.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import SchurLabError, ToleranceArtifactError
from .geom_core import DEFAULT_TOL, Euclidean, PointConfig, Sphere, Tolerance, regular_unit_simplex
from .reports import CheckReport, jsonable

DEFAULT_SEED = 0
DEFAULT_WITNESS = "witness.json"

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


class CliError(Exception):
    """Usage, IO or malformed input; maps to exit code 1."""


def manifest(args: argparse.Namespace, argv: list[str]) -> dict:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    return {
        "manifest": {
            "subcommand": args.command,
            "argv": list(argv),
            "flags": jsonable(flags),
            "seed": getattr(args, "seed", None),
            "version": __version__,
            "input": getattr(args, "input", None),
            "output": getattr(args, "output", None),
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        }
    }


def _dumps(obj) -> str:
    return json.dumps(jsonable(obj), allow_nan=False)


def emit_report(lines: list, path=None, head: dict | None = None) -> None:
    """Write ``head`` (the manifest) then one JSON object per entry of ``lines``.

    ``path`` of ``None`` or ``"-"`` means stdout.
    """
    text = "".join(_dumps(obj) + "\n" for obj in ([head] if head is not None else []) + list(lines))
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write report {path}: {exc}") from exc


def read_report(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def _load_input(path) -> PointConfig:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return PointConfig.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise CliError(f"{path} is not a point-set JSON object: missing or invalid {exc}") from exc
    except SchurLabError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _write_json(obj, path) -> None:
    try:
        Path(path).write_text(_dumps(obj) + "\n", encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc


def _tol(args) -> Tolerance:
    try:
        return Tolerance(eq_tol=args.tol, geom_tol=max(args.tol, DEFAULT_TOL.geom_tol))
    except SchurLabError as exc:
        raise CliError(str(exc)) from exc


def _lemma_witness(report: CheckReport) -> PointConfig | None:
    """Collect the point-valued entries of a lemma witness into a replayable point set."""
    w = report.witness or {}
    pts, labels = [], []
    for key, val in w.items():
        try:
            arr = np.asarray(val, dtype=float)
        except (TypeError, ValueError):
            continue
        if arr.ndim == 1 and arr.size > 1:
            pts.append(arr)
            labels.append(key)
        elif arr.ndim == 2:
            pts.extend(arr)
            labels.extend(f"{key}[{i}]" for i in range(len(arr)))
    dims = {len(p) for p in pts}
    if not pts or len(dims) != 1:
        return None
    return PointConfig(Euclidean(dims.pop()), np.array(pts), labels)


# -- subcommands --------------------------------------------------------------

def cmd_cliques(args):
    from .diameter_graph import build, count_cliques, schur_audit

    config = _load_input(args.input)
    tol = _tol(args)
    g = build(config, tol)
    if not (1 <= args.l <= g.n):
        raise CliError(f"--l must lie in [1, {g.n}]")
    rep = count_cliques(g, args.l).to_json()
    rep.update({"n": g.n, "edge_deficit": g.edge_deficit, "edge_slack": g.edge_slack})
    lines = [{"check": "cliques", **rep}]
    witness = None
    if args.audit:
        audit = schur_audit(config, tol, args.d)
        lines.append({"check": "audit", **audit.to_json()})
        if not audit.passed:
            witness = config
    return lines, witness


def cmd_audit(args):
    from .diameter_graph import schur_audit

    config = _load_input(args.input)
    audit = schur_audit(config, _tol(args), args.d)
    return [{"check": "audit", **audit.to_json()}], (None if audit.passed else config)


def cmd_lemmas(args):
    from . import lemma_lab as lab

    which = ["lemimp", "lemrelo", "lemred", "lemrad", "rotation", "observations"] if args.lemma == "all" else [args.lemma]
    reports: list[CheckReport] = []
    extra: list[dict] = []
    dims = [args.d] if args.d is not None else [3, 4, 5]
    for name in which:
        if name == "lemimp":
            reports += [lab.verify_lemimp(d, args.trials or 100_000, args.seed) for d in dims]
        elif name == "lemrelo":
            reports += [lab.verify_lemrelo(d, args.trials or 100_000, args.seed) for d in dims]
        elif name == "lemred":
            modes = {"euclidean": [True], "spherical": [False], "both": [True, False]}[args.geometry]
            reports += [lab.verify_lemred(e, args.trials or 10_000, args.seed, d=d) for e in modes for d in dims]
        elif name == "lemrad":
            values = lab.lemrad_closed_form(args.r, args.k)
            extra.append({"check": f"lemrad_closed_form[r={args.r},k={args.k}]", "b": values.b, "a": values.a,
                          "r_omega": values.r_omega, "identity_residual": values.identity_residual})
            d = args.d if args.d is not None else max(args.k, 2)
            if args.k > d:
                raise CliError("--k must not exceed --d for the geometric check")
            reports.append(lab.lemrad_geometric_check(args.r, args.k, d, args.trials or 10, args.seed))
        elif name == "rotation":
            rdims = [args.d] if args.d is not None else [3, 4]
            reports += [lab.verify_rotation(d, args.trials or 100, args.seed) for d in rdims]
        elif name == "observations":
            reports += lab.verify_observations(args.trials or 10_000, args.seed)
    lines = extra + [r.to_json() for r in reports]
    failed = next((r for r in reports if not r.passed), None)
    witness = None
    if failed is not None:
        witness = _lemma_witness(failed) or {"check": failed.check, "witness": failed.witness}
    return lines, witness


def cmd_construct(args):
    from .reuleaux import red_blue_construction, reuleaux_simplex, rugby_ball
    from .extremal_search import reuleaux_polygon
    from scipy.spatial.distance import cdist, pdist

    kind = args.kind
    if kind == "red-blue":
        rb = red_blue_construction(args.d, args.delta)
        red, blue = rb.red.points, rb.blue.points
        config = PointConfig(Euclidean(args.d), np.vstack([red, blue]),
                             ["red"] * len(red) + ["blue"] * len(blue))
        margins = dict(rb.report)
        margins["min_red_red"] = float(pdist(red).min())
        margins["max_red_blue_check"] = float(cdist(red, blue).max())
    elif kind == "simplex":
        config = regular_unit_simplex(args.d, args.d + 1)
        dist = pdist(config.points)
        margins = {"min_distance": float(dist.min()), "max_distance": float(dist.max())}
    elif kind == "reuleaux-polygon":
        config = reuleaux_polygon(args.n)
        dist = pdist(config.points)
        margins = {"min_distance": float(dist.min()), "max_distance": float(dist.max()),
                   "diameters": int(np.sum(dist >= dist.max() - DEFAULT_TOL.eq_tol))}
    elif kind in ("rugby", "reuleaux-simplex"):
        body = rugby_ball(args.d, args.r) if kind == "rugby" else reuleaux_simplex(args.d, args.r)
        config = body.vertex_config()
        dist = pdist(config.points)
        margins = {"min_distance": float(dist.min()), "max_distance": float(dist.max()), "body": body.kind.value}
    else:  # argparse restricts the choices
        raise CliError(f"unknown construction {kind}")
    if args.output:
        _write_json(config.to_json(), args.output)
    lines = [{"check": f"construct[{kind}]", "margins": margins, "config": config.to_json()}]
    return lines, None


def cmd_search(args):
    from .extremal_search import SearchProblem, counterexample_hunt, search

    if args.hunt:
        res = counterexample_hunt(args.d, args.budget, args.seed, blue_size=args.blue_size,
                                  seed_construction=args.seed_construction, restarts=args.restarts)
    else:
        space = Euclidean(args.d) if args.space == "euclidean" else Sphere(args.d, args.radius)
        if args.n is None or args.l is None:
            raise CliError("search needs --n and --l (or --hunt)")
        res = search(SearchProblem(space, args.n, args.l, args.budget, args.restarts, args.seed))
    if args.output:
        _write_json(res.config.to_json(), args.output)
    line = {"check": "hunt" if args.hunt else "search", **res.to_json()}
    witness = None
    if args.hunt and res.diagnostics.get("counterexample"):
        witness = res.config
    return [line], witness


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schurlab", description="Diameter graphs, Reuleaux bodies and clique bounds.")
    p.add_argument("--version", action="version", version=f"schurlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--report", default="-", help="JSON-lines report path (default stdout)")
        sp.add_argument("--witness", default=DEFAULT_WITNESS, help="where to write a witness on violation")
        if seed:
            sp.add_argument("--seed", type=int, default=DEFAULT_SEED)

    sp = sub.add_parser("cliques", help="count l-cliques of a point set's diameter graph")
    sp.add_argument("--input", required=True)
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL.eq_tol)
    sp.add_argument("--audit", action="store_true", help="also run the d-clique audit")
    sp.add_argument("--d", type=int, default=None)
    common(sp, seed=False)
    sp.set_defaults(func=cmd_cliques)

    sp = sub.add_parser("audit", help="check the d-clique bounds on a point set")
    sp.add_argument("--input", required=True)
    sp.add_argument("--d", type=int, default=None)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL.eq_tol)
    common(sp, seed=False)
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("lemmas", help="randomized lemma checks")
    sp.add_argument("--lemma", choices=["lemimp", "lemrelo", "lemred", "lemrad", "observations", "rotation", "all"],
                    default="all")
    sp.add_argument("--d", type=int, default=None)
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--r", type=float, default=1.0)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--geometry", choices=["euclidean", "spherical", "both"], default="both")
    common(sp)
    sp.set_defaults(func=cmd_lemmas)

    sp = sub.add_parser("construct", help="emit explicit configurations")
    sp.add_argument("kind", choices=["red-blue", "simplex", "reuleaux-polygon", "rugby", "reuleaux-simplex"])
    sp.add_argument("--d", type=int, default=3)
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--delta", type=float, default=1e-3)
    sp.add_argument("--r", type=float, default=None, help="sphere radius (spherical bodies)")
    sp.add_argument("--output", default=None, help="also write the point set here")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("search", help="annealing search for many cliques, or the disjoint-simplex hunt")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--l", type=int, default=None)
    sp.add_argument("--space", choices=["euclidean", "sphere"], default="euclidean")
    sp.add_argument("--radius", type=float, default=1.0)
    sp.add_argument("--budget", type=int, default=100_000)
    sp.add_argument("--restarts", type=int, default=4)
    sp.add_argument("--hunt", action="store_true")
    sp.add_argument("--blue-size", type=int, default=None)
    sp.add_argument("--seed-construction", action="store_true")
    sp.add_argument("--output", default=None)
    common(sp)
    sp.set_defaults(func=cmd_search)
    return p


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        lines, witness = args.func(args)
        violated = witness is not None
        if violated:
            obj = witness.to_json() if isinstance(witness, PointConfig) else witness
            _write_json(obj, args.witness)
            lines.append({"check": "witness", "path": args.witness})
        emit_report(lines, args.report, manifest(args, argv))
    except CliError as exc:
        print(f"schurlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ToleranceArtifactError as exc:
        print(f"schurlab: bound exceeded: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except SchurLabError as exc:
        print(f"schurlab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_VIOLATION if violated else EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
