"""Command-line front end.

Every subcommand resolves its settings as flags > ``--config`` file > defaults,
writes a JSON report (to ``--out`` or stdout) that embeds the resolved
configuration, and optionally a CSV table. Exit codes: 0 ok, 2 usage,
3 domain error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import io
from .errors import DomainError, RosslerLabError
from .integrator import Tolerance, integrate
from .manifolds import (
    Branch, CriterionConfig, TrefoilConfig, attractor_criterion, certify_trapping,
    flow_kneading, repeller_membership, trace_separatrix, trefoil_defect,
)
from .model import Params, RosslerField, check_assumptions, classify_fixed_point, fixed_points
from .quadratic import (
    admissible, c_sup, find_orbit_with_itinerary, kneading, match_orbits, pi_of_per,
)
from .section import (
    Partition, ReturnMap, estimate_fold, estimate_per_v, find_periodic_orbit, itinerary,
    return_samples,
)
from .symbols import SymbolSequence, periodic_words
from .synthetic import ParaboloidSaddle, PlantedHeteroclinic, radial_outflow

log = logging.getLogger("rosslerlab")

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _point(text):
    vals = [float(v) for v in str(text).replace(";", ",").split(",")]
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    return vals


def _per(text):
    parts = [s for s in str(text).split(";") if s.strip()]
    return [SymbolSequence.parse(s) for s in parts]


def _bool(text):
    return str(text).lower() in ("1", "true", "yes", "on")


# (flag, type, default, help)
COMMON = [("out", str, None, "JSON report path (stdout when omitted)"),
          ("seed", int, 0, "64-bit seed for any sampling")]
PARAMS = [("a", float, None, "parameter a"), ("b", float, None, "parameter b"),
          ("c", float, None, "parameter c")]
FIELD = [("field", str, "rossler", "rossler | paraboloid | radial | planted")]

COMMANDS = {
    "fixed-points": PARAMS,
    "integrate": PARAMS + [("x0", _point, [1.0, 1.0, 0.0], "initial point x,y,z"),
                           ("t0", float, 0.0, "start time"), ("t1", float, 100.0, "end time"),
                           ("tol", float, 1e-10, "absolute and relative tolerance"),
                           ("csv", str, None, "trajectory CSV path")],
    "return-map": PARAMS + [("x0", _point, None, "seed point (default: jittered (1,1,0))"),
                            ("n", int, 500, "crossings to keep"), ("burn", int, 100, "crossings to discard"),
                            ("tol", float, 1e-10, "integration tolerance"),
                            ("t_max", float, 200.0, "max time per return"),
                            ("csv", str, None, "crossings CSV path")],
    "itinerary": PARAMS + [("point", _point, None, "start point on U_v"), ("n", int, 20, "symbols"),
                           ("fold_x", float, None, "partition abscissa (estimated when omitted)"),
                           ("samples", int, 500, "samples for fold estimation"),
                           ("tol", float, 1e-10, "integration tolerance")],
    "periodic": PARAMS + [("guess", _point, None, "initial guess on U_v (scan when omitted)"),
                          ("k", int, 1, "period"), ("budget", int, 400, "samples for the scan"),
                          ("k_max", int, 8, "largest period scanned"),
                          ("close", float, 1e-3, "close-return threshold"),
                          ("fold_x", float, None, "partition abscissa"),
                          ("tol", float, 1e-10, "integration tolerance")],
    "attractor-check": PARAMS + FIELD + [
        ("r0", float, None, "seed ring radius"), ("h_max", float, None, "max ring spacing"),
        ("gap_tol", float, None, "closure tolerance"), ("t_back_max", float, 200.0, "backward time budget"),
        ("r_max", float, None, "escape radius for the front"), ("max_points", int, 20000, "ring budget"),
        ("tol", float, 1e-9, "integration tolerance"), ("csv", str, None, "delta polyline CSV path")],
    "repeller-check": PARAMS + [("point", _point, None, "phase-space point")],
    "trapping-certify": PARAMS + FIELD + [
        ("surface", str, None, "triangle-soup file"), ("n_samples", int, 7, "samples per triangle"),
        ("margin", float, 0.0, "required inward margin")],
    "trefoil-defect": PARAMS + FIELD + [
        ("eps", float, 1e-6, "separatrix seed offset"), ("t_max", float, 300.0, "time budget"),
        ("tol", float, 1e-10, "integration tolerance"), ("coincide", _bool, True, "compute d_coincide")],
    "knead": [("c", float, None, "quadratic parameter"), ("n", int, 20, "symbols")],
    "admissible": [("word", str, None, "periodic word, e.g. (12)"), ("c", float, None, "quadratic parameter"),
                   ("max_len", int, None, "tabulate all words up to this period instead"),
                   ("grid", int, 50, "c-grid size for the table"), ("csv", str, None, "table CSV path")],
    "c-sup": [("word", str, None, "periodic word"), ("tol", float, 1e-8, "bisection width")],
    "pi": [("per", str, None, "';'-separated periodic words"),
           ("max_len", int, None, "use all words up to this period"), ("tol", float, 1e-8, "bisection width")],
    "match": [("d", float, None, "quadratic parameter"), ("per", str, None, "';'-separated periodic words")],
    "scan": PARAMS + [("param", str, "c", "parameter to sweep"), ("start", float, None, "first value"),
                      ("stop", float, None, "last value"), ("num", int, 0, "number of values"),
                      ("n", int, 300, "return samples per value"), ("k_max", int, 4, "periods scanned"),
                      ("n_knead", int, 8, "flow kneading symbols"), ("tol", float, 1e-9, "integration tolerance"),
                      ("workers", int, 1, "worker processes"), ("csv", str, None, "scan CSV path")],
}
REQUIRED = {
    "fixed-points": ["a", "b", "c"], "integrate": ["a", "b", "c"], "return-map": ["a", "b", "c"],
    "itinerary": ["a", "b", "c", "point"], "periodic": ["a", "b", "c"],
    "repeller-check": ["a", "b", "c", "point"], "knead": ["c"], "c-sup": ["word"],
    "match": ["d", "per"], "scan": ["a", "b", "c"],
}


def build_parser():
    ap = argparse.ArgumentParser(prog="rosslerlab", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="key=value file; flags override it")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, opts in COMMANDS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key=value file; flags override it")
        for flag, typ, _, hlp in COMMON + opts:
            sp.add_argument("--" + flag.replace("_", "-"), dest=flag, type=typ, default=None, help=hlp)
    return ap


def resolve(args) -> dict:
    """Merge flags over config-file values over defaults."""
    spec = {flag: (typ, default) for flag, typ, default, _ in COMMON + COMMANDS[args.command]}
    cfg = {}
    if args.config:
        for k, v in io.read_config(args.config).items():
            if k not in spec:
                raise UsageError(f"unknown config key {k!r} for {args.command}")
            try:
                cfg[k] = spec[k][0](v)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"config key {k}: {exc}") from exc
    out = {}
    for k, (_, default) in spec.items():
        v = getattr(args, k)
        out[k] = v if v is not None else cfg.get(k, default)
    need = list(REQUIRED.get(args.command, []))
    if args.command in ("attractor-check", "trapping-certify", "trefoil-defect") and out["field"] == "rossler":
        need += ["a", "b", "c"]
    if args.command == "trapping-certify":
        need.append("surface")
    if args.command == "admissible" and out["max_len"] is None:
        need += ["word", "c"]
    if args.command == "pi" and out["max_len"] is None:
        need.append("per")
    missing = [k for k in need if out.get(k) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return out


def _params(cfg):
    return Params(cfg["a"], cfg["b"], cfg["c"])


def _field(cfg):
    kind = cfg.get("field", "rossler")
    if kind == "rossler":
        return RosslerField(_params(cfg))
    if kind == "paraboloid":
        return ParaboloidSaddle()
    if kind == "radial":
        return radial_outflow()
    if kind == "planted":
        return PlantedHeteroclinic()
    raise UsageError(f"unknown field {kind!r}")


def _emit(cfg, report):
    report = {"command": cfg["_command"], "config": {k: v for k, v in cfg.items() if not k.startswith("_")},
              **report}
    text = io.dump_json(report, cfg.get("out"))
    if cfg.get("out") is None:
        sys.stdout.write(text)


def _orbit_json(orb):
    return {"k": orb.k, "points": orb.points, "return_times": orb.return_times,
            "residual": orb.residual, "multipliers": orb.multipliers}


# ---------------------------------------------------------------- commands

def cmd_fixed_points(cfg):
    p = _params(cfg)
    p_in, p_out = fixed_points(p)
    _emit(cfg, {
        "fixed_points": {"In": p_in.location, "Out": p_out.location},
        "spectra": {"In": classify_fixed_point(p, "In"), "Out": classify_fixed_point(p, "Out")},
        "assumptions": check_assumptions(p),
    })


def cmd_integrate(cfg):
    p = _params(cfg)
    tr = integrate(p, cfg["x0"], (cfg["t0"], cfg["t1"]), Tolerance(cfg["tol"], cfg["tol"]))
    if cfg["csv"]:
        io.write_csv(cfg["csv"], io.TRAJECTORY_HEADER,
                     ((t, *s) for t, s in zip(tr.t, tr.states)))
    _emit(cfg, {"termination": tr.termination, "n_samples": len(tr.t), "final": tr.final})


def _seed_point(cfg):
    if cfg.get("x0") is not None:
        return np.array(cfg["x0"], dtype=float)
    rng = np.random.default_rng(cfg["seed"])
    return np.array([1.0, 1.0, 0.0]) + 1e-3 * rng.standard_normal(3)


def cmd_return_map(cfg):
    rm = ReturnMap(_params(cfg), t_max=cfg["t_max"], tol=cfg["tol"])
    S = return_samples(rm, _seed_point(cfg), cfg["n"], cfg["burn"])
    if cfg["csv"]:
        io.write_csv(cfg["csv"], io.CROSSING_HEADER, io.crossing_rows(S))
    fold = None
    fold_err = None
    if len(S) >= 50:
        try:
            fold = estimate_fold(S)
        except RosslerLabError as exc:
            fold_err = f"{type(exc).__name__}: {exc}"
    else:
        fold_err = "fewer than 50 samples"
    _emit(cfg, {"n_crossings": len(S), "partial": S.partial, "partial_reason": S.reason,
                "fold_x": None if fold is None else fold.fold_x,
                "d1_side": None if fold is None else fold.d1_side, "fold_error": fold_err})


def _partition(cfg, rm):
    if cfg.get("fold_x") is not None:
        return Partition.with_reference(cfg["fold_x"], 0.0)
    S = return_samples(rm, _seed_point({"x0": None, "seed": cfg["seed"]}), cfg.get("samples", 500), 100)
    return estimate_fold(S)


def cmd_itinerary(cfg):
    rm = ReturnMap(_params(cfg), tol=cfg["tol"])
    part = _partition(cfg, rm)
    s = itinerary(rm, cfg["point"], cfg["n"], part)
    _emit(cfg, {"word": str(s), "truncated": s.truncated, "fold_x": part.fold_x})


def cmd_periodic(cfg):
    rm = ReturnMap(_params(cfg), tol=cfg["tol"])
    if cfg["guess"] is not None:
        orb = find_periodic_orbit(rm, cfg["guess"], cfg["k"])
        _emit(cfg, {"orbit": _orbit_json(orb)})
        return
    part = Partition.with_reference(cfg["fold_x"]) if cfg["fold_x"] is not None else None
    entries = estimate_per_v(rm, cfg["budget"], cfg["k_max"], cfg["close"], seed=_seed_point(cfg), part=part)
    _emit(cfg, {"per_v": [{"symbol": None if e.symbol is None else str(e.symbol),
                           "orbit": _orbit_json(e.orbit)} for e in entries]})


def cmd_attractor_check(cfg):
    fld = _field(cfg)
    cc = CriterionConfig(cfg["r0"], cfg["h_max"], cfg["gap_tol"], cfg["t_back_max"], cfg["r_max"],
                         None, cfg["max_points"], cfg["tol"])
    v = attractor_criterion(fld, cc)
    if cfg["csv"]:
        io.write_csv(cfg["csv"], io.POLYLINE_HEADER, io.polyline_rows(v.delta_polyline))
    _emit(cfg, {"status": v.status, "gap_max": v.gap_max, "gap_tol": v.gap_tol,
                "radius_max": v.radius_max, "R_max": v.R_max, "n_points": v.n_points,
                "n_delta": len(v.delta_polyline)})


def cmd_repeller_check(cfg):
    r = repeller_membership(_params(cfg), cfg["point"])
    _emit(cfg, {"in_region": r.in_region, "face_fluxes": r.face_fluxes, "face_points": r.face_points})


def cmd_trapping_certify(cfg):
    fld = _field(cfg)
    tris = io.read_triangle_soup(cfg["surface"])
    r = certify_trapping(fld, tris, cfg["n_samples"], cfg["margin"])
    _emit(cfg, {"n_triangles": len(tris), "report": r})


def cmd_trefoil_defect(cfg):
    fld = _field(cfg)
    d = trefoil_defect(fld, TrefoilConfig(cfg["eps"], cfg["t_max"], cfg["tol"], compute_coincide=cfg["coincide"]))
    _emit(cfg, {"d_hetero": d.d_hetero, "d_coincide": d.d_coincide, "transverse_P0": d.transverse_P0})


def cmd_knead(cfg):
    k = kneading(cfg["c"], cfg["n"])
    _emit(cfg, {"word": str(k.word), "hits_zero_at": list(k.hits_zero_at)})


def cmd_admissible(cfg):
    if cfg["max_len"] is None:
        s = SymbolSequence.parse(cfg["word"])
        _emit(cfg, {"word": str(s), "admissible": admissible(s, cfg["c"])})
        return
    words = periodic_words(cfg["max_len"])
    grid = np.linspace(-2.0, 0.25, cfg["grid"])
    rows = []
    for s in words:
        cs = c_sup(s)
        for c in grid:
            rows.append((str(s), float(c), admissible(s, float(c)), cs))
    if cfg["csv"]:
        io.write_csv(cfg["csv"], io.KNEADING_HEADER, rows)
    _emit(cfg, {"n_words": len(words), "n_rows": len(rows),
                "n_admissible": sum(1 for r in rows if r[2])})


def cmd_c_sup(cfg):
    s = SymbolSequence.parse(cfg["word"])
    _emit(cfg, {"word": str(s), "c_sup": c_sup(s, cfg["tol"])})


def cmd_pi(cfg):
    per = _per(cfg["per"]) if cfg["per"] is not None else periodic_words(cfg["max_len"])
    r = pi_of_per(per, cfg["tol"])
    _emit(cfg, {"d": r.d, "binding_symbol": str(r.binding_symbol), "n_words": len(per), "tol": r.tol})


def cmd_match(cfg):
    per = _per(cfg["per"])
    rep = match_orbits(cfg["d"], [(s, None) for s in per])
    _emit(cfg, {"matched": [{"symbol": str(s), "orbit": poly} for s, _, poly in rep.matched],
                "unmatched": [str(s) for s in rep.unmatched]})


def scan_point(job):
    """One scan row; failures are caught and reported in the row."""
    base, name, value, n, k_max, n_knead, tol = job
    vals = dict(zip("abc", base))
    vals[name] = value
    row = {"param": name, "value": value, "status": "ok", "fold_x": None, "kneading": None,
           "pi_d": None, "n_per": 0, "error": ""}
    try:
        p = Params(**vals)
        rm = ReturnMap(p, tol=tol)
        S = return_samples(rm, [1.0, 1.0, 0.0], n, min(100, n))
        part = estimate_fold(S)
        row["fold_x"] = part.fold_x
        row["kneading"] = str(flow_kneading(p, part, n_knead, tol=Tolerance(tol, tol)))
        entries = estimate_per_v(rm, n, k_max, part=part)
        per = [e.symbol for e in entries if e.symbol is not None]
        row["n_per"] = len(per)
        row["pi_d"] = pi_of_per(per).d
    except Exception as exc:  # scans keep going past per-point failures
        row["status"] = "failed" if row["fold_x"] is None else "partial"
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def cmd_scan(cfg):
    num = max(0, cfg["num"])
    if num and (cfg["start"] is None or cfg["stop"] is None):
        raise UsageError("scan needs --start and --stop when --num > 0")
    if cfg["param"] not in ("a", "b", "c"):
        raise UsageError("--param must be a, b or c")
    values = list(np.linspace(cfg["start"], cfg["stop"], num)) if num else []
    base = (cfg["a"], cfg["b"], cfg["c"])
    jobs = [(base, cfg["param"], float(v), cfg["n"], cfg["k_max"], cfg["n_knead"], cfg["tol"]) for v in values]
    if cfg["workers"] > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg["workers"]) as ex:
            rows = list(ex.map(scan_point, jobs))
    else:
        rows = [scan_point(j) for j in jobs]
    for r in rows:
        if r["error"]:
            log.warning("scan %s=%s: %s", r["param"], r["value"], r["error"])
    if cfg["csv"]:
        io.write_csv(cfg["csv"], io.SCAN_HEADER,
                     ([("" if r[h] is None else r[h]) for h in io.SCAN_HEADER] for r in rows))
    _emit(cfg, {"n_values": len(rows), "n_failed": sum(r["status"] == "failed" for r in rows), "rows": rows})


HANDLERS = {
    "fixed-points": cmd_fixed_points, "integrate": cmd_integrate, "return-map": cmd_return_map,
    "itinerary": cmd_itinerary, "periodic": cmd_periodic, "attractor-check": cmd_attractor_check,
    "repeller-check": cmd_repeller_check, "trapping-certify": cmd_trapping_certify,
    "trefoil-defect": cmd_trefoil_defect, "knead": cmd_knead, "admissible": cmd_admissible,
    "c-sup": cmd_c_sup, "pi": cmd_pi, "match": cmd_match, "scan": cmd_scan,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = resolve(args)
        cfg["_command"] = args.command
        HANDLERS[args.command](cfg)
    except (UsageError, ValueError, OSError) as exc:
        if isinstance(exc, DomainError):
            log.error("%s", exc)
            return EXIT_DOMAIN
        log.error("%s", exc)
        return EXIT_USAGE
    except DomainError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_DOMAIN
    except RosslerLabError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
