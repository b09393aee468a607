"""Command line entry point.

    dsloc run <config> [--window-margin N] [--format text|structured] [--probe-points FILE]
    dsloc catalog <name|all> [--window-margin N] [--format text|structured]

Exit codes: 0 pass, 1 check failure, 2 config error, 3 instability.
"""

from __future__ import annotations

import argparse
import sys

from .cohomology import DEFAULT_MARGIN, DegreeWindow, Grading, ds_cohomology
from .config import RunConfig, parse_config, parse_points
from .derham import build_pi_tangent, de_rham_dims
from .algebra import Presentation
from .derivation import Derivation
from .errors import ConfigError, DslocError
from .geometry import (CoordinateSubvariety, RationalPoint, find_primitive, koszul_build,
                       koszul_default_window, koszul_verify, localization_check)
from .parser import parse_expression, render
from .report import emit_report
from .scenarios import ScenarioResult, catalog_names, run_catalog

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_UNSTABLE = 0, 1, 2, 3


def exit_code(results: list) -> int:
    if any(not r.stable for r in results):
        return EXIT_UNSTABLE
    if any(not r.passed for r in results):
        return EXIT_FAIL
    return EXIT_PASS


def _window(cfg: RunConfig) -> DegreeWindow:
    return DegreeWindow.make({v: (lo, hi) for v, lo, hi in cfg.bounds}, cfg.cap)


def _grading(cfg: RunConfig):
    if not cfg.functionals:
        return None
    return Grading.make({label: dict(fn) for label, fn in cfg.functionals})


def _derivation(cfg: RunConfig):
    pres = cfg.presentation()
    return pres, Derivation(pres, {v: parse_expression(e, pres) for v, e in cfg.images})


def _expectations(res: ScenarioResult, cfg: RunConfig, totals):
    if cfg.expect_superdim is not None:
        res.check(f"superdimension {tuple(cfg.expect_superdim)}", tuple(totals) == tuple(cfg.expect_superdim),
                  f"got {tuple(totals)}")


def execute(cfg: RunConfig, margin: int | None = None, probe_points=None) -> list:
    """Run a validated configuration; returns a list of ScenarioResult."""
    m = margin if margin is not None else (cfg.margin if cfg.margin is not None else DEFAULT_MARGIN)
    kind = cfg.kind
    if kind == "catalog":
        return run_catalog([cfg.name], m)
    res = ScenarioResult(f"{kind}")
    if kind == "koszul":
        scn = koszul_build(cfg.koszul_t, cfg.koszul_base)
        w = _window(cfg) if (cfg.cap is not None or cfg.bounds) else koszul_default_window(scn)
        chk = koszul_verify(scn, w, m)
        res.add_report("koszul", chk.report)
        res.check("cohomology concentrated in xi-degree 0 with dims of A0/(t)", chk.ok,
                  f"mismatches {chk.mismatches}")
        return [res]
    if kind == "derham":
        base = Presentation.build(even=cfg.pi_base, laurent=cfg.pi_laurent)
        scn = build_pi_tangent(base)
        w = _window(cfg) if (cfg.cap is not None or cfg.bounds) else None
        out = de_rham_dims(scn, w, m)
        res.add_report("de Rham", out.report)
        res.check(f"de Rham dims {out.dims}", True)
        if cfg.expect_dims is not None:
            res.check(f"expected dims {tuple(cfg.expect_dims)}", out.dims == tuple(cfg.expect_dims),
                      f"got {out.dims}")
        _expectations(res, cfg, out.report.totals())
        return [res]
    pres, Q = _derivation(cfg)
    window = _window(cfg)
    grading = _grading(cfg)
    points = probe_points if probe_points is not None else cfg.probe_points
    points = [RationalPoint(tuple(p)) for p in points]
    if kind == "ds":
        rep = ds_cohomology(pres, Q, window, m, grading)
        res.add_report("ds", rep)
        _expectations(res, cfg, rep.totals())
    elif kind == "localize":
        Y = CoordinateSubvariety(pres, tuple(cfg.subvariety))
        loc = localization_check(Q, Y, points, window, m, grading)
        res.add_report("X", loc.ds_x)
        if loc.ds_y.dims or loc.hypotheses.ideal_stable:
            res.add_report("Y", loc.ds_y)
        res.check(f"hypotheses ({loc.hypotheses.label})", loc.hypotheses.all_pass,
                  "; ".join(loc.hypotheses.failures()))
        res.check("DS(X) = DS(Y) per key", loc.agree)
        _expectations(res, cfg, loc.ds_x.totals())
    elif kind == "primitive":
        cert = [(parse_expression(g, pres), parse_expression(x, pres)) for g, x in cfg.certificate]
        xi = find_primitive(Q, cert)
        res.check(f"primitive xi = {render(xi)} with Q(xi) = 1", Q(xi) == pres.const(1))
        rep = ds_cohomology(pres, Q, window, m, grading)
        res.add_report("ds", rep)
        res.check("DS = 0", rep.is_zero(), f"got {rep.nonzero()}")
        _expectations(res, cfg, rep.totals())
    return [res]


def _load_points(path: str):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    pts = []
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        pts += list(parse_points(line, ln, 1))
    return pts


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dsloc", description="Windowed DS cohomology of odd vector fields.")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--window-margin", type=int, default=None, metavar="N")
    common.add_argument("--format", choices=("text", "structured"), default=None)
    run = sub.add_parser("run", parents=[common], help="run a configuration file")
    run.add_argument("config")
    run.add_argument("--probe-points", default=None, metavar="FILE")
    cat = sub.add_parser("catalog", parents=[common], help="run built-in scenarios")
    cat.add_argument("name", help="scenario name or 'all'")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.window_margin is not None and args.window_margin < 0:
        print("error: --window-margin must be non-negative", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "catalog":
            fmt = args.format or "text"
            margin = DEFAULT_MARGIN if args.window_margin is None else args.window_margin
            unknown = [n for n in args.name.split(",") if n != "all" and n not in catalog_names()]
            if unknown:
                print(f"config error: unknown scenario(s) {unknown}; available: {', '.join(catalog_names())}",
                      file=sys.stderr)
                return EXIT_CONFIG
            results = run_catalog(args.name.split(","), margin)
        else:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    cfg = parse_config(fh.read())
                points = _load_points(args.probe_points) if args.probe_points else None
            except OSError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_CONFIG
            fmt = args.format or cfg.output
            results = execute(cfg, args.window_margin, points)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DslocError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(emit_report(results, fmt))
    code = exit_code(results)
    if code == EXIT_UNSTABLE:
        print("unstable: dimensions changed under a larger margin; enlarge the window or margin",
              file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
