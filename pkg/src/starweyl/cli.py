"""Command line entry point: ``starweyl run | eval | list-scenarios``."""

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from . import berezin, expr, gauss_calc, tau_dynamics, transcend
from .scenarios import SCENARIOS, k_matrices

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_UNKNOWN_SCENARIO = 2
EXIT_BAD_CONFIG = 3
EXIT_PARSE = 4
EXIT_UNSUPPORTED = 5
EXIT_NUMERICAL = 6

NUMERICAL_ERRORS = (gauss_calc.BranchSingularityError, gauss_calc.DomainError, transcend.ConvergenceError,
                    tau_dynamics.ResolutionError, tau_dynamics.SingularSynthesisError,
                    berezin.TruncationError, berezin.QuadratureError)


class ConfigError(ValueError):
    pass


def load_config(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError("cannot read config %s: %s" % (path, e)) from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a mapping")
    version = cfg.get("version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError("unsupported config version %r (expected %d)" % (version, SCHEMA_VERSION))
    hbar = cfg.get("hbar", 1.0)
    if not isinstance(hbar, (int, float)) or hbar <= 0:
        raise ConfigError("hbar must be a positive number")
    kspec = cfg.get("K", {"kind": "weyl"})
    if not isinstance(kspec, dict) or kspec.get("kind") not in ("weyl", "normal", "explicit", "random-generic"):
        raise ConfigError("K.kind must be one of weyl, normal, explicit, random-generic")
    return cfg


def thread_count():
    raw = os.environ.get("STARWEYL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError("STARWEYL_THREADS must be an integer, got %r" % raw) from None


def make_pmap(threads):
    if threads <= 1:
        return lambda f, items: [f(x) for x in items]

    def pmap(f, items):
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(f, items))   # map keeps input order
    return pmap


def _write_table(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


def _dump(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_default)
        fh.write("\n")


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, (complex, np.complexfloating)):
        return [float(o.real), float(o.imag)]
    if isinstance(o, (np.bool_,)):
        return bool(o)
    raise TypeError("not serializable: %r" % type(o))


def run_scenario(name, cfg, out_dir, threads=1):
    """Run one scenario, write report.json and CSV tables into out_dir, return (exit_code, report)."""
    if name not in SCENARIOS:
        raise KeyError(name)
    res = SCENARIOS[name](cfg, make_pmap(threads))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = {"scenario": name, "schema_version": SCHEMA_VERSION, "config": cfg,
              "passed": res.passed, "checks": res.checks, "data": res.data,
              "files": sorted(res.tables)}
    for fname, (header, rows) in res.tables.items():
        _write_table(out / fname, header, rows)
    _dump(report, out / ("%s.json" % name))
    return (EXIT_OK if res.passed else EXIT_ASSERTION), report


def eval_expression(text, cfg, out_dir=None):
    m = max(int(cfg.get("m", 1)), expr.required_m(text))
    hbar = float(cfg.get("hbar", 1.0))
    kind = cfg.get("K", {"kind": "weyl"}).get("kind", "weyl")
    # floats are binary rationals, so only the random-generic preset forces numerics
    if kind != "random-generic":
        ev = expr.Evaluator(m, hbar, K_exact=k_matrices(cfg, m, exact=True)[0])
    else:
        ev = expr.Evaluator(m, hbar, K_numeric=k_matrices(cfg, m)[0])
    value = ev(text)
    if expr._is_scalar(value):
        value = ev._lift(value)
    pts = ev.ctx.grid()
    vals = expr.evaluate_on(value, ev, pts)
    matches = {}
    for name, fn in expr.NAMED.items():
        ref = fn(ev.ctx, 0).evaluate(pts)
        matches[name] = bool(np.max(np.abs(vals - ref)) <= 1e-10 * max(np.max(np.abs(ref)), 1.0))
    report = {"expression": text, "m": m, "hbar": hbar, "K": cfg.get("K", {"kind": "weyl"}),
              "result": expr.serialize(value, m), "equals_named": matches}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _dump(report, out / "eval.json")
        names = ["x%d" % k for k in range(m)] + ["y%d" % k for k in range(m)]
        header = [h for nme in names for h in (nme + "_re", nme + "_im")] + ["re", "im"]
        rows = [[*(c for z in p for c in (z.real, z.imag)), v.real, v.imag] for p, v in zip(pts, vals)]
        _write_table(out / "eval_grid.csv", header, rows)
    return report


def build_parser():
    p = argparse.ArgumentParser(prog="starweyl", description="Star-product calculus verification runner")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a named scenario")
    r.add_argument("scenario")
    r.add_argument("--config", default=None, help="YAML or JSON config file")
    r.add_argument("--out", default="out", help="output directory")
    e = sub.add_parser("eval", help="evaluate an expression")
    e.add_argument("expression")
    e.add_argument("--config", default=None)
    e.add_argument("--out", default=None)
    sub.add_parser("list-scenarios", help="print scenario names")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list-scenarios":
            for name in SCENARIOS:
                print(name)
            return EXIT_OK
        cfg = load_config(args.config)
        if args.command == "run":
            if args.scenario not in SCENARIOS:
                print("unknown scenario %r; see list-scenarios" % args.scenario, file=sys.stderr)
                return EXIT_UNKNOWN_SCENARIO
            code, report = run_scenario(args.scenario, cfg, args.out, thread_count())
            for c in report["checks"]:
                flag = "PASS" if c["pass"] else ("FAIL" if c["asserted"] else "note")
                print("%-4s %s: %s" % (flag, c["name"], c["value"]))
            return code
        report = eval_expression(args.expression, cfg, args.out)
        print(json.dumps(report, indent=2, sort_keys=True, default=_default))
        return EXIT_OK
    except ConfigError as e:
        print("config error: %s" % e, file=sys.stderr)
        return EXIT_BAD_CONFIG
    except expr.ParseError as e:
        print("parse error: %s" % e, file=sys.stderr)
        return EXIT_PARSE
    except expr.UnsupportedError as e:
        print("unsupported: %s" % e, file=sys.stderr)
        return EXIT_UNSUPPORTED
    except NUMERICAL_ERRORS as e:
        print("numerical error: %s" % e, file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, KeyError) as e:
        print("config error: %s" % e, file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
