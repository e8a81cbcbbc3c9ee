"""Command-line front end: scenario ingestion, exports, and check suites.

Subcommands: worldsheet, distance, energy, backtrack, compose, check.
Scenario configs are JSON files naming a manifold, path and field
generators (or inline arrays), an interval, resolution, and tolerances.
Exit code 0 means every requested check passed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import backtrack as bt
from . import category as cat
from . import checks
from . import manifold as mf
from . import path as pth
from . import pathspace as ps
from . import serialize as ser
from .manifold import DomainError, GeometryError


class ConfigError(DomainError):
    """Scenario configuration is missing or invalid."""


class ScenarioConfig:
    """Validated scenario: manifold, named paths/fields, interval, resolution."""

    def __init__(self, data):
        if "manifold" not in data:
            raise ConfigError("config needs a 'manifold' entry")
        self.manifold = mf.ManifoldSpec.from_json(data["manifold"])
        self.paths = dict(data.get("paths", {}))
        self.fields = dict(data.get("fields", {}))
        self.interval = tuple(float(v) for v in data.get("interval", (0.0, 1.0)))
        res = dict(data.get("resolution", {}))
        self.N = int(res.get("N", pth.DEFAULT_GRID))
        self.S = int(res.get("S", 16))
        self.steps_per_unit = int(res.get("steps_per_unit", 1000))
        self.tolerances = {k: float(v) for k, v in data.get("tolerances", {}).items()}
        self._validate()
        self._path_cache = {}

    def _validate(self):
        if self.N <= 0 or self.S <= 0 or self.steps_per_unit <= 0:
            raise ConfigError("resolution values must be positive")
        if self.N & (self.N - 1) != 0:
            raise ConfigError("resolution N must be a power of two (got %d)" % self.N)
        if len(self.interval) != 2 or self.interval[0] > self.interval[1]:
            raise ConfigError("interval must be a pair (a, b) with a <= b")
        for name, d in self.fields.items():
            ref = d.get("path")
            if ref is not None and ref not in self.paths:
                raise ConfigError(
                    "field %r references unknown path %r" % (name, ref)
                )

    @classmethod
    def load(cls, filename):
        try:
            with open(filename) as fh:
                return cls(json.load(fh))
        except OSError as err:
            raise ConfigError("cannot read config %s: %s" % (filename, err))
        except json.JSONDecodeError as err:
            raise ConfigError("config %s is not valid JSON: %s" % (filename, err))

    def tolerance(self, name, default):
        return self.tolerances.get(name, default)

    def build_path(self, name):
        if name in self._path_cache:
            return self._path_cache[name]
        if name not in self.paths:
            raise ConfigError("unknown path %r (have: %s)" % (name, ", ".join(sorted(self.paths)) or "none"))
        d = dict(self.paths[name])
        try:
            if "samples" in d:
                gamma = pth.DiscretePath(
                    self.manifold,
                    np.asarray(d["samples"], dtype=float),
                    float(d.get("collar", 0.0)),
                )
            else:
                gen = d.pop("generator", None)
                if gen not in pth.GENERATORS:
                    raise ConfigError(
                        "path %r needs 'samples' or a known generator (%s)"
                        % (name, ", ".join(sorted(pth.GENERATORS)))
                    )
                d.setdefault("n", self.N)
                gamma = pth.GENERATORS[gen](self.manifold, **d)
        except TypeError as err:
            raise ConfigError("path %r: bad generator parameters (%s)" % (name, err))
        except GeometryError as err:
            raise ConfigError("path %r: %s" % (name, err))
        self._path_cache[name] = gamma
        return gamma

    def build_field(self, name):
        if name not in self.fields:
            raise ConfigError("unknown field %r (have: %s)" % (name, ", ".join(sorted(self.fields)) or "none"))
        d = dict(self.fields[name])
        ref = d.pop("path", None)
        if ref is None:
            raise ConfigError("field %r needs a 'path' reference" % name)
        gamma = self.build_path(ref)
        try:
            gen = d.pop("generator", None)
            if gen is None:
                if "components" not in d:
                    raise ConfigError("field %r needs a generator or inline 'components'" % name)
                return pth.PathTangentField(gamma, np.asarray(d["components"], dtype=float))
            if gen == "constant_in_chart":
                return pth.make_constant_field(gamma, d["components"])
            if gen == "normal_to_path":
                return pth.make_normal_field(gamma, float(d.get("scale", 1.0)))
            if gen == "zero":
                return pth.make_zero_field(gamma)
            raise ConfigError(
                "field %r: unknown generator %r (%s)"
                % (name, gen, ", ".join(sorted(pth.FIELD_GENERATORS)))
            )
        except KeyError as err:
            raise ConfigError("field %r: missing parameter %s" % (name, err))
        except GeometryError as err:
            raise ConfigError("field %r: %s" % (name, err))


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _write(outdir, filename, text):
    if outdir:
        os.makedirs(outdir, exist_ok=True)
        full = os.path.join(outdir, filename)
        with open(full, "w") as fh:
            fh.write(text)
        return full
    return None


def _emit_report(args, filename, report):
    text = ser.dumps(report)
    written = _write(args.out, filename, text)
    sys.stdout.write(text)
    if written:
        print("wrote %s" % written, file=sys.stderr)


def _load_config(args, required=True):
    if not args.config:
        if required:
            raise ConfigError("this subcommand needs --config FILE")
        return None
    return ScenarioConfig.load(args.config)


def _single_name(config, kind, requested):
    table = config.paths if kind == "path" else config.fields
    if requested:
        return requested
    if len(table) == 1:
        return next(iter(table))
    raise ConfigError(
        "config defines %d %ss; select one with --%s" % (len(table), kind, kind)
    )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_worldsheet(args):
    config = _load_config(args)
    gamma = config.build_path(_single_name(config, "path", args.path))
    field = config.build_field(_single_name(config, "field", args.field))
    sheet = ps.pathspace_geodesic(
        gamma, field, config.interval, config.S, steps_per_unit=config.steps_per_unit
    )
    if args.format == "csv":
        _write(args.out, "worldsheet.csv", ser.sheet_to_csv(sheet))
    elif args.format == "obj":
        _write(args.out, "worldsheet.obj", ser.sheet_to_obj(sheet))
    else:
        _write(args.out, "worldsheet.json", ser.dumps(sheet.to_json()))
    summary = {
        "energy": ps.sheet_energy(sheet),
        "length": ps.sheet_length(sheet),
        "fiber_residual_max": ps.transverse_residual(sheet),
    }
    _emit_report(args, "summary.json", summary)
    return 0


def cmd_distance(args):
    config = _load_config(args)
    g1 = config.build_path(args.path1)
    g2 = config.build_path(args.path2)
    dtilde = ps.pathspace_distance(g1, g2)
    sheet = ps.connecting_geodesic(g1, g2, S=config.S)
    length = ps.sheet_length(sheet)
    diff = abs(length - dtilde)
    tol = config.tolerance("distance", 1e-4)
    report = {
        "dtilde": dtilde,
        "sheet_length": length,
        "difference": diff,
        "tolerance": tol,
        "passed": diff <= tol,
    }
    _emit_report(args, "distance.json", report)
    return 0 if diff <= tol else 1


def cmd_energy(args):
    config = _load_config(args)
    names = [args.path] if args.path else sorted(config.paths)
    if not names:
        raise ConfigError("config defines no paths")
    report = {}
    for name in names:
        gamma = config.build_path(name)
        report[name] = {
            "energy": pth.path_energy(gamma),
            "arc_length": pth.arc_length(gamma),
        }
    _emit_report(args, "energy.json", report)
    return 0


def cmd_backtrack(args):
    if args.input:
        with open(args.input) as fh:
            gamma = pth.DiscretePath.from_json(json.load(fh))
    else:
        config = _load_config(args)
        gamma = config.build_path(_single_name(config, "path", args.path))
    if args.canonical:
        out = bt.canonical_form(gamma, args.tol)
        _emit_report(args, "canonical.json", out.to_json())
    else:
        wins = bt.detect_backtracks(gamma, args.tol)
        _emit_report(
            args,
            "windows.json",
            [{"start": w.start, "half_width": w.half_width, "end": w.end} for w in wins],
        )
    return 0


def _load_morphism(filename):
    with open(filename) as fh:
        return ser.morphism_from_json(json.load(fh))


def cmd_compose(args):
    ms = [_load_morphism(f) for f in args.files]
    if len(ms) == 4:
        if not all(isinstance(m, cat.GeodMorphism2) for m in ms):
            raise DomainError("exchange check needs four 2-morphism files")
        F1, G1, F2, G2 = ms
        report = cat.check_exchange(F1, G1, F2, G2, tol=args.tol)
        _emit_report(args, "exchange.json", report.to_json())
        return 0 if report.passed else 1
    if len(ms) != 2:
        raise DomainError("compose needs exactly two or four morphism files")
    g, f = ms
    if isinstance(f, cat.GeodMorphism1) and isinstance(g, cat.GeodMorphism1):
        out = cat.compose1(g, f)
        _emit_report(args, "composite.json", ser.morphism1_to_json(out))
        return 0
    if isinstance(f, cat.GeodMorphism2) and isinstance(g, cat.GeodMorphism2):
        if args.horizontal:
            out = cat.compose2_horizontal(f, g)
        else:
            out = cat.compose2_vertical(g, f)
        _emit_report(args, "composite.json", ser.morphism2_to_json(out))
        return 0
    raise DomainError("cannot mix 1-morphism and 2-morphism files")


def cmd_check(args):
    config = _load_config(args, required=False)
    report = checks.run_checks(args.suite, seed=args.seed, cases=args.cases, config=config)
    _emit_report(args, "report.json", report)
    return 0 if report["passed"] else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="scenario config (JSON)")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument(
        "--seed", type=int, default=checks.DEFAULT_SEED, help="RNG seed (default 42)"
    )
    common.add_argument(
        "--format",
        choices=("csv", "json", "obj"),
        default="json",
        help="export format for grid data (default json)",
    )

    parser = argparse.ArgumentParser(
        prog="pathgeo",
        description="Geodesics, transport, and composition laws on spaces of paths.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("worldsheet", parents=[common], help="generate and export a geodesic worldsheet")
    p.add_argument("--path", help="seed path name in the config")
    p.add_argument("--field", help="seed field name in the config")
    p.set_defaults(func=cmd_worldsheet)

    p = sub.add_parser("distance", parents=[common], help="path-space distance between two config paths")
    p.add_argument("--path1", default="path1", help="first path name (default path1)")
    p.add_argument("--path2", default="path2", help="second path name (default path2)")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("energy", parents=[common], help="energy and arc length of config paths")
    p.add_argument("--path", help="path name (default: all)")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("backtrack", parents=[common], help="back-track windows or canonical form of a path")
    p.add_argument("--input", metavar="FILE", help="path JSON file (instead of --config)")
    p.add_argument("--path", help="path name in the config")
    p.add_argument("--tol", type=float, default=bt.DETECT_TOL, help="detection tolerance")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--windows", action="store_true", help="list windows (default)")
    group.add_argument("--canonical", action="store_true", help="emit the canonical path")
    p.set_defaults(func=cmd_backtrack)

    p = sub.add_parser("compose", parents=[common], help="compose morphism files or check the exchange law")
    p.add_argument("files", nargs="+", metavar="FILE", help="two morphism files, or four for exchange")
    p.add_argument("--horizontal", action="store_true", help="horizontal 2-composition (default vertical)")
    p.add_argument("--tol", type=float, default=1e-9, help="exchange tolerance")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("check", parents=[common], help="run a property suite")
    p.add_argument("--suite", required=True, choices=checks.SUITES, help="suite to run")
    p.add_argument("--cases", type=int, default=10, help="random cases per property")
    p.set_defaults(func=cmd_check)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GeometryError as err:
        print("error: %s" % err, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
