"""Command-line interface.

Exit codes: 0 success, 2 usage, 3 numeric failure or divergence,
4 bracket/sign failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .coeffs import DEFAULT_N_MAX, SIGN_MARGIN, find_transition, jacobi_coefficients
from .errors import (
    BracketError,
    DegenerateStartError,
    DivergentEnergyError,
    DomainError,
    QuadratureError,
    ResourceError,
    SamplingError,
    UnsupportedSpaceError,
)
from .jacobi import DEFAULT_TOL, JacobiParams, gauss_jacobi
from .kernels import AcuteAnglePower, kernel_family, parse_kernel
from .measures import DiscreteMeasure, PoleEquatorMeasure, energy_discrete, energy_pole_equator, energy_uniform
from .optimize import OptimizationConfig, configuration_stats, optimize_configuration
from .spaces import FIELDS, Family, SpaceDescriptor, geodesic_distance, isometry_tau, random_point

log = logging.getLogger("riesz")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_BRACKET = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else "-inf" if x < 0 else "nan"
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return _jsonable(x.item())
    return x


def _dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _fmt(v: float) -> str:
    return "inf" if v == math.inf else repr(float(v))


class Reporter:
    """Collects artifacts of one command and writes them with a manifest."""

    def __init__(self, args, inputs: dict):
        self.args = args
        self.inputs = inputs
        self.started = datetime.now(timezone.utc).isoformat()
        self.outputs: list[str] = []
        self.out = Path(args.out) if getattr(args, "out", None) else None
        if self.out is not None:
            self.out.mkdir(parents=True, exist_ok=True)

    @property
    def digest(self) -> str:
        return hashlib.sha256(json.dumps(_jsonable(self.inputs), sort_keys=True).encode()).hexdigest()

    def _write(self, name, text):
        if self.out is None:
            return
        (self.out / name).write_text(text)
        self.outputs.append(name)

    def json(self, name, payload):
        if self.args.format in ("json", "both"):
            self._write(name, _dumps(payload))

    def csv(self, name, text):
        if self.args.format in ("csv", "both"):
            self._write(name, text)

    def always(self, name, text):
        self._write(name, text)

    def finish(self):
        if self.out is None:
            return
        manifest = {
            "command": sys.argv[:1] + list(self.args.argv),
            "config_digest": self.digest,
            "inputs": self.inputs,
            "seed": self.inputs.get("seed"),
            "version": __version__,
            "started": self.started,
            "finished": datetime.now(timezone.utc).isoformat(),
            "outputs": sorted(self.outputs + ["manifest.json"]),
        }
        (self.out / "manifest.json").write_text(_dumps(manifest))


def _space(spec):
    try:
        return SpaceDescriptor.parse(spec)
    except (ValueError, DomainError) as exc:
        raise UsageError(str(exc)) from exc


def _kernel(spec):
    try:
        return parse_kernel(spec)
    except (ValueError, DomainError) as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# commands


def cmd_coeffs(args) -> int:
    space, kernel = _space(args.space), _kernel(args.kernel)
    rep = Reporter(args, {"space": str(space), "kernel": kernel.spec, "n_max": args.n_max, "tol": args.tol})
    table = jacobi_coefficients(space, kernel, args.n_max, args.tol)
    signs = table.signs(SIGN_MARGIN)[1:]
    neg = [n for n, sg in enumerate(signs, start=1) if sg == "negative"]
    ind = [n for n, sg in enumerate(signs, start=1) if sg == "indeterminate"]
    payload = table.to_dict()
    payload["summary"] = {
        "all_positive": not neg and not ind,
        "negative": neg,
        "indeterminate": ind,
        "min_n>=1": float(table.values[1:].min()) if table.n_max else None,
    }
    rep.json("coefficients.json", payload)
    rep.csv("coefficients.csv", table.to_csv())
    print(table.to_csv(), end="")
    if neg:
        print(f"# negative coefficients at n = {neg}")
    if ind:
        print(f"# indeterminate (|value| <= {SIGN_MARGIN:g}) at n = {ind}")
    if not neg and not ind:
        print(f"# all coefficients n = 1..{table.n_max} positive")
    rep.finish()
    return EXIT_OK


def cmd_transition(args) -> int:
    space = _space(args.space)
    try:
        kernel_family(args.family)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    lo, hi = args.bracket
    inputs = {"space": str(space), "family": args.family, "bracket": [lo, hi], "n_max": args.n_max, "tol": args.tol,
              "coef_tol": args.coef_tol}
    rep = Reporter(args, inputs)
    try:
        report = find_transition(space, args.family, (lo, hi), args.n_max, args.tol, args.coef_tol)
    except BracketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"lo {lo!r}: {exc.lo_value!r}\nhi {hi!r}: {exc.hi_value!r}")
        return EXIT_BRACKET
    payload = report.to_dict()
    rep.json("transition.json", payload)
    rows = ["param,statistic,n"] + [f"{h['param']!r},{h['statistic']!r},{h['n']}" for h in report.history]
    rep.csv("transition_history.csv", "\n".join(rows) + "\n")
    print(f"estimate {report.estimate!r} bracket [{report.bracket[0]!r}, {report.bracket[1]!r}] n_max {report.n_max}")
    rep.finish()
    return EXIT_OK


def _measure_energy(space, kernel, spec, tol):
    if spec == "sigma":
        return energy_uniform(space, kernel, tol)
    if spec == "onb":
        return energy_discrete(space, kernel, DiscreteMeasure.onb(space))
    if spec.startswith("pole-equator:"):
        parts = spec.split(":")
        if len(parts) != 3 or parts[2] not in ("uniform", "pair"):
            raise UsageError("pole-equator measures are written pole-equator:<w>:<uniform|pair>")
        if not (space.family is Family.SPHERE and space.d == 2 and isinstance(kernel, AcuteAnglePower)):
            raise UsageError("pole-equator energies are defined on S:2 for acute-angle kernels")
        try:
            pe = PoleEquatorMeasure(float(parts[1]), parts[2])
        except (ValueError, DomainError) as exc:
            raise UsageError(str(exc)) from exc
        return energy_pole_equator(kernel.lam, pe)
    if spec.startswith("file:"):
        try:
            mu = DiscreteMeasure.load(spec[5:])
        except (OSError, KeyError, ValueError, DomainError) as exc:
            raise UsageError(f"cannot read measure file: {exc}") from exc
        if mu.space != space:
            raise UsageError(f"measure file is on {mu.space}, not {space}")
        return energy_discrete(space, kernel, mu)
    raise UsageError(f"bad measure spec {spec!r}")


def cmd_energy(args) -> int:
    space, kernel = _space(args.space), _kernel(args.kernel)
    rep = Reporter(args, {"space": str(space), "kernel": kernel.spec, "measure": args.measure, "tol": args.tol})
    value = _measure_energy(space, kernel, args.measure, args.tol)
    rep.json("energy.json", {"space": str(space), "kernel": kernel.spec, "measure": args.measure, "energy": value})
    rep.csv("energy.csv", f"space,kernel,measure,energy\n{space},{kernel.spec},{args.measure},{_fmt(value)}\n")
    print(_fmt(value))
    rep.finish()
    return EXIT_OK


def cmd_optimize(args) -> int:
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
    else:
        data = {}
    for key, val in (("space", args.space), ("kernel", args.kernel), ("N", args.n), ("restarts", args.restarts),
                     ("seed", args.seed), ("max_iters", args.max_iters)):
        if val is not None:
            data[key] = val
    missing = [k for k in ("space", "kernel", "N") if k not in data]
    if missing:
        flags = {"space": "--space", "kernel": "--kernel", "N": "--n"}
        raise UsageError("missing required option(s): " + ", ".join(flags[k] for k in missing))
    data.setdefault("restarts", 10)
    data.setdefault("seed", 0)
    try:
        cfg = OptimizationConfig.from_dict(data)
    except (ValueError, TypeError, DomainError, UnsupportedSpaceError) as exc:
        raise UsageError(f"invalid optimization config: {exc}") from exc
    rep = Reporter(args, cfg.to_dict())
    run = optimize_configuration(cfg)
    stats = configuration_stats(run.best_points)
    payload = run.to_dict()
    payload["stats"] = {"max_cap_mass": stats.max_cap_mass, "band_mass": stats.band_mass, "radius": stats.radius}
    rep.json("run.json", payload)
    rep.always("trace.csv", run.trace_csv())
    rep.csv("angles.csv", stats.histogram_csv())
    print(f"best energy {run.best_energy!r} (restart {run.best_restart}, {run.iterations[run.best_restart]} iterations)")
    rep.finish()
    return EXIT_OK


def cmd_isometry_check(args) -> int:
    fld = args.field.upper()
    if fld not in FIELDS:
        raise UsageError(f"unknown field {args.field!r}")
    if fld == "O":
        print("error: the octonionic line is not supported at point level", file=sys.stderr)
        return EXIT_USAGE
    rep = Reporter(args, {"field": fld, "pairs": args.pairs, "seed": args.seed})
    rng = np.random.default_rng(args.seed)
    line = SpaceDescriptor(FIELDS[fld], 1)
    sphere = SpaceDescriptor(Family.SPHERE, line.field_dim)
    P = random_point(line, rng, args.pairs)
    Q = random_point(line, rng, args.pairs)
    dev = np.abs(
        geodesic_distance(line, P, Q)
        - geodesic_distance(sphere, isometry_tau(fld, P[:, 0], P[:, 1]), isometry_tau(fld, Q[:, 0], Q[:, 1]))
    )
    payload = {"field": fld, "pairs": args.pairs, "seed": args.seed, "max_deviation": float(dev.max())}
    rep.json("isometry.json", payload)
    rep.csv("isometry.csv", "field,pairs,seed,max_deviation\n" f"{fld},{args.pairs},{args.seed},{dev.max()!r}\n")
    print(f"max deviation {dev.max():.3e} over {args.pairs} pairs")
    rep.finish()
    return EXIT_OK


def cmd_quadrature(args) -> int:
    space = _space(args.space)
    rule = gauss_jacobi(JacobiParams.from_space(space), args.nodes)
    rep = Reporter(args, {"space": str(space), "nodes": args.nodes})
    rep.always("rule.csv", rule.to_csv())
    print(rule.to_csv(), end="")
    rep.finish()
    return EXIT_OK


# ---------------------------------------------------------------------------


def _common(p, fmt=True):
    p.add_argument("--out", help="directory for report files")
    if fmt:
        p.add_argument("--format", choices=("json", "csv", "both"), default="both")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="riesz", description="Riesz energies and Jacobi coefficients on projective spaces")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="Jacobi coefficients of a kernel")
    p.add_argument("space")
    p.add_argument("kernel")
    p.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _common(p)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("transition", help="bisect for a sign change of the extremal coefficient")
    p.add_argument("space")
    p.add_argument("family", help="geo, chord or acute")
    p.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"), required=True)
    p.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    p.add_argument("--tol", type=float, default=1e-3, help="bisection width")
    p.add_argument("--coef-tol", type=float, default=DEFAULT_TOL)
    _common(p)
    p.set_defaults(func=cmd_transition)

    p = sub.add_parser("energy", help="energy of a measure")
    p.add_argument("space")
    p.add_argument("kernel")
    p.add_argument("measure", help="sigma, onb, pole-equator:<w>:<uniform|pair> or file:<path>")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _common(p)
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("optimize", help="optimize a discrete configuration")
    p.add_argument("--config", help="JSON file with OptimizationConfig fields")
    p.add_argument("--space")
    p.add_argument("--kernel")
    p.add_argument("--n", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-iters", type=int)
    _common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("isometry-check", help="compare FP^1 distances with their sphere images")
    p.add_argument("field", help="R, C or H")
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    _common(p)
    p.set_defaults(func=cmd_isometry_check)

    p = sub.add_parser("quadrature", help="dump a Gauss-Jacobi rule as CSV")
    p.add_argument("space")
    p.add_argument("--nodes", type=int, default=128)
    _common(p, fmt=False)
    p.set_defaults(func=cmd_quadrature)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, UnsupportedSpaceError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BracketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BRACKET
    except (DivergentEnergyError, QuadratureError, DegenerateStartError, SamplingError, DomainError,
            ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
