"""Command-line interface.

Every subcommand accepts ``--config FILE``, a JSON object whose keys are
option names (``rmax``, ``gamma``, ...); options given on the command line
override the file.  Exit codes: 0 success, 2 invalid input, 3 numerical
failure, 4 I/O failure.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import report as rp
from .ball import ProblemConfig, spectrum_up_to
from .branches import (
    H0_DEFAULT,
    MonotonicityConstants,
    branch_samples,
    monotonicity_audit,
    zero_crossing,
)
from .errors import DissipWeylError, EmptyWindow, IoError, ValidationError
from .expr import parse_damping
from .radial import L_MAX
from .symbol_jets import CHARTS, general_symbol, pde_residual_order
from .weyl import Ellipsoid, Sphere, weyl_coefficient
from .wkb import error_scaling_test


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _degree_range(text):
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return range(int(lo), int(hi) + 1)
        return range(int(text), int(text) + 1)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected L or L0..L1, got {text!r}") from exc


def _problem_args(p, rmax=True):
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--lmax", type=int, default=L_MAX)
    if rmax:
        p.add_argument("--rmax", type=float, default=50.0)


def build_parser():
    parser = argparse.ArgumentParser(prog="dissipweyl", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues of the damped ball")
    _problem_args(p)
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = sub.add_parser("count", help="counting function and remainder statistics")
    _problem_args(p)
    p.set_defaults(rmax=200.0)
    p.add_argument("--rmin", type=float, default=rp.RMIN_DEFAULT)
    p.add_argument("--probes", type=int, default=rp.PROBES_DEFAULT)
    p.add_argument("--samples", type=int, default=rp.SAMPLES_DEFAULT)
    p.add_argument("--report", help="JSON report path")
    p.add_argument("--csv", help="counting CSV path")

    p = sub.add_parser("branches", help="branch samples, zero crossings and monotonicity audit")
    _problem_args(p, rmax=False)
    p.add_argument("--l", dest="degrees", type=_degree_range, default=range(0, 11))
    p.add_argument("--hmax", type=float, default=2.0)
    p.add_argument("--points", type=int, default=64)
    p.add_argument("--audit", action="store_true")
    p.add_argument("--h0", type=float, default=H0_DEFAULT)
    p.add_argument("--out", help="CSV path for branch samples")

    p = sub.add_parser("wkb", help="boundary symbol error scaling")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--hmin", type=float, default=1e-3)
    p.add_argument("--hmax", type=float, default=1e-1)
    p.add_argument("--points", type=int, default=16)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--out", help="CSV path")

    p = sub.add_parser("coeff", help="leading Weyl coefficient")
    p.add_argument("--surface", choices=("sphere", "ellipsoid"), default="sphere")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--axes", type=_floats)
    p.add_argument("--gamma", default="2.0", help="constant or expression in x, y, z")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--rtol", type=float, default=1e-8)
    p.add_argument("--quadrature", action="store_true", help="skip closed forms")

    p = sub.add_parser("jets", help="general-chart phase and amplitude coefficients")
    p.add_argument("--chart", choices=sorted(CHARTS), default="sphere")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--point", type=_floats, default=(1.1, 0.3))
    p.add_argument("--covector", type=_floats, default=(0.0, 0.8))
    p.add_argument("--residuals", action="store_true")
    p.add_argument("--out", help="CSV path (default: stdout)")
    return parser


def _config(args):
    return ProblemConfig(dim=args.dim, radius=args.radius, gamma=args.gamma,
                         l_max=args.lmax, r_max=getattr(args, "rmax", 50.0))


def _rows_out(path, header, rows, out):
    if path:
        rp.write_csv(path, header, rows)
    else:
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(row) + "\n")


def cmd_spectrum(args, out):
    records = spectrum_up_to(_config(args))
    _rows_out(args.out, rp.EIGENVALUE_HEADER, rp.eigenvalue_rows(records), out)
    if args.out:
        out.write(f"{len(records)} degrees, N(rmax) = {sum(r.multiplicity for r in records)}\n")


def cmd_count(args, out):
    report = rp.build_report(_config(args), args.rmin, args.probes, args.samples)
    if args.report:
        rp.emit(report, args.report)
    if args.csv:
        rp.emit(report.remainder_samples, args.csv)
    out.write(f"C_W = {report.C_W!r}\n")
    out.write(f"gap = {report.gap!r}\n")
    out.write(f"fitted_exponent = {report.fitted_exponent!r}\n")
    out.write(f"sup_ratio = {report.sup_ratio!r}\n")
    out.write(f"probe_matches = {report.probe_matches}\n")


def cmd_branches(args, out):
    cfg = ProblemConfig(dim=args.dim, radius=args.radius, gamma=args.gamma, l_max=args.lmax)
    samples = []
    for l in args.degrees:
        zero = zero_crossing(l, cfg, args.hmax)
        out.write(f"l={l} h_k={zero.h_k!r} lambda={zero.lambda_mapped!r}\n")
        samples.extend(branch_samples(l, cfg, args.hmax / args.points, args.hmax, args.points))
    if args.out:
        rp.emit(samples, args.out)
    if args.audit:
        constants = MonotonicityConstants.from_bounds(cfg.gamma)
        worst = math.inf
        for l in args.degrees:
            try:
                res = monotonicity_audit(l, cfg, h0=args.h0, constants=constants)
            except EmptyWindow:
                out.write(f"audit l={l}: empty window\n")
                continue
            worst = min(worst, res.window_min)
            out.write(f"audit l={l}: min h*dmu/dh = {res.window_min!r} "
                      f"({'pass' if res.passed else 'FAIL'})\n")
        verdict = "pass" if worst >= constants.lower_bound else "FAIL"
        out.write(f"audit bound {constants.lower_bound!r}: {verdict}\n")


def cmd_wkb(args, out):
    grid = np.geomspace(args.hmin, args.hmax, args.points)
    fit = error_scaling_test(args.sigma, args.order, grid, args.radius, args.dim)
    if args.out:
        rp.emit(fit.samples, args.out)
    out.write(f"slope = {fit.slope!r}\n")


def cmd_coeff(args, out):
    damping = parse_damping(args.gamma)
    if args.surface == "sphere":
        geometry = Sphere(args.radius)
    else:
        if args.axes is None:
            raise ValidationError("--surface ellipsoid needs --axes")
        geometry = Ellipsoid(args.axes)
    method = "quadrature" if args.quadrature else "auto"
    res = weyl_coefficient(geometry, damping, args.dim, rtol=args.rtol, method=method)
    out.write(f"C_W = {res.C_W!r}\n")


JETS_HEADER = ("quantity", "k", "j", "real", "imag")


def cmd_jets(args, out):
    cls = CHARTS[args.chart]
    chart = cls(args.radius) if args.chart == "sphere" else cls()
    if args.chart == "ballcollar":
        chart = cls(args.radius, 3)
    sym = general_symbol(chart, args.point, args.covector, -1.0, args.order)
    rows = []
    for k, p in enumerate(sym.phi):
        rows.append(("phi", str(k), "", rp.format_float(p.value.real), rp.format_float(p.value.imag)))
    for (k, j), a in sorted(sym.amp.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        rows.append(("amp", str(k), str(j), rp.format_float(a.value.real), rp.format_float(a.value.imag)))
    if args.residuals:
        eik, tr = pde_residual_order(chart, args.point, args.covector, -1.0, args.order)
        rows.append(("eikonal_slope", "", "", rp.format_float(eik), "0.0"))
        rows.append(("transport_slope", "", "", rp.format_float(tr), "0.0"))
    _rows_out(args.out, JETS_HEADER, rows, out)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "count": cmd_count,
    "branches": cmd_branches,
    "wkb": cmd_wkb,
    "coeff": cmd_coeff,
    "jets": cmd_jets,
}


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: expected a JSON object")
    return data


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    data = _load_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest == "l":
            dest = "degrees"
        if dest not in known or dest == "help":
            raise ValidationError(f"unknown config key {key!r} for {args.command}")
        action = known[dest]
        if action.type is not None and isinstance(value, str):
            value = action.type(value)
        elif action.type is not None and action.type in (int, float):
            value = action.type(value)
        sub.set_defaults(**{dest: value})
    return parser.parse_args(argv)


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    try:
        args = parse_args(argv)
        COMMANDS[args.command](args, out)
    except DissipWeylError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entry():
    sys.exit(main())
