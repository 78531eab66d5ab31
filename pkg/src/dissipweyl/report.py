"""Counting-function report for the ball and deterministic file output."""

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .ball import CountingCurve, EigenvalueRecord, counting_function, spectrum_up_to
from .branches import BranchSample, negative_count
from .errors import DegenerateGrid, IoError
from .expr import Constant
from .weyl import Sphere, weyl_coefficient
from .wkb import ScalingSample

RMIN_DEFAULT = 20.0
PROBES_DEFAULT = 20
SAMPLES_DEFAULT = 400


@dataclass(frozen=True)
class RemainderSample:
    r: float
    count: int
    weyl: float
    remainder: float


@dataclass(frozen=True)
class Probe:
    r: float
    count: int
    negative: int

    @property
    def matches(self):
        return self.count == self.negative


@dataclass(frozen=True)
class WeylReport:
    config: dict
    records: tuple
    curve: CountingCurve
    C_W: float
    gap: float
    remainder_samples: tuple
    fitted_exponent: float
    sup_ratio: float
    probes: tuple

    @property
    def probe_matches(self):
        return all(p.matches for p in self.probes)


def probe_radii(curve, rmin, rmax, n=PROBES_DEFAULT):
    """``n`` radii spread over ``[rmin, rmax]``, each midway between jumps.

    Targets are log-spaced; each is moved to the midpoint of the gap between
    consecutive eigenvalue moduli containing it, so no probe sits on a jump.
    """
    jumps = np.array([0.0] + [b[0] for b in curve.breakpoints] + [math.inf])
    out = []
    for t in np.geomspace(rmin, rmax, n):
        i = int(np.searchsorted(jumps, t, side="right"))
        lo, hi = max(jumps[i - 1], rmin), min(jumps[i], rmax)
        out.append(float(0.5 * (lo + hi)))
    return out


def remainder_samples(curve, c_w, d, rmin, rmax, n=SAMPLES_DEFAULT):
    out = []
    for r in np.linspace(rmin, rmax, n):
        r = float(r)
        count = curve(r)
        weyl = c_w * r ** (d - 1)
        out.append(RemainderSample(r, count, weyl, count - weyl))
    return out


def fitted_exponent(samples):
    """Least-squares slope of ``log|remainder|`` on ``log r`` over the upper half of the range."""
    r = np.array([s.r for s in samples])
    rem = np.abs([s.remainder for s in samples])
    mid = 0.5 * (r.min() + r.max())
    keep = (r >= mid) & (rem > 0)
    if keep.sum() < 2:
        raise DegenerateGrid("fewer than two nonzero remainders in the upper half of the range")
    return float(np.polyfit(np.log(r[keep]), np.log(rem[keep]), 1)[0])


def sup_ratio(curve, c_w, d, samples, rmin, rmax):
    """Largest ``|N(r) - C_W r^(d-1)| / r^(d-2)`` over the samples and both sides of every jump."""
    ratios = [abs(s.remainder) / s.r ** (d - 2) for s in samples]
    for r, count in curve.breakpoints:
        if rmin <= r <= rmax:
            weyl = c_w * r ** (d - 1)
            for n in (count, curve.left_limit(r)):
                ratios.append(abs(n - weyl) / r ** (d - 2))
    return max(ratios)


def build_report(cfg, rmin=RMIN_DEFAULT, probes=PROBES_DEFAULT, samples=SAMPLES_DEFAULT):
    """Spectrum, counting curve and remainder statistics for the ball ``cfg``."""
    if not 0 < rmin < cfg.r_max:
        raise DegenerateGrid(f"need 0 < rmin < r_max, got rmin={rmin}, r_max={cfg.r_max}")
    records = spectrum_up_to(cfg)
    curve = counting_function(records)
    c_w = weyl_coefficient(Sphere(cfg.radius), Constant(cfg.gamma), cfg.dim).C_W
    rem = remainder_samples(curve, c_w, cfg.dim, rmin, cfg.r_max, samples)
    probe_list = []
    for r in probe_radii(curve, rmin, cfg.r_max, probes):
        probe_list.append(Probe(r, curve(r), negative_count(cfg, 1.0 / r).count))
    config = cfg.to_dict()
    config.update(rmin=rmin, probes=probes, samples=samples)
    return WeylReport(
        config=config,
        records=tuple(records),
        curve=curve,
        C_W=c_w,
        gap=max(rec.lam for rec in records) if records else math.nan,
        remainder_samples=tuple(rem),
        fitted_exponent=fitted_exponent(rem),
        sup_ratio=sup_ratio(curve, c_w, cfg.dim, rem, rmin, cfg.r_max),
        probes=tuple(probe_list),
    )


# formatting -----------------------------------------------------------------


def _compact_exponent(text):
    mant, exp = text.split("e")
    return f"{mant}e{int(exp)}"


def format_lambda(x):
    """Fixed scientific notation with 17 digits after the point, e.g. ``-1.00000000000000000e0``."""
    return _compact_exponent(f"{x:.17e}")


def format_residual(x):
    return _compact_exponent(f"{x:.1e}")


def format_float(x):
    """Shortest round-trip decimal form, with ``-0.0`` written as ``0.0``."""
    return repr(float(x) + 0.0)


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format_float(x)


def _open(path):
    return open(path, "w", newline="", encoding="utf-8")


def write_csv(path, header, rows):
    try:
        with _open(path) as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


EIGENVALUE_HEADER = ("l", "lambda", "multiplicity", "residual")
COUNTING_HEADER = ("r", "count", "weyl", "remainder")
BRANCH_HEADER = ("l", "h", "mu", "h_dmu_dh")
WKB_HEADER = ("h", "l", "sigma", "order", "symbol", "exact", "abs_error")


def eigenvalue_rows(records):
    return [(str(r.degree), format_lambda(r.lam), str(r.multiplicity), format_residual(r.residual))
            for r in records]


def counting_rows(samples):
    return [(_fmt(s.r), _fmt(s.count), _fmt(s.weyl), _fmt(s.remainder)) for s in samples]


def branch_rows(samples):
    return [(_fmt(s.l), _fmt(s.h), _fmt(s.mu), _fmt(s.h_dmu_dh)) for s in samples]


def wkb_rows(samples):
    return [tuple(_fmt(getattr(s, f)) for f in WKB_HEADER) for s in samples]


def report_dict(report):
    return {
        "config": report.config,
        "C_W": report.C_W,
        "gap": report.gap,
        "curve": [[r, n] for r, n in report.curve.breakpoints],
        "fitted_exponent": report.fitted_exponent,
        "sup_ratio": report.sup_ratio,
        "probe_matches": report.probe_matches,
    }


def report_json(report):
    return json.dumps(report_dict(report), separators=(", ", ": ")) + "\n"


def write_text(path, text):
    try:
        with _open(path) as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def emit(obj, path):
    """Write a report (JSON) or a sequence of records, samples or branch samples (CSV)."""
    if isinstance(obj, WeylReport):
        write_text(path, report_json(obj))
        return
    items = list(obj)
    first = items[0] if items else None
    if isinstance(first, EigenvalueRecord):
        write_csv(path, EIGENVALUE_HEADER, eigenvalue_rows(items))
    elif isinstance(first, RemainderSample):
        write_csv(path, COUNTING_HEADER, counting_rows(items))
    elif isinstance(first, BranchSample):
        write_csv(path, BRANCH_HEADER, branch_rows(items))
    elif isinstance(first, ScalingSample):
        write_csv(path, WKB_HEADER, wkb_rows(items))
    else:
        raise TypeError(f"cannot emit {type(first).__name__}")
