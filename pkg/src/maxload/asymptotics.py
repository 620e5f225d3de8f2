"""Extracting the constant C in A(T) ~ C * sqrt(T).

The normalized values s(T) = A(T)/sqrt(T) tend to C.  Richardson
extrapolation on a doubling ladder T0, 2 T0, 4 T0, ... removes correction
terms in powers of the step 1/T.  For (2,1) and (4,2) the corrections run in
integer powers of 1/T, but for (3,1) and (4,1) A(T) carries a constant term,
so s(T) has a 1/sqrt(T) correction as well.  The default therefore removes
half-integer powers 1/T**0.5, 1/T, 1/T**1.5, ... one at a time;
``power_step=1`` restricts elimination to integer powers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from .evaluate import format_float
from .exact import ProblemSpec, heuristic_constant

WORKING_BITS = 256
DEFAULT_DEPTH = 3
DEFAULT_POWER_STEP = Fraction(1, 2)


def _ctx():
    return gmpy2.context(gmpy2.get_context(), precision=WORKING_BITS)


def _mpfr(x):
    if isinstance(x, Fraction):
        return gmpy2.mpfr(gmpy2.mpq(x.numerator, x.denominator))
    if isinstance(x, (int, float, str)):
        return gmpy2.mpfr(x)
    return gmpy2.mpfr(x)


@dataclass
class AsymptoticFit:
    c_estimate: object
    error_bar: object
    samples: list  # (T, A(T)/sqrt(T))
    depth: int
    power_step: object = DEFAULT_POWER_STEP
    table: list = field(default_factory=list)

    @property
    def raw_last(self):
        return self.samples[-1][1]


def richardson_table(values, ratio: int = 2, depth: int | None = None, power_step=DEFAULT_POWER_STEP):
    """Rows R[k][0..min(k, depth)]; column j has removed (1/T)**(i*power_step) for i <= j."""
    if depth is None:
        depth = len(values) - 1
    table = []
    with _ctx():
        for k, v in enumerate(values):
            row = [v]
            for j in range(1, min(k, depth) + 1):
                f = gmpy2.mpfr(ratio) ** (gmpy2.mpfr(power_step) * j) - 1
                row.append(row[j - 1] + (row[j - 1] - table[k - 1][j - 1]) / f)
            table.append(row)
    return table


def estimate_constant(samples, depth: int = DEFAULT_DEPTH, power_step=DEFAULT_POWER_STEP) -> AsymptoticFit:
    """Richardson estimate of lim A(T)/sqrt(T) from (T, A(T)) on a doubling ladder.

    ``error_bar`` is the distance between the final entry and its
    predecessor on the same diagonal of the extrapolation table.
    """
    samples = sorted(samples)
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if len(samples) < depth + 1 or len(samples) < 2:
        raise ValueError(f"depth {depth} needs at least {max(depth + 1, 2)} samples, got {len(samples)}")
    ts = [t for t, _ in samples]
    for a, b in zip(ts, ts[1:]):
        if b != 2 * a:
            raise ValueError(f"samples must form a doubling ladder, found {a} then {b}")
    with _ctx():
        normalized = [(t, _mpfr(v) / gmpy2.sqrt(gmpy2.mpfr(t))) for t, v in samples]
    table = richardson_table([s for _, s in normalized], 2, depth, power_step)
    last = table[-1]
    k = len(table) - 1
    d = len(last) - 1
    est = last[d]
    with _ctx():
        if d == 0:
            err = abs(est - table[k - 1][0])
        else:
            err = abs(est - table[k - 1][d - 1])
    return AsymptoticFit(est, err, normalized, d, power_step, table)


def ladder(t0: int, t_top: int) -> list:
    """t0, 2 t0, 4 t0, ... up to t_top."""
    if t0 < 1:
        raise ValueError("ladder must start at T >= 1")
    out = []
    t = t0
    while t <= t_top:
        out.append(t)
        t *= 2
    return out


def exact_reference(spec: ProblemSpec):
    """Known closed-form value of the constant, where one exists here."""
    if (spec.n, spec.r) == (2, 1):
        with _ctx():
            return 1 / gmpy2.sqrt(2 * gmpy2.const_pi())
    if spec.degenerate or spec.n == 1:
        return gmpy2.mpfr(0)
    return None


def compare_report(spec: ProblemSpec, fit: AsymptoticFit) -> dict:
    heuristic = heuristic_constant(spec) if spec.n >= 2 else None
    with _ctx():
        h = gmpy2.mpfr(str(heuristic)) if heuristic is not None else None
        gap = abs(fit.c_estimate - h) if h is not None else None
        rel = gap / abs(fit.c_estimate) if gap is not None and fit.c_estimate != 0 else None
    return {
        "n": spec.n,
        "r": spec.r,
        "measured": fit.c_estimate,
        "error_bar": fit.error_bar,
        "heuristic": h,
        "abs_gap": gap,
        "rel_gap": rel,
        "exact": exact_reference(spec),
    }


def _fmt(x, digits):
    if x is None:
        return "-"
    return format(gmpy2.mpfr(x), f".{digits}f")


def _fmt_err(x):
    return "-" if x is None else format_float(x, 3)


def comparison_json(records, digits: int = 12) -> list:
    keys = ("measured", "heuristic", "abs_gap", "rel_gap", "exact")
    out = []
    for rec in records:
        row = {"n": rec["n"], "r": rec["r"], "digits": digits, "error_bar": _fmt_err(rec["error_bar"])}
        for k in keys:
            row[k] = None if rec[k] is None else _fmt(rec[k], digits)
        out.append(row)
    return out


def comparison_table(records, digits: int = 10) -> str:
    header = ("n", "r", "C_measured", "errorBar", "C_heuristic", "C_exact")
    rows = [header]
    for rec in records:
        rows.append(
            (
                str(rec["n"]),
                str(rec["r"]),
                _fmt(rec["measured"], digits),
                _fmt_err(rec["error_bar"]),
                _fmt(rec["heuristic"], digits),
                _fmt(rec["exact"], digits),
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows]
    return "\n".join(lines) + "\n"
