"""Unrolling a recurrence far past the reach of the exact engine.

Forward solving uses

    A(T) = -(p_1(T) A(T-1) + ... + p_d(T) A(T-d)) / p_0(T)

either in exact rationals or in binary floating point of a chosen precision
(gmpy2 / MPFR).  The polynomial values p_i(T) are always exact integers; in
the floating path they are advanced by forward differences so each step
costs only integer additions.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from .errors import PrecisionLossError, ResourceCeilingError, SingularLeadingCoefficientError
from .guess import RecurrenceOperator, poly_eval

EXACT_CEILING = 10_000
DEFAULT_BITS = 256
MIN_AGREED_DIGITS = 6


@dataclass(frozen=True)
class PrecisionPolicy:
    bits: int = DEFAULT_BITS
    double_check: bool = True

    def __post_init__(self):
        if self.bits < 64:
            raise ValueError("precision must be at least 64 bits")


@dataclass
class EvaluationResult:
    values: dict  # T -> Fraction or gmpy2.mpfr
    kind: str  # "exact" or "float"
    bits: int | None = None
    agreed_digits: dict = field(default_factory=dict)

    @property
    def min_agreed(self):
        return min(self.agreed_digits.values()) if self.agreed_digits else None

    @property
    def precision_lost(self) -> list:
        return sorted(t for t, d in self.agreed_digits.items() if d < MIN_AGREED_DIGITS)


def _check_operator(op: RecurrenceOperator, t_max: int):
    need = max(op.order, op.valid_from)
    if len(op.initial) < need:
        raise ValueError(f"operator needs initial values A(1..{need}), has {len(op.initial)}")
    start = len(op.initial) + 1
    for t in range(start, t_max + 1):
        if poly_eval(op.polys[0], t) == 0:
            raise SingularLeadingCoefficientError(f"leading coefficient vanishes at T={t}", t)
    return start


def _check_roots_fast(op: RecurrenceOperator, start: int, t_max: int):
    # integer roots of p0 above start are bounded by the root scan behind valid_from
    from .guess import _positive_integer_roots

    for t in _positive_integer_roots(op.polys[0]):
        if start <= t <= t_max:
            raise SingularLeadingCoefficientError(f"leading coefficient vanishes at T={t}", t)


def extend_exact(op: RecurrenceOperator, t_max: int, ceiling: int = EXACT_CEILING) -> EvaluationResult:
    """All of A(1..t_max) as fully reduced fractions."""
    if t_max > ceiling:
        raise ResourceCeilingError(
            f"exact evaluation to T={t_max} is above the ceiling {ceiling}", estimate=t_max, ceiling=ceiling
        )
    start = _check_operator(op, t_max)
    values = [Fraction(v) for v in op.initial[:t_max]]
    d = op.order
    for t in range(start, t_max + 1):
        c = op.coefficients_at(t)
        acc = sum((c[i] * values[t - i - 1] for i in range(1, d + 1)), Fraction(0))
        values.append(-acc / c[0])
    return EvaluationResult({t: v for t, v in enumerate(values, 1)}, "exact")


class _Differences:
    """Exact values of an integer polynomial at consecutive integers."""

    def __init__(self, coeffs, t0):
        k = max(len(coeffs) - 1, 0)
        table = [poly_eval(coeffs, t0 + j) for j in range(k + 1)]
        diffs = []
        while table:
            diffs.append(table[0])
            table = [b - a for a, b in zip(table, table[1:])]
        self.d = diffs

    def value(self):
        return self.d[0]

    def advance(self):
        d = self.d
        for k in range(len(d) - 1):
            d[k] += d[k + 1]


def _run_float(op, t_max, bits, samples, on_step=None):
    ctx = gmpy2.context(precision=bits)
    out = {}
    with ctx:
        start = len(op.initial) + 1
        window = deque((gmpy2.mpfr(v.numerator) / v.denominator for v in op.initial[-op.order:]), maxlen=op.order)
        for t, v in enumerate(op.initial, 1):
            if t in samples:
                out[t] = gmpy2.mpfr(v.numerator) / v.denominator
        polys = [_Differences(p, start) for p in op.polys]
        d = op.order
        for t in range(start, t_max + 1):
            acc = gmpy2.mpfr(0)
            # window[-1] is A(t-1)
            for i in range(1, d + 1):
                c = polys[i].d[0]
                if c:
                    acc += window[-i] * c
            x = -acc / polys[0].d[0]
            window.append(x)
            if t in samples:
                out[t] = x
            for p in polys:
                p.advance()
            if on_step is not None:
                on_step(len(window) + len(out))
    return out


def agreed_digits(x, y, bits: int) -> int:
    """Leading decimal digits on which x agrees with the more precise y."""
    cap = int(bits * math.log10(2))
    if x == y:
        return cap
    if y == 0:
        return 0
    with gmpy2.context(gmpy2.get_context(), precision=2 * bits):
        rel = abs(gmpy2.mpfr(x) - y) / abs(y)
        if rel >= 1:
            return 0
        return min(cap, int(-gmpy2.log10(rel)))


def extend_float(
    op: RecurrenceOperator,
    t_max: int,
    policy: PrecisionPolicy = PrecisionPolicy(),
    sample_at=None,
    on_step=None,
    strict: bool = False,
) -> EvaluationResult:
    """Values of A at the sampled indices, keeping only ``order`` values live.

    With ``policy.double_check`` the run is repeated at twice the precision
    and the number of agreeing leading digits is recorded per sample.  With
    ``strict`` an agreement below six digits raises :class:`PrecisionLossError`.
    """
    samples = set(sample_at) if sample_at is not None else {t_max}
    if any(t < 1 or t > t_max for t in samples):
        raise ValueError(f"samples must lie in [1, {t_max}]")
    start = len(op.initial) + 1
    if len(op.initial) < max(op.order, op.valid_from):
        raise ValueError(f"operator needs initial values A(1..{max(op.order, op.valid_from)})")
    _check_roots_fast(op, start, t_max)
    values = _run_float(op, t_max, policy.bits, samples, on_step)
    result = EvaluationResult(values, "float", policy.bits)
    if policy.double_check:
        fine = _run_float(op, t_max, 2 * policy.bits, samples)
        result.agreed_digits = {t: agreed_digits(values[t], fine[t], policy.bits) for t in sorted(values)}
        if strict and result.precision_lost:
            raise PrecisionLossError(
                f"precisions {policy.bits} and {2 * policy.bits} agree on fewer than "
                f"{MIN_AGREED_DIGITS} digits at T={result.precision_lost[0]}"
            )
    return result


def format_float(x, digits: int) -> str:
    """Scientific notation with ``digits`` significant digits, e.g. ``3.9894e-1``."""
    x = gmpy2.mpfr(x)
    digits = max(digits, 2)
    if x == 0:
        return "0"
    mant, exp, _ = x.digits(10, digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    body = mant[0] + ("." + mant[1:] if len(mant) > 1 else "")
    return f"{sign}{body}e{exp - 1}"
