"""Guessing linear recurrences with polynomial coefficients.

An ansatz of order d and degree e looks for integers c[i][j] with

    sum_{i=0..d} sum_{j=0..e} c[i][j] * T**j * A(T - i) == 0

for every T in a window of known terms.  The unknowns form the nullspace of
an exact linear system; the guess is then checked on terms that were held
out of the system.  A recurrence that survives is reported together with the
search trace that led to it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import InsufficientTermsError

DEFAULT_HOLDOUT = 10
DEFAULT_MARGIN = 5
DEFAULT_MIN_VERIFIED = 10


def poly_eval(coeffs, t):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def poly_trim(coeffs):
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return out


def _positive_integer_roots(coeffs):
    """Positive integer roots of an integer polynomial, by divisor-bounded scan."""
    coeffs = poly_trim(coeffs)
    if not coeffs:
        raise ValueError("zero polynomial has every root")
    low = next(c for c in coeffs if c)
    lead = coeffs[-1]
    # Cauchy bound, further capped by |trailing nonzero coefficient|: an
    # integer root divides it
    cauchy = 1 + max(abs(c) for c in coeffs[:-1]) // abs(lead) if len(coeffs) > 1 else 0
    bound = min(cauchy + 1, abs(low))
    if bound > 10**6:
        cands = set()
        for z in np.roots([float(c) for c in reversed(coeffs)]):
            if abs(z.imag) < 1e-6 * max(1.0, abs(z)) and z.real > 0.5:
                k = round(z.real)
                cands.update({k - 1, k, k + 1})
        return sorted(k for k in cands if k > 0 and poly_eval(coeffs, k) == 0)
    return [k for k in range(1, bound + 1) if poly_eval(coeffs, k) == 0]


@dataclass
class RecurrenceOperator:
    """sum_i polys[i](T) * A(T - i) == 0 for every T > valid_from."""

    polys: list
    valid_from: int = 0
    initial: list = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.polys) - 1

    @property
    def degree(self) -> int:
        return max((len(poly_trim(p)) - 1 for p in self.polys), default=-1)

    def coefficients_at(self, t):
        return [poly_eval(p, t) for p in self.polys]

    def residual(self, values, t) -> Fraction:
        """sum_i p_i(t) * A(t - i) for a 1-based value list."""
        return sum(
            (poly_eval(p, t) * values[t - i - 1] for i, p in enumerate(self.polys)),
            Fraction(0),
        )

    def normalized(self) -> "RecurrenceOperator":
        polys = normalize_polys(self.polys)
        return RecurrenceOperator(polys, self.valid_from, list(self.initial))

    def with_initial(self, values) -> "RecurrenceOperator":
        """Attach A(1..valid_from) taken from ``values`` (1-based list)."""
        need = max(self.valid_from, self.order)
        if len(values) < need:
            raise ValueError(f"need {need} initial values, got {len(values)}")
        return RecurrenceOperator(self.polys, self.valid_from, [Fraction(v) for v in values[:need]])


def normalize_polys(polys):
    """Integer polynomials with unit content, trailing zero shifts dropped, p0 leading > 0."""
    polys = [poly_trim(p) for p in polys]
    while len(polys) > 1 and not polys[-1]:
        polys.pop()
    content = 0
    for p in polys:
        for c in p:
            content = math.gcd(content, c)
    if content == 0:
        raise ValueError("zero operator")
    polys = [[c // content for c in p] for p in polys]
    if not polys[0]:
        raise ValueError("leading polynomial p0 is identically zero")
    if polys[0][-1] < 0:
        polys = [[-c for c in p] for p in polys]
    return [p if p else [0] for p in polys]


def leading_valid_from(polys) -> int:
    """max(order, largest positive integer root of p0)."""
    roots = _positive_integer_roots(polys[0])
    return max([len(polys) - 1] + roots)


def from_vector(vector, order, degree):
    """Clear denominators of a nullspace vector laid out as c[i][j] at i*(degree+1)+j."""
    den = 1
    for x in vector:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in vector]
    polys = [ints[i * (degree + 1):(i + 1) * (degree + 1)] for i in range(order + 1)]
    return normalize_polys(polys)


@dataclass
class GuessReport:
    operator: RecurrenceOperator | None
    terms_used: int = 0
    terms_verified: int = 0
    search_trace: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.operator is not None


def _values(seq):
    return list(getattr(seq, "values", seq))


def required_terms(order, degree, holdout=DEFAULT_HOLDOUT, margin=DEFAULT_MARGIN):
    # a projective solution needs unknowns - 1 equations; margin adds surplus rows
    return (order + 1) * (degree + 1) - 1 + order + holdout + margin


def _rows(values, order, degree, t_lo, t_hi, columns):
    rows = []
    for t in range(t_lo, t_hi + 1):
        powers = [t**j for j in range(degree + 1)]
        rows.append([powers[j] * values[t - i - 1] for i, j in columns])
    return rows


def _nullity_mod(values_mod, order, degree, t_lo, t_hi, columns, p):
    mat = np.empty((t_hi - t_lo + 1, len(columns)), dtype=np.int64)
    for r, t in enumerate(range(t_lo, t_hi + 1)):
        powers = [pow(t, j, p) for j in range(degree + 1)]
        for c, (i, j) in enumerate(columns):
            mat[r, c] = powers[j] * values_mod[t - i - 1] % p
    _, pivots = linalg.rref_mod(mat, p)
    return len(columns) - len(pivots)


def annihilates(op: RecurrenceOperator, seq, t_from: int, t_to: int) -> bool:
    """True iff the operator kills A(t) exactly for every t in [t_from, t_to]."""
    values = _values(seq)
    if t_from - op.order < 1 or t_to > len(values) or t_from > t_to:
        raise ValueError(
            f"range [{t_from}, {t_to}] needs terms {t_from - op.order}..{t_to}, "
            f"sequence has 1..{len(values)}"
        )
    return all(op.residual(values, t) == 0 for t in range(t_from, t_to + 1))


def fit(
    seq,
    order: int,
    degree: int,
    holdout: int = DEFAULT_HOLDOUT,
    margin: int = DEFAULT_MARGIN,
    method: str = "modular",
    min_verified: int = DEFAULT_MIN_VERIFIED,
) -> GuessReport:
    """Fit one (order, degree) ansatz and check it on held-out terms.

    When the nullspace has several dimensions the representative with the
    smallest order is taken, then the smallest degree among those; inside
    that the echelon basis vector is unique.  ``terms_verified`` counts the
    held-out equations plus the equations of the system beyond its rank.
    """
    if order < 1 or degree < 0:
        raise ValueError("need order >= 1 and degree >= 0")
    values = [Fraction(v) for v in _values(seq)]
    need = required_terms(order, degree, holdout, margin)
    if len(values) < need:
        raise InsufficientTermsError(
            f"ansatz (order={order}, degree={degree}) needs {need} terms, got {len(values)}", need
        )
    report = GuessReport(None)
    n_fit = len(values) - holdout
    t_lo = order + 1
    report.terms_used = n_fit

    p = linalg.primes(1)[0]
    try:
        values_mod = [linalg.reduce_mod(v, p) for v in values]
    except ZeroDivisionError:
        p = linalg.primes(2)[1]
        values_mod = [linalg.reduce_mod(v, p) for v in values]

    full = [(i, j) for i in range(order + 1) for j in range(degree + 1)]
    nullity = _nullity_mod(values_mod, order, degree, t_lo, n_fit, full, p)
    if nullity == 0:
        report.search_trace.append((order, degree, "empty nullspace"))
        return report

    # smallest order carrying a solution on the same window
    best_order = order
    for d in range(1, order):
        cols = [(i, j) for i in range(d + 1) for j in range(degree + 1)]
        if _nullity_mod(values_mod, order, degree, t_lo, n_fit, cols, p):
            best_order = d
            break
    # degree-major column order: the first echelon vector has the lowest degree
    cols = sorted(((i, j) for i in range(best_order + 1) for j in range(degree + 1)), key=lambda c: (c[1], c[0]))
    rows = _rows(values, order, degree, t_lo, n_fit, cols)
    if method == "exact":
        basis = linalg.nullspace_exact(rows, len(cols))
    elif method == "modular":
        basis = linalg.nullspace_modular(rows, len(cols))
    else:
        raise ValueError(f"unknown method {method!r}")
    if not basis:
        report.search_trace.append((order, degree, "empty nullspace"))
        return report
    vec = [Fraction(0)] * ((best_order + 1) * (degree + 1))
    for (i, j), x in zip(cols, basis[0]):
        vec[i * (degree + 1) + j] = x
    try:
        polys = from_vector(vec, best_order, degree)
    except ValueError as exc:
        report.search_trace.append((order, degree, f"degenerate solution: {exc}"))
        return report
    op = RecurrenceOperator(polys, leading_valid_from(polys))

    rank = len(cols) - len(basis)
    verified = holdout + max(0, (n_fit - t_lo + 1) - rank)
    for t in range(n_fit + 1, len(values) + 1):
        if op.residual(values, t) != 0:
            report.search_trace.append((order, degree, f"holdout violated at T={t}"))
            return report
    # the window started at order+1; a lower-order operator must also hold below it
    for t in range(t_lo - 1, op.order, -1):
        if op.residual(values, t) != 0:
            op.valid_from = max(op.valid_from, t)
            break
    if verified < min_verified:
        report.search_trace.append((order, degree, f"only {verified} verified terms"))
        return report
    report.operator = op.with_initial(values)
    report.terms_verified = verified
    outcome = f"found order {op.order} degree {op.degree}"
    if len(basis) > 1 or nullity > 1:
        outcome += f" (nullspace dimension {nullity})"
    report.search_trace.append((order, degree, outcome))
    return report


def search(
    seq,
    max_order: int,
    max_degree: int,
    holdout: int = DEFAULT_HOLDOUT,
    margin: int = DEFAULT_MARGIN,
    method: str = "modular",
    min_verified: int = DEFAULT_MIN_VERIFIED,
    min_order: int = 1,
) -> GuessReport:
    """Try ansatzes by increasing order + degree, then increasing order."""
    if max_order < 1 or max_degree < 0:
        raise ValueError("need max_order >= 1 and max_degree >= 0")
    values = _values(seq)
    trace = []
    for total in range(min_order, max_order + max_degree + 1):
        for d in range(min_order, max_order + 1):
            e = total - d
            if not 0 <= e <= max_degree:
                continue
            if len(values) < required_terms(d, e, holdout, margin):
                trace.append((d, e, "insufficient terms"))
                continue
            rep = fit(values, d, e, holdout, margin, method, min_verified)
            trace.extend(rep.search_trace)
            if rep.found:
                rep.search_trace = trace
                return rep
    return GuessReport(None, len(values), 0, trace)


def characteristic_roots(op: RecurrenceOperator):
    """Roots of sum_i lc_i x**(d-i), lc_i the coefficient of T**degree in p_i.

    Solutions of the recurrence grow roughly like |root|**T, so a root
    outside the unit circle makes forward evaluation in floating point
    unstable even when the target sequence itself grows slowly.
    """
    e = op.degree
    lead = [float(p[e]) if len(p) > e else 0.0 for p in op.polys]
    while lead and lead[-1] == 0.0:
        lead.pop()
    if len(lead) < 2:
        return np.array([])
    return np.roots(lead)


def is_forward_stable(op: RecurrenceOperator, tol: float = 1e-3) -> bool:
    roots = characteristic_roots(op)
    return bool(roots.size == 0 or np.max(np.abs(roots)) <= 1 + tol)


def search_stable(seq, max_order, max_degree, holdout=DEFAULT_HOLDOUT, margin=DEFAULT_MARGIN, method="modular"):
    """Like :func:`search`, but reject operators with characteristic roots outside the unit circle.

    A rejected operator of order d is usually a left multiple of a smaller
    operator, so the search is repeated with order capped at d - 1.  The
    trace of every pass is kept.
    """
    trace = []
    cap = max_order
    while cap >= 1:
        rep = search(seq, cap, max_degree, holdout, margin, method)
        trace.extend(rep.search_trace)
        if not rep.found:
            break
        if is_forward_stable(rep.operator):
            rep.search_trace = trace
            return rep
        op = rep.operator
        trace.append((op.order, op.degree, "rejected: characteristic root outside the unit circle"))
        cap = op.order - 1
    return GuessReport(None, len(_values(seq)), 0, trace)
