"""Exact distribution of the maximal bin occupancy.

Each round a uniformly random r-subset of the n bins receives one ball.
The number of ways to reach an occupancy vector ``a`` after T rounds is the
coefficient of ``x^a`` in ``e_r(x_1..x_n)^T``.  Because that coefficient is
symmetric in the bins and only differences between occupancies matter for
the maximum, the dynamic program below keys states by the *gap profile*:
the occupancy vector sorted non-increasingly and shifted so that its
smallest entry is 0.  The smallest occupancy itself is recovered from the
round number as ``(r*T - sum(gaps)) / n``.

Weights in a :class:`StateTable` are the coefficient of one representative
occupancy vector; the number of vectors a profile stands for is
:func:`multiplicity`.  All arithmetic is on Python integers, and
probabilities are returned as :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
import math
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import ResourceCeilingError

DEFAULT_STATE_CEILING = 5_000_000
BRUTE_FORCE_GUARD = 10_000_000

Profile = tuple  # tuple[int, ...], non-increasing, last entry 0


@dataclass(frozen=True)
class ProblemSpec:
    n: int
    r: int

    def __post_init__(self):
        if not (isinstance(self.n, int) and isinstance(self.r, int)):
            raise TypeError("n and r must be integers")
        if self.n < 1:
            raise ValueError(f"need at least one bin, got n={self.n}")
        if not 1 <= self.r <= self.n:
            raise ValueError(f"need 1 <= r <= n, got r={self.r}, n={self.n}")

    @property
    def outcomes_per_round(self) -> int:
        return math.comb(self.n, self.r)

    @property
    def degenerate(self) -> bool:
        """True when the maximum always equals the fair share (A is identically 0)."""
        return self.r == self.n


@dataclass
class StateTable:
    round: int
    weights: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.weights)


@dataclass
class MaxPmf:
    round: int
    entries: dict  # m -> Fraction

    def cdf(self, m: int) -> Fraction:
        return sum((p for k, p in self.entries.items() if k <= m), Fraction(0))

    def mean(self) -> Fraction:
        return sum((k * p for k, p in self.entries.items()), Fraction(0))


@dataclass
class RationalSequence:
    """Values A(1), A(2), ... stored 0-based in ``values``."""

    spec: ProblemSpec | None
    values: list

    def __len__(self):
        return len(self.values)

    def __getitem__(self, t: int) -> Fraction:
        # 1-based access, A(t)
        if t < 1:
            raise IndexError(f"sequence is indexed from 1, got {t}")
        return self.values[t - 1]


def multiplicity(profile: Profile) -> int:
    """Number of distinct occupancy vectors that sort to ``profile``."""
    out = math.factorial(len(profile))
    for _, run in itertools.groupby(profile):
        out //= math.factorial(sum(1 for _ in run))
    return out


def _runs(ties: tuple) -> tuple:
    """Run lengths from the pattern of equal neighbours."""
    runs = [1]
    for tie in ties:
        if tie:
            runs[-1] += 1
        else:
            runs.append(1)
    return tuple(runs)


@lru_cache(maxsize=None)
def _moves(ties: tuple, r: int) -> tuple:
    """Successor moves for a profile whose neighbour ties are ``ties``.

    Each move is ``(delta, ways)``: put ``k_j`` of the r balls into the first
    ``k_j`` bins of run ``j`` (equal bins are interchangeable, so any ``k_j``
    of them give the same sorted result and there are ``comb(len_j, k_j)``
    such choices), then subtract the increment of the last bin so the new
    minimum is 0 again.  ``delta`` is added to the profile entrywise.
    """
    runs = _runs(ties)
    moves = []

    def compose(j, left, parts):
        if j == len(runs):
            if left == 0:
                inc = []
                ways = 1
                for size, k in zip(runs, parts):
                    inc.extend([1] * k + [0] * (size - k))
                    ways *= math.comb(size, k)
                moves.append((tuple(d - inc[-1] for d in inc), ways))
            return
        for k in range(min(runs[j], left) + 1):
            compose(j + 1, left - k, parts + (k,))

    compose(0, r, ())
    return tuple(moves)


def _advance(totals: dict, spec: ProblemSpec) -> dict:
    """One round on class totals (weight times multiplicity per profile)."""
    out: dict = {}
    get = out.get
    r = spec.r
    add = operator.add
    eq = operator.eq
    for profile, w in totals.items():
        for delta, ways in _moves(tuple(map(eq, profile, profile[1:])), r):
            succ = tuple(map(add, profile, delta))
            out[succ] = get(succ, 0) + w * ways
    return out


def initial_state(spec: ProblemSpec) -> StateTable:
    return StateTable(0, {(0,) * spec.n: 1})


def step(state: StateTable, spec: ProblemSpec) -> StateTable:
    """Advance a state table by one round.

    The total ``sum(weight * multiplicity)`` grows by exactly ``C(n, r)``.
    """
    _check_consistent(state, spec)
    totals = {g: w * multiplicity(g) for g, w in state.weights.items()}
    nxt = _advance(totals, spec)
    weights = {}
    for g, total in nxt.items():
        w, rem = divmod(total, multiplicity(g))
        assert rem == 0, "class total not divisible by multiplicity"
        weights[g] = w
    return StateTable(state.round + 1, weights)


def _check_consistent(state: StateTable, spec: ProblemSpec) -> None:
    for g in state.weights:
        if len(g) != spec.n or g[-1] != 0:
            raise AssertionError(f"malformed profile {g}")
        excess = spec.r * state.round - sum(g)
        if excess < 0 or excess % spec.n:
            raise AssertionError(f"profile {g} inconsistent with round {state.round}")


def max_pmf(state: StateTable, spec: ProblemSpec) -> MaxPmf:
    """Distribution of the maximal occupancy at the table's round."""
    t = state.round
    denom = spec.outcomes_per_round**t
    acc: dict = {}
    for g, w in state.weights.items():
        m = g[0] + (spec.r * t - sum(g)) // spec.n
        acc[m] = acc.get(m, 0) + w * multiplicity(g)
    return MaxPmf(t, {m: Fraction(c, denom) for m, c in sorted(acc.items())})


def gaussian_binomial(m: int, k: int) -> list:
    """Coefficients of the q-binomial [m choose k]_q, ascending in q."""
    poly = [1]
    for i in range(1, k + 1):
        # multiply by (1 - q^(m-k+i)), then divide by (1 - q^i)
        a = m - k + i
        nxt = poly + [0] * a
        for j in range(len(poly)):
            nxt[j + a] -= poly[j]
        for j in range(i, len(nxt)):
            nxt[j] += nxt[j - i]
        poly = nxt[: len(nxt) - i]
    return poly


def projected_states(spec: ProblemSpec, t: int) -> int:
    """Upper bound on the number of live profiles at round ``t``.

    Counts non-increasing gap vectors with entries at most ``t`` whose sum is
    at most ``r*t`` and congruent to ``r*t`` mod n.
    """
    if spec.n == 1 or spec.degenerate or t == 0:
        return 1
    coeffs = gaussian_binomial(t + spec.n - 1, spec.n - 1)
    top = spec.r * t
    return sum(c for s, c in enumerate(coeffs[: top + 1]) if (top - s) % spec.n == 0)


def tables(spec: ProblemSpec, t_max: int, ceiling: int = DEFAULT_STATE_CEILING):
    """Yield class-total tables for rounds 1..t_max, with the ceiling enforced."""
    totals = {(0,) * spec.n: 1}
    for t in range(1, t_max + 1):
        totals = _advance(totals, spec)
        if len(totals) > ceiling:
            raise ResourceCeilingError(
                f"round {t} holds {len(totals)} states, above the ceiling {ceiling}",
                estimate=len(totals),
                ceiling=ceiling,
            )
        yield t, totals


def a_sequence(spec: ProblemSpec, t_max: int, ceiling: int = DEFAULT_STATE_CEILING) -> RationalSequence:
    """Exact A(n, r; T) = E[max occupancy] - r*T/n for T = 1..t_max."""
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    estimate = projected_states(spec, t_max)
    if estimate > ceiling:
        raise ResourceCeilingError(
            f"t_max={t_max} projects up to {estimate} states for (n={spec.n}, r={spec.r}); "
            f"ceiling is {ceiling}",
            estimate=estimate,
            ceiling=ceiling,
        )
    n = spec.n
    c = spec.outcomes_per_round
    values = []
    for t, totals in tables(spec, t_max, ceiling):
        # n * (max - mean) = n * g[0] - sum(g): the r*t/n terms cancel
        num = sum(w * (n * g[0] - sum(g)) for g, w in totals.items())
        values.append(Fraction(num, n * c**t))
    return RationalSequence(spec, values)


def brute_force_oracle(spec: ProblemSpec, t_max: int, guard: int = BRUTE_FORCE_GUARD) -> RationalSequence:
    """A(1..t_max) by walking every sequence of r-subsets explicitly.

    Slow on purpose: it shares nothing with the gap-profile dynamic program
    and is only meant to check it.
    """
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    c = spec.outcomes_per_round
    total = sum(c**t for t in range(1, t_max + 1))
    if total > guard:
        raise ResourceCeilingError(
            f"brute force would visit {total} outcomes, guard is {guard}", estimate=total, ceiling=guard
        )
    subsets = list(itertools.combinations(range(spec.n), spec.r))
    occupancy = [0] * spec.n
    max_sums = [0] * (t_max + 1)

    def walk(depth):
        for s in subsets:
            for b in s:
                occupancy[b] += 1
            max_sums[depth] += max(occupancy)
            if depth < t_max:
                walk(depth + 1)
            for b in s:
                occupancy[b] -= 1

    walk(1)
    values = [Fraction(max_sums[t], c**t) - Fraction(spec.r * t, spec.n) for t in range(1, t_max + 1)]
    return RationalSequence(spec, values)


def closed_form_n2(t: int) -> Fraction:
    """A(2, 1; t) for odd t, as t! / (2^t * ((t-1)/2)!^2)."""
    if t < 1 or t % 2 == 0:
        raise ValueError(f"closed form holds for odd t >= 1 only, got {t}")
    h = (t - 1) // 2
    return Fraction(math.factorial(t), 2**t * math.factorial(h) ** 2)


def heuristic_constant(spec: ProblemSpec, dps: int = 30):
    """Heuristic estimate (r/n) * sqrt(pi * ln n) * ln(n/r) of the constant C_{n,r}."""
    if spec.n < 2:
        raise ValueError("heuristic constant needs n >= 2")
    with mpmath.workdps(dps):
        n, r = mpmath.mpf(spec.n), mpmath.mpf(spec.r)
        return +((r / n) * mpmath.sqrt(mpmath.pi * mpmath.log(n)) * mpmath.log(n / r))
