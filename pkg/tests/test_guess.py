import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxload import ProblemSpec, RecurrenceOperator, a_sequence, annihilates, fit, search, search_stable
from maxload.errors import InsufficientTermsError
from maxload.guess import (
    _positive_integer_roots,
    characteristic_roots,
    is_forward_stable,
    leading_valid_from,
    normalize_polys,
    required_terms,
)

OP_2_1 = [[-1, 1], [-1], [1, -1]]


def noise(count, seed=7):
    rng = random.Random(seed)
    return [Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**6)) for _ in range(count)]


# --- examples --------------------------------------------------------------


def test_fit_two_bins_from_20_terms(seq_2_1):
    rep = fit(seq_2_1.values[:20], 2, 1, holdout=8)
    assert rep.found
    assert rep.operator.polys == OP_2_1
    assert rep.operator.valid_from == 2
    assert rep.operator.initial == [Fraction(1, 2), Fraction(1, 2)]
    assert rep.terms_verified >= 10


def test_fit_constant_sequence():
    rep = fit([Fraction(1)] * 12, 1, 0, holdout=5)
    assert rep.found
    assert rep.operator.polys == [[1], [-1]]


def test_fit_three_bins_order5(seq_3_1, reference_3_1):
    rep = fit(seq_3_1.values[:80], 5, 7, holdout=15)
    assert rep.found
    op = rep.operator
    assert op.order == 5
    assert annihilates(op, seq_3_1, op.valid_from + 1, 150)
    # the reference operator kills the same range and coincides with the guess
    assert annihilates(reference_3_1, seq_3_1, 6, 150)
    assert op.polys == reference_3_1.polys


def test_search_two_bins_first(seq_2_1):
    rep = search(seq_2_1.values[:30], 4, 4, 8)
    assert rep.found
    assert (rep.operator.order, rep.operator.degree) == (2, 1)
    tried = [(d, e) for d, e, _ in rep.search_trace]
    assert all(d + e <= 3 for d, e in tried)


def test_search_noise_fails():
    rep = search(noise(30), 3, 3, 8)
    assert not rep.found
    assert rep.search_trace
    assert all("found" not in outcome for _, _, outcome in rep.search_trace)
    tried = {(d, e) for d, e, _ in rep.search_trace}
    assert tried == {(d, e) for d in range(1, 4) for e in range(4)}


def test_annihilates_examples(seq_2_1, op_2_1, reference_3_1, seq_3_1):
    long_2_1 = a_sequence(ProblemSpec(2, 1), 100)
    assert annihilates(op_2_1, long_2_1, 3, 100)
    assert annihilates(reference_3_1, seq_3_1, 6, 120)
    bad = RecurrenceOperator([[-1, 1], [-1], [2, -1]], 2)
    assert not annihilates(bad, long_2_1, 3, 100)


def test_annihilates_range_checks(seq_2_1, op_2_1):
    with pytest.raises(ValueError):
        annihilates(op_2_1, seq_2_1, 2, 10)
    with pytest.raises(ValueError):
        annihilates(op_2_1, seq_2_1, 3, 61)


def test_insufficient_terms():
    with pytest.raises(InsufficientTermsError) as info:
        fit([Fraction(1)] * 10, 2, 2)
    assert info.value.required == required_terms(2, 2)


def test_min_verified_gate(seq_2_1):
    rep = fit(seq_2_1.values[:14], 2, 1, holdout=3, margin=1)
    assert not rep.found
    assert "verified" in rep.search_trace[-1][2]
    assert fit(seq_2_1.values[:14], 2, 1, holdout=3, margin=1, min_verified=3).found


def test_holdout_catches_late_break():
    values = [Fraction(1)] * 20 + [Fraction(2)]
    rep = fit(values, 1, 0, holdout=5)
    assert not rep.found
    assert "holdout violated at T=21" in rep.search_trace[-1][2]


def test_unknown_method(seq_2_1):
    with pytest.raises(ValueError):
        fit(seq_2_1.values[:30], 2, 1, method="floats")


# --- invariants ------------------------------------------------------------


@pytest.mark.parametrize("n,r,terms,order,degree", [(2, 1, 40, 3, 3), (3, 1, 90, 5, 6), (3, 2, 90, 5, 6), (4, 3, 60, 3, 3)])
def test_soundness(n, r, terms, order, degree):
    seq = a_sequence(ProblemSpec(n, r), terms)
    rep = search(seq, order, degree, 10)
    if rep.found:
        op = rep.operator
        assert annihilates(op, seq, op.valid_from + 1, terms)


def test_normalization_idempotent(seq_3_1):
    op = fit(seq_3_1.values[:90], 5, 6, holdout=15).operator
    assert normalize_polys(op.polys) == op.polys
    assert op.normalized().polys == op.polys


@settings(max_examples=30)
@given(st.lists(st.lists(st.integers(-30, 30), min_size=1, max_size=4), min_size=2, max_size=4), st.integers(-5, 5).filter(bool))
def test_normalization_idempotent_random(polys, scale):
    try:
        once = normalize_polys([[scale * c for c in p] for p in polys])
    except ValueError:
        return
    assert normalize_polys(once) == once
    try:
        assert normalize_polys(polys) == once
    except ValueError:
        pass


@pytest.mark.parametrize("c", [Fraction(-3), Fraction(7, 5), Fraction(1, 10**9)])
def test_scale_invariance(seq_2_1, c):
    scaled = [c * v for v in seq_2_1.values[:30]]
    op = fit(scaled, 2, 1, holdout=8).operator
    assert annihilates(op, scaled, 3, 30)
    assert annihilates(op, seq_2_1, 3, 60)


def test_determinism(seq_3_1):
    a = search(seq_3_1.values[:80], 5, 5, 10)
    b = search(seq_3_1.values[:80], 5, 5, 10)
    assert repr(a) == repr(b)


@pytest.mark.parametrize("terms", [30, 45, 60])
def test_minimality_two_bins(seq_2_1, terms):
    rep = search(seq_2_1.values[:terms], 6, 6, 10)
    assert rep.operator.order <= 2


def test_minimal_order_inside_oversized_ansatz(seq_2_1):
    # an order-4 ansatz still returns the order-2 operator
    rep = fit(seq_2_1.values[:60], 4, 2, holdout=10)
    assert rep.operator.polys == OP_2_1


@pytest.mark.parametrize("n,r,terms,order,degree", [(2, 1, 40, 2, 1), (3, 1, 90, 5, 5), (4, 3, 60, 3, 2)])
def test_exact_and_modular_agree(n, r, terms, order, degree):
    seq = a_sequence(ProblemSpec(n, r), terms)
    a = fit(seq, order, degree, holdout=10, method="exact")
    b = fit(seq, order, degree, holdout=10, method="modular")
    assert a.operator == b.operator
    assert a.terms_verified == b.terms_verified


# --- leading-coefficient roots and stability -------------------------------


def test_valid_from_from_p0_roots():
    # p0 = (T - 7)(T - 3)
    assert _positive_integer_roots([21, -10, 1]) == [3, 7]
    assert leading_valid_from([[21, -10, 1], [1]]) == 7
    assert leading_valid_from([[1, 1], [1], [1]]) == 2


def test_characteristic_roots_two_bins(op_2_1):
    roots = sorted(abs(characteristic_roots(op_2_1)))
    assert roots == pytest.approx([1.0, 1.0])
    assert is_forward_stable(op_2_1)


def test_unstable_operator_flagged():
    op = RecurrenceOperator([[1], [-3], [2]], 2)
    assert not is_forward_stable(op)


def test_search_stable_keeps_stable_answer():
    # a stable answer is returned unchanged
    values = [Fraction(1)] * 40
    rep = search_stable(values, 3, 2, 10)
    assert rep.found and rep.operator.order == 1


def test_search_stable_rejects_growth():
    values = [Fraction(2) ** t for t in range(1, 40)]
    assert search(values, 2, 1, 10).found
    rep = search_stable(values, 2, 1, 10)
    assert not rep.found
    assert any("rejected" in outcome for _, _, outcome in rep.search_trace)
