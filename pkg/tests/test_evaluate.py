import math
from fractions import Fraction

import gmpy2
import pytest

from maxload import (
    PrecisionPolicy,
    ProblemSpec,
    RecurrenceOperator,
    a_sequence,
    brute_force_oracle,
    closed_form_n2,
    extend_exact,
    extend_float,
    search,
)
from maxload.errors import PrecisionLossError, ResourceCeilingError, SingularLeadingCoefficientError
from maxload.evaluate import agreed_digits, format_float

CONSTANT = RecurrenceOperator([[1], [-1]], 1, [Fraction(7)])


def test_exact_a9(op_2_1):
    value = extend_exact(op_2_1, 9).values[9]
    assert value == Fraction(315, 256)
    assert value == closed_form_n2(9)
    assert value == brute_force_oracle(ProblemSpec(2, 1), 9)[9]


def test_exact_echoes_initial_values(reference_3_1):
    res = extend_exact(reference_3_1, 5)
    assert res.values[5] == Fraction(10, 9)
    assert len(res.values) == 5


def test_exact_constant():
    assert extend_exact(CONSTANT, 100).values[100] == 7


def test_exact_ceiling(op_2_1):
    with pytest.raises(ResourceCeilingError):
        extend_exact(op_2_1, 10_001)
    assert extend_exact(op_2_1, 50, ceiling=50).values[50] == a_sequence(ProblemSpec(2, 1), 50)[50]


def test_singular_leading_coefficient():
    # p0 = T - 4 vanishes inside the range when the initial values stop short
    op = RecurrenceOperator([[-4, 1], [-1]], 1, [Fraction(1)])
    with pytest.raises(SingularLeadingCoefficientError) as info:
        extend_exact(op, 10)
    assert info.value.at == 4
    with pytest.raises(SingularLeadingCoefficientError):
        extend_float(op, 10)


def test_missing_initial_values(op_2_1):
    short = RecurrenceOperator(op_2_1.polys, 2, [Fraction(1, 2)])
    with pytest.raises(ValueError):
        extend_exact(short, 10)
    with pytest.raises(ValueError):
        extend_float(short, 10)


def test_float_million(op_2_1):
    res = extend_float(op_2_1, 10**6, PrecisionPolicy(256, double_check=False))
    with gmpy2.context(gmpy2.get_context(), precision=256):
        s = res.values[10**6] / gmpy2.sqrt(gmpy2.mpfr(10**6))
        c = 1 / gmpy2.sqrt(2 * gmpy2.const_pi())
        assert abs(s - c) < 1e-4 * c
    assert str(s).startswith("0.39894")


def test_float_matches_exact(op_2_1):
    exact = extend_exact(op_2_1, 1000).values
    res = extend_float(op_2_1, 1000, PrecisionPolicy(256), sample_at={999})
    assert res.agreed_digits[999] >= 70
    q = exact[999]
    with gmpy2.context(gmpy2.get_context(), precision=512):
        rel = abs(res.values[999] - gmpy2.mpq(q.numerator, q.denominator)) / gmpy2.mpq(q.numerator, q.denominator)
    assert rel < 10.0 ** (-res.agreed_digits[999] + 2)


def test_float_constant_exact_at_any_precision():
    for bits in (64, 256):
        res = extend_float(CONSTANT, 10**6, PrecisionPolicy(bits, double_check=False), sample_at={1, 500_000, 10**6})
        assert all(v == 7 for v in res.values.values())


@pytest.mark.parametrize("n,r", [(2, 1), (3, 1), (4, 1), (4, 2)])
def test_float_exact_consistency_to_2000(shipped, n, r):
    op = shipped(n, r)
    samples = list(range(op.valid_from + 1, 2001, 97)) + [2000]
    exact = extend_exact(op, 2000).values
    res = extend_float(op, 2000, PrecisionPolicy(256), sample_at=samples)
    for t in samples:
        q = exact[t]
        with gmpy2.context(gmpy2.get_context(), precision=512):
            ref = gmpy2.mpq(q.numerator, q.denominator)
            rel = abs(res.values[t] - ref) / ref
        assert rel < 10.0 ** (-res.agreed_digits[t] + 2)
        assert res.agreed_digits[t] >= 6


@pytest.mark.parametrize("n,r,terms,order,degree", [(2, 1, 40, 3, 3), (3, 1, 90, 5, 6), (4, 2, 100, 8, 6)])
def test_exact_path_matches_engine(n, r, terms, order, degree):
    seq = a_sequence(ProblemSpec(n, r), terms)
    op = search(seq, order, degree, 15).operator
    assert extend_exact(op, terms).values == {t: seq[t] for t in range(1, terms + 1)}


def test_exact_path_matches_engine_4_1(shipped):
    seq = a_sequence(ProblemSpec(4, 1), 60)
    op = shipped(4, 1)
    assert extend_exact(op, 60).values == {t: seq[t] for t in range(1, 61)}


def test_window_discipline(op_2_1):
    live = []
    extend_float(op_2_1, 20_000, PrecisionPolicy(128, double_check=False), sample_at={10, 20_000}, on_step=live.append)
    assert len(live) == 20_000 - 2
    assert max(live) <= op_2_1.order + 2


def test_precision_loss_detected():
    # characteristic roots 1 and 2: starting on the bounded solution, rounding feeds the 2**T one
    op = RecurrenceOperator([[1], [-3], [2]], 2, [Fraction(1, 3), Fraction(1, 3)])
    res = extend_float(op, 400, PrecisionPolicy(64), sample_at={400})
    assert res.precision_lost == [400]
    with pytest.raises(PrecisionLossError):
        extend_float(op, 400, PrecisionPolicy(64), sample_at={400}, strict=True)


def test_sample_range_checked(op_2_1):
    with pytest.raises(ValueError):
        extend_float(op_2_1, 100, sample_at={101})


def test_policy_minimum_bits():
    with pytest.raises(ValueError):
        PrecisionPolicy(32)


def test_agreed_digits():
    with gmpy2.context(gmpy2.get_context(), precision=256):
        x = gmpy2.mpfr(1) / 3
        y = x + gmpy2.mpfr("1e-20")
    assert agreed_digits(x, y, 256) in (19, 20)
    assert agreed_digits(x, x, 256) == int(256 * math.log10(2))
    assert agreed_digits(gmpy2.mpfr(1), gmpy2.mpfr(0), 64) == 0


def test_format_float():
    assert format_float(gmpy2.mpfr("0.3989422804"), 5) == "3.9894e-1"
    assert format_float(gmpy2.mpfr(-1234.5), 3) == "-1.23e3"
    assert format_float(gmpy2.mpfr(0), 3) == "0"
