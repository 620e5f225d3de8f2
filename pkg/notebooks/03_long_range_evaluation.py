"""Unrolling a recurrence to T = 10**6.

Exact rationals grow quickly, so long runs use MPFR floats at a fixed
precision.  Running a second time at double precision tells us how many
digits survived.

Run:  python3 notebooks/03_long_range_evaluation.py
"""

from importlib import resources

import gmpy2

from maxload import PrecisionPolicy, closed_form_n2, extend_exact, extend_float, io
from maxload.evaluate import format_float

with resources.as_file(resources.files("maxload") / "data" / "rec_2_1.json") as path:
    spec, op = io.load_recurrence(path)

exact = extend_exact(op, 41)
print("exact A(41) =", exact.values[41], "| closed form:", closed_form_n2(41))

samples = [10**k for k in range(2, 7)]
res = extend_float(op, 10**6, PrecisionPolicy(256), sample_at=samples)
for t in samples:
    s = res.values[t] / gmpy2.sqrt(t)
    print(f"T = {t:>7}:  A(T)/sqrt(T) = {format_float(s, 15)}   ({res.agreed_digits[t]} digits agree at 512 bits)")
print("1/sqrt(2 pi)              =", format_float(1 / gmpy2.sqrt(2 * gmpy2.const_pi()), 15))
