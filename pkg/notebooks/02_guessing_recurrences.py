"""Learning a linear recurrence with polynomial coefficients.

From exact values of A(n,r;T) we fit  sum_i p_i(T) A(T-i) = 0  by exact
linear algebra, check the result on held-out terms, and then confirm it far
beyond the fitted window.

Run:  python3 notebooks/02_guessing_recurrences.py
"""

from maxload import ProblemSpec, a_sequence, annihilates, search
from maxload.cli import format_poly

for n, r, terms, max_order, max_degree in [(2, 1, 30, 4, 4), (3, 1, 90, 6, 6)]:
    seq = a_sequence(ProblemSpec(n, r), terms)
    rep = search(seq, max_order, max_degree, holdout=10)
    op = rep.operator
    print(f"\nA({n},{r};T): order {op.order}, degree {op.degree}, "
          f"{rep.terms_used} terms fitted, {rep.terms_verified} equations verified")
    for i, p in enumerate(op.polys):
        print(f"  p{i}(T) = {format_poly(p)}")
    longer = a_sequence(ProblemSpec(n, r), 3 * terms)
    ok = annihilates(op, longer, op.valid_from + 1, 3 * terms)
    print(f"  holds exactly up to T = {3 * terms}: {ok}")

# The search schedule is visible in the trace: small ansatzes first.
rep = search(a_sequence(ProblemSpec(2, 1), 30), 4, 4, holdout=8)
for d, e, outcome in rep.search_trace:
    print(f"  order {d} degree {e}: {outcome}")
