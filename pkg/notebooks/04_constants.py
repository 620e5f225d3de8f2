"""The constant C in A(T) ~ C sqrt(T), by Richardson extrapolation.

Evaluates each bundled recurrence on a doubling ladder of multiples of n up
to about 2**20 and extrapolates A(T)/sqrt(T).  Takes a few minutes, mostly
for the order-8 recurrences.

Run:  python3 notebooks/04_constants.py
"""

from importlib import resources

from maxload import PrecisionPolicy, compare_report, estimate_constant, extend_float, io
from maxload.asymptotics import comparison_table
from maxload.cli import residue_ladder

records = []
for n, r in [(2, 1), (3, 1), (4, 1), (4, 2)]:
    with resources.as_file(resources.files("maxload") / "data" / f"rec_{n}_{r}.json") as path:
        spec, op = io.load_recurrence(path)
    rungs = residue_ladder(n)
    res = extend_float(op, rungs[-1], PrecisionPolicy(256, double_check=False), sample_at=rungs)
    fit = estimate_constant([(t, res.values[t]) for t in rungs])
    print(f"(n={n}, r={r}) raw A(T)/sqrt(T) at T={rungs[-1]}: {float(fit.raw_last):.10f}")
    records.append(compare_report(spec, fit))

print()
print(comparison_table(records, 10))
# The heuristic column is far off for these small cases; it is a large-n formula.
