"""Monte Carlo cross-check of the exact expectation.

Simulates the process directly and reports how many standard errors the
sample mean sits from the exact E[max].

Run:  python3 notebooks/05_simulation.py
"""

from fractions import Fraction

from maxload import ProblemSpec, a_sequence
from maxload.simulate import SimConfig, run

for n, r, t in [(2, 1, 2), (3, 1, 50), (4, 2, 40), (4, 1, 30)]:
    spec = ProblemSpec(n, r)
    exact_mean = a_sequence(spec, t)[t] + Fraction(r * t, n)
    res = run(SimConfig(spec, t, 100_000, seed=1))
    print(f"(n={n}, r={r}, T={t}): simulated {res.mean_max:.5f} +- {res.std_error:.5f}, "
          f"exact {float(exact_mean):.5f}, z = {res.z_score(exact_mean):+.2f}")

# Same seed, same answer, however many workers share the blocks.
cfg = SimConfig(ProblemSpec(3, 1), 20, 50_000, seed=7)
assert run(cfg, workers=1).to_json() == run(cfg, workers=4).to_json()
print("worker count does not change the result")
