"""Exact distribution of the fullest bin.

Two balls per round into four bins: we step the gap-profile table forward,
print the distribution of the maximum at a few rounds, and check the means
against a brute-force walk over every outcome sequence.

Run:  python3 notebooks/01_exact_distribution.py
"""

from fractions import Fraction

from maxload import ProblemSpec, a_sequence, brute_force_oracle, initial_state, max_pmf, step

spec = ProblemSpec(4, 2)
state = initial_state(spec)
for t in range(1, 9):
    state = step(state, spec)
    pmf = max_pmf(state, spec)
    dist = ", ".join(f"{m}: {p}" for m, p in pmf.entries.items())
    print(f"T={t}  {len(state):3d} profiles  Pr(max = m) = {{{dist}}}")

# The centered mean A(T) = E[max] - rT/n, exact.
seq = a_sequence(spec, 8)
print("\nA(4,2;T), T = 1..8:", [str(v) for v in seq.values])
assert seq.values == brute_force_oracle(spec, 8).values
print("brute-force walk agrees")

# How large do the tables get?  The live profile count grows polynomially in T.
for n, r, t in [(3, 1, 200), (4, 1, 100), (4, 2, 60)]:
    s = ProblemSpec(n, r)
    st = initial_state(s)
    for _ in range(t):
        st = step(st, s)
    print(f"(n={n}, r={r}) at T={t}: {len(st)} profiles, A = {float(max_pmf(st, s).mean() - Fraction(r * t, n)):.6f}")
