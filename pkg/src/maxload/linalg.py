"""Exact nullspaces of rational matrices.

Two routes compute the same thing, the nullspace basis read off the reduced
row echelon form (one vector per free column, carrying a 1 at that column and
0 at every other free column):

* :func:`nullspace_exact` runs Gauss-Jordan elimination on ``Fraction``
  entries.  It is the reference.
* :func:`nullspace_modular` runs the elimination modulo word-size primes with
  numpy, lifts the result by Chinese remaindering and rational
  reconstruction, and only returns once the lifted basis annihilates the
  input exactly.

Because the echelon basis is canonical for a fixed column order, both routes
return identical vectors.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

import gmpy2
import numpy as np

PRIME_START = 2**30


def primes(count: int, start: int = PRIME_START) -> list:
    out = []
    p = start
    while len(out) < count:
        p = int(gmpy2.next_prime(p))
        out.append(p)
    return out


def _size(x: Fraction) -> int:
    return x.numerator.bit_length() + x.denominator.bit_length()


def rref_exact(rows):
    """Reduced row echelon form over the rationals; returns (matrix, pivot columns)."""
    m = [[Fraction(x) for x in row] for row in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    top = 0
    for c in range(ncols):
        if top == len(m):
            break
        candidates = [i for i in range(top, len(m)) if m[i][c]]
        if not candidates:
            continue
        best = min(candidates, key=lambda i: _size(m[i][c]))
        m[top], m[best] = m[best], m[top]
        inv = 1 / m[top][c]
        prow = [x * inv for x in m[top]]
        m[top] = prow
        for i in range(len(m)):
            if i != top and m[i][c]:
                f = m[i][c]
                row = m[i]
                m[i] = [a - f * b if b else a for a, b in zip(row, prow)]
        pivots.append(c)
        top += 1
    return m[:top], pivots


def _basis_from_rref(reduced, pivots, ncols, zero, one):
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for row, pc in zip(reduced, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def nullspace_exact(rows, ncols: int | None = None) -> list:
    """Echelon nullspace basis of a rational matrix, as lists of Fractions."""
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    reduced, pivots = rref_exact(rows)
    return _basis_from_rref(reduced, pivots, ncols, Fraction(0), Fraction(1))


def rref_mod(matrix: np.ndarray, p: int):
    """Reduced row echelon form of an int64 matrix modulo a prime p < 2**31."""
    m = np.array(matrix, dtype=np.int64) % p
    nrows, ncols = m.shape
    pivots = []
    top = 0
    for c in range(ncols):
        if top == nrows:
            break
        nz = np.flatnonzero(m[top:, c])
        if nz.size == 0:
            continue
        i = top + int(nz[0])
        if i != top:
            m[[top, i]] = m[[i, top]]
        inv = pow(int(m[top, c]), -1, p)
        m[top] = (m[top] * inv) % p
        col = m[:, c].copy()
        col[top] = 0
        nzr = np.flatnonzero(col)
        if nzr.size:
            m[nzr] = (m[nzr] - np.outer(col[nzr], m[top]) % p) % p
        pivots.append(c)
        top += 1
    return m[:top], pivots


def nullspace_mod(matrix: np.ndarray, p: int):
    """Echelon nullspace basis modulo p; returns (basis array, pivot columns)."""
    reduced, pivots = rref_mod(matrix, p)
    ncols = matrix.shape[1]
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        if pivots:
            basis[k, pivots] = (-reduced[:, f]) % p
    return basis, pivots


def reduce_mod(x: Fraction, p: int) -> int:
    den = x.denominator % p
    if den == 0:
        raise ZeroDivisionError(f"denominator divisible by {p}")
    return x.numerator * pow(den, -1, p) % p


def rational_reconstruct(u: int, m: int):
    """Find a/b == u (mod m) with |a|, b <= sqrt(m/2), or None."""
    u %= m
    bound = isqrt(m // 2)
    r0, r1 = m, u
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if s1 < 0:
        r1, s1 = -r1, -s1
    if gcd(r1, s1) != 1:
        return None
    return Fraction(r1, s1)


def crt_pair(r1: int, m1: int, r2: int, m2: int):
    t = (r2 - r1) * pow(m1, -1, m2) % m2
    return r1 + m1 * t, m1 * m2


def annihilated(rows, vector) -> bool:
    return all(sum(a * b for a, b in zip(row, vector) if b) == 0 for row in rows)


def nullspace_modular(rows, ncols: int | None = None, max_primes: int = 64) -> list:
    """Echelon nullspace basis by multi-modular elimination and exact lifting.

    Primes whose pivot pattern differs from the majority seen so far (unlucky
    primes) are dropped.  The basis is returned only after it has been checked
    to annihilate every row exactly.
    """
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return nullspace_exact(rows, ncols)
    rows = [[Fraction(x) for x in row] for row in rows]
    residues = None
    modulus = 1
    pivot_key = None
    for p in primes(max_primes):
        try:
            mat = np.array([[reduce_mod(x, p) for x in row] for row in rows], dtype=np.int64)
        except ZeroDivisionError:
            continue
        basis, pivots = nullspace_mod(mat, p)
        key = tuple(pivots)
        if pivot_key is None or len(key) > len(pivot_key) or (len(key) == len(pivot_key) and key < pivot_key):
            # rank mod p never exceeds the true rank; a larger rank (or an
            # earlier pivot pattern) means the previous primes were unlucky
            if pivot_key is not None and key != pivot_key:
                residues, modulus = None, 1
            pivot_key = key
        elif key != pivot_key:
            continue
        if basis.shape[0] == 0:
            return []
        flat = [int(x) for x in basis.ravel()]
        if residues is None:
            residues, modulus = flat, p
        else:
            merged = [crt_pair(a, modulus, b, p) for a, b in zip(residues, flat)]
            residues = [a for a, _ in merged]
            modulus *= p
        lifted = [rational_reconstruct(u, modulus) for u in residues]
        if any(x is None for x in lifted):
            continue
        k = basis.shape[0]
        candidate = [lifted[i * ncols:(i + 1) * ncols] for i in range(k)]
        if all(annihilated(rows, v) for v in candidate):
            return candidate
    raise ArithmeticError(f"modular nullspace did not stabilize within {max_primes} primes")
