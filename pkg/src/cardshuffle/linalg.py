"""Exact solvers for square integer systems ``A x = b`` with rational output.

Two independent routes:

* :func:`bareiss_solve` -- fraction-free Gaussian elimination with partial
  pivoting (largest magnitude).  Cubic in big-integer operations, so only
  used for small systems.
* :func:`dixon_solve` -- p-adic lifting: one LU factorization modulo a word
  prime, then repeated cheap solves lift the solution p-adically until
  rational reconstruction succeeds.  The result is accepted only after the
  exact integer check ``A num == b den`` passes, so it is certified.

Matrices are dense lists of lists of (small) ``int``; right-hand sides may
hold arbitrarily large ints.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np
from numba import njit

from .errors import SingularMatrixError

# primes below 2**31: residue products stay under 2**62, so int64 never overflows
_PRIMES = (2**31 - 1, 2147483629, 2147483587)
BAREISS_MAX = 48


def bareiss_solve(A: Sequence[Sequence[int]], b: Sequence[int]) -> list[Fraction]:
    n = len(A)
    if n == 0:
        return []
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    prev = 1
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(M[i][k]))
        if M[piv][k] == 0:
            raise SingularMatrixError(f"zero pivot in column {k}")
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
        rk = M[k]
        pk = rk[k]
        for i in range(k + 1, n):
            ri = M[i]
            f = ri[k]
            for j in range(k + 1, n + 1):
                ri[j] = (ri[j] * pk - f * rk[j]) // prev
            ri[k] = 0
        prev = pk
    det = M[n - 1][n - 1]
    y = [0] * n
    for i in range(n - 1, -1, -1):
        row = M[i]
        acc = det * row[n] - sum(row[j] * y[j] for j in range(i + 1, n))
        q, r = divmod(acc, row[i])
        assert r == 0, "Bareiss back substitution must divide exactly"
        y[i] = q
    return [Fraction(v, det) for v in y]


# ---------------------------------------------------------------------------
# modular kernels


@njit(cache=True)
def _powmod(a, e, p):
    r = 1
    a %= p
    while e:
        if e & 1:
            r = r * a % p
        a = a * a % p
        e >>= 1
    return r


@njit(cache=True)
def _lu_mod(a, p):
    n = a.shape[0]
    perm = np.arange(n)
    for k in range(n):
        piv = -1
        for i in range(k, n):
            if a[i, k] != 0:
                piv = i
                break
        if piv < 0:
            return perm, False
        if piv != k:
            for j in range(n):
                t = a[k, j]
                a[k, j] = a[piv, j]
                a[piv, j] = t
            t = perm[k]
            perm[k] = perm[piv]
            perm[piv] = t
        inv = _powmod(a[k, k], p - 2, p)
        for i in range(k + 1, n):
            if a[i, k] != 0:
                f = a[i, k] * inv % p
                a[i, k] = f
                for j in range(k + 1, n):
                    if a[k, j] != 0:
                        a[i, j] = (a[i, j] - f * a[k, j]) % p
    return perm, True


@njit(cache=True)
def _lu_solve_mod(lu, perm, diag_inv, b, p):
    n = lu.shape[0]
    y = np.empty(n, dtype=np.int64)
    for i in range(n):
        s = b[perm[i]]
        for j in range(i):
            s = (s - lu[i, j] * y[j]) % p
        y[i] = s
    for i in range(n - 1, -1, -1):
        s = y[i]
        for j in range(i + 1, n):
            s = (s - lu[i, j] * y[j]) % p
        y[i] = s * diag_inv[i] % p
    return y


def _ratrecon(a: int, m: int, bound: int) -> tuple[int, int] | None:
    """n/d with n = a d (mod m), |n| <= bound, 0 < d <= bound."""
    r0, r1 = m, a % m
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound:
        return None
    if t1 < 0:
        r1, t1 = -r1, -t1
    if math.gcd(r1, t1) != 1:
        return None
    return r1, t1


def _reconstruct(X: list[int], m: int) -> tuple[list[int], int] | None:
    """Common-denominator reconstruction of a p-adic vector."""
    bound = math.isqrt(m // 2)
    den = 1
    nums: list[int] = []
    for x in X:
        a = den * x % m
        if a > m // 2:
            a -= m
        if abs(a) <= bound:
            nums.append(a)
            continue
        rec = _ratrecon(a, m, bound)
        if rec is None:
            return None
        u, v = rec
        nums = [t * v for t in nums]
        nums.append(u)
        den *= v
        if den > bound:
            return None
    return nums, den


def _check(rows: list[list[tuple[int, int]]], b: Sequence[int], nums: list[int], den: int) -> bool:
    return all(
        sum(a * nums[j] for j, a in row) == bi * den for row, bi in zip(rows, b)
    )


def dixon_solve(A: Sequence[Sequence[int]], b: Sequence[int]) -> list[Fraction]:
    n = len(A)
    if n == 0:
        return []
    dense = np.array(A, dtype=np.int64)
    rows = [[(j, int(row[j])) for j in np.flatnonzero(row)] for row in dense]
    for p in _PRIMES:
        lu = dense % p
        perm, ok = _lu_mod(lu, p)
        if ok:
            break
    else:
        raise SingularMatrixError("matrix is singular modulo every trial prime")
    diag_inv = np.array([pow(int(lu[i, i]), p - 2, p) for i in range(n)], dtype=np.int64)

    r = [int(v) for v in b]
    X = [0] * n
    pk = 1
    steps = 0
    next_try = 4
    while True:
        rm = np.array([v % p for v in r], dtype=np.int64)
        x = _lu_solve_mod(lu, perm, diag_inv, rm, p)
        ax = (dense @ x).tolist()
        xs = x.tolist()
        r = [(ri - ai) // p for ri, ai in zip(r, ax)]
        X = [Xi + xi * pk for Xi, xi in zip(X, xs)]
        pk *= p
        steps += 1
        if steps == next_try or not any(r):
            rec = _reconstruct(X, pk)
            if rec is not None and _check(rows, b, *rec):
                nums, den = rec
                return [Fraction(v, den) for v in nums]
            next_try = max(next_try + 1, int(next_try * 1.5))


def solve_integer_system(A: Sequence[Sequence[int]], b: Sequence[int]) -> list[Fraction]:
    """Exact solution of ``A x = b``; picks Bareiss for small systems."""
    if len(A) <= BAREISS_MAX:
        return bareiss_solve(A, b)
    return dixon_solve(A, b)


def solve_rational_rhs(A: Sequence[Sequence[int]], b: Sequence[Fraction]) -> list[Fraction]:
    """Integer matrix, rational right-hand side."""
    scale = math.lcm(1, *(f.denominator for f in b))
    B = [f.numerator * (scale // f.denominator) for f in b]
    return [x / scale for x in solve_integer_system(A, B)]
