"""Exact integer linear algebra: Hermite/Smith forms, lattice membership.

All matrices are lists of lists (or tuples) of Python ints, so every
computation is arbitrary precision.  Row vectors span lattices.
"""

from __future__ import annotations

from math import gcd


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) = x*a + y*b and g >= 0."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        g, x, y = -g, -x, -y
    return g, x, y


def mat_mul(A, B):
    n, k = len(A), len(B[0])
    m = len(B)
    return [[sum(A[i][t] * B[t][j] for t in range(m)) for j in range(k)]
            for i in range(n)]


def identity(n: int):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def det(A) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    n = len(A)
    M = [list(row) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def hermite_form(rows) -> list[list[int]]:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Returns a list of nonzero rows in echelon form: pivots strictly to the
    right as you go down, pivots positive, entries above a pivot reduced to
    lie in [0, pivot).  The row span is preserved exactly.
    """
    if not rows:
        return []
    m = len(rows[0])
    work = [list(r) for r in rows if any(r)]
    basis: list[list[int]] = []   # echelon rows, pivot column increasing
    pivots: list[int] = []
    for vec in work:
        v = list(vec)
        for b, p in zip(basis, pivots):
            if v[p] == 0:
                continue
            g, x, y = xgcd(b[p], v[p])
            bp, vp = b[p] // g, v[p] // g
            for j in range(m):
                bj, vj = b[j], v[j]
                b[j] = x * bj + y * vj
                v[j] = -vp * bj + bp * vj
        j = next((j for j in range(m) if v[j] != 0), None)
        if j is None:
            continue
        if v[j] < 0:
            v = [-t for t in v]
        pos = next((k for k, p in enumerate(pivots) if p > j), len(pivots))
        basis.insert(pos, v)
        pivots.insert(pos, j)
    # reduce entries above each pivot
    for k in range(len(basis) - 1, -1, -1):
        p = pivots[k]
        for i in range(k):
            q = basis[i][p] // basis[k][p]
            if q:
                for j in range(m):
                    basis[i][j] -= q * basis[k][j]
    return basis


def hnf_reduce(vec, hnf) -> list[int]:
    """Reduce ``vec`` modulo the lattice with Hermite basis ``hnf``.

    The result is the canonical coset representative: at every pivot column
    the entry is reduced into [0, pivot).
    """
    v = list(vec)
    for row in hnf:
        p = next(j for j in range(len(row)) if row[j] != 0)
        q = v[p] // row[p]
        if q:
            for j in range(len(v)):
                v[j] -= q * row[j]
    return v


def hnf_member(vec, hnf) -> bool:
    return not any(hnf_reduce(vec, hnf))


def smith_divisors(A) -> list[int]:
    """Elementary divisors (nonzero diagonal of the Smith normal form)."""
    M = [list(row) for row in A]
    if not M or not M[0]:
        return []
    rows, cols = len(M), len(M[0])
    divisors = []
    r = 0
    while r < min(rows, cols):
        # find a nonzero pivot in the submatrix M[r:][r:]
        pr = pc = None
        for i in range(r, rows):
            for j in range(r, cols):
                if M[i][j] != 0:
                    pr, pc = i, j
                    break
            if pr is not None:
                break
        if pr is None:
            break
        M[r], M[pr] = M[pr], M[r]
        for row in M:
            row[r], row[pc] = row[pc], row[r]
        while True:
            # clear column r with row operations
            for i in range(r + 1, rows):
                while M[i][r] != 0:
                    if M[r][r] == 0 or M[i][r] % M[r][r] != 0:
                        g, x, y = xgcd(M[r][r], M[i][r])
                        a, b = M[r][r] // g, M[i][r] // g
                        for j in range(r, cols):
                            s, t = M[r][j], M[i][j]
                            M[r][j] = x * s + y * t
                            M[i][j] = -b * s + a * t
                    else:
                        q = M[i][r] // M[r][r]
                        for j in range(r, cols):
                            M[i][j] -= q * M[r][j]
            # clear row r with column operations
            for j in range(r + 1, cols):
                while M[r][j] != 0:
                    if M[r][r] == 0 or M[r][j] % M[r][r] != 0:
                        g, x, y = xgcd(M[r][r], M[r][j])
                        a, b = M[r][r] // g, M[r][j] // g
                        for i in range(r, rows):
                            s, t = M[i][r], M[i][j]
                            M[i][r] = x * s + y * t
                            M[i][j] = -b * s + a * t
                    else:
                        q = M[r][j] // M[r][r]
                        for i in range(r, rows):
                            M[i][j] -= q * M[i][r]
            if all(M[i][r] == 0 for i in range(r + 1, rows)):
                break
        divisors.append(abs(M[r][r]))
        r += 1
    # enforce the divisibility chain d1 | d2 | ...
    for i in range(len(divisors)):
        for j in range(i + 1, len(divisors)):
            a, b = divisors[i], divisors[j]
            g = gcd(a, b)
            divisors[i], divisors[j] = g, a * b // g if g else 0
    return divisors


def solve_integer(A, b):
    """One integer solution x of x @ A = b (row convention), or None.

    A is a list of row vectors; we look for an integer combination of the
    rows equal to b.
    """
    if not A:
        return [] if not any(b) else None
    m = len(A[0])
    n = len(A)
    # track coefficients while reducing to Hermite form
    aug = [list(A[i]) + [1 if j == i else 0 for j in range(n)]
           for i in range(n)]
    basis: list[list[int]] = []
    pivots: list[int] = []
    for vec in aug:
        v = list(vec)
        for bs, p in zip(basis, pivots):
            if v[p] == 0:
                continue
            g, x, y = xgcd(bs[p], v[p])
            bp, vp = bs[p] // g, v[p] // g
            for j in range(m + n):
                s, t = bs[j], v[j]
                bs[j] = x * s + y * t
                v[j] = -vp * s + bp * t
        j = next((j for j in range(m) if v[j] != 0), None)
        if j is None:
            continue
        if v[j] < 0:
            v = [-t for t in v]
        pos = next((k for k, p in enumerate(pivots) if p > j), len(pivots))
        basis.insert(pos, v)
        pivots.insert(pos, j)
    r = [int(t) for t in b]
    coeff = [0] * n
    for bs, p in zip(basis, pivots):
        if r[p] == 0:
            continue
        if r[p] % bs[p] != 0:
            return None
        q = r[p] // bs[p]
        for j in range(m):
            r[j] -= q * bs[j]
        for j in range(n):
            coeff[j] += q * bs[m + j]
    if any(r):
        return None
    return coeff


def inverse_unimodular(A):
    """Exact inverse of an integer matrix with determinant +-1."""
    d = det(A)
    if d not in (1, -1):
        raise ValueError(f"matrix is not unimodular (det = {d})")
    n = len(A)
    # adjugate via cofactors; n is small here
    inv = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[A[r][c] for c in range(n) if c != i]
                     for r in range(n) if r != j]
            cof = det(minor) if minor else 1
            inv[i][j] = d * ((-1) ** (i + j)) * cof
    return inv
