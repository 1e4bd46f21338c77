"""Exact rational and integer linear algebra on top of python-flint."""
from __future__ import annotations

from fractions import Fraction

import flint


def qmat(rows, ncols=None) -> flint.fmpq_mat:
    rows = [list(r) for r in rows]
    if not rows:
        return flint.fmpq_mat(0, ncols or 0)
    return flint.fmpq_mat(len(rows), len(rows[0]), [flint.fmpq(Fraction(x).numerator, Fraction(x).denominator) for r in rows for x in r])


def zmat(rows, ncols=None) -> flint.fmpz_mat:
    rows = [list(r) for r in rows]
    if not rows:
        return flint.fmpz_mat(0, ncols or 0)
    return flint.fmpz_mat(rows)


def to_fractions(M) -> list:
    """Rows of a flint matrix as lists of Fractions."""
    return [[Fraction(int(x.p), int(x.q)) if isinstance(x, flint.fmpq) else Fraction(int(x)) for x in row] for row in M.tolist()]


def to_ints(M) -> list:
    return [[int(x) for x in row] for row in M.tolist()]


def columns(M) -> list:
    return [list(c) for c in zip(*M.tolist())] if M.nrows() else [[] for _ in range(M.ncols())]


def as_integral(M: flint.fmpq_mat):
    """Return the fmpz_mat equal to M, raising ValueError if M is not integral."""
    num, den = M.numer_denom()
    if den != 1:
        raise ValueError("matrix is not integral")
    return num


def clear_denominators(M: flint.fmpq_mat):
    num, den = M.numer_denom()
    return num, int(den)


def rref_pivots(M: flint.fmpq_mat):
    """Reduced row echelon form, rank and pivot columns."""
    R, rank = M.rref()
    pivots = []
    col = 0
    for i in range(rank):
        while R[i, col] == 0:
            col += 1
        pivots.append(col)
        col += 1
    return R, rank, pivots


def kernel_columns(M: flint.fmpq_mat) -> flint.fmpq_mat:
    """Basis of {x : M x = 0} as the columns of a rational matrix."""
    n = M.ncols()
    R, rank, pivots = rref_pivots(M)
    free = [j for j in range(n) if j not in set(pivots)]
    K = flint.fmpq_mat(n, len(free))
    for t, f in enumerate(free):
        K[f, t] = 1
        for i, pc in enumerate(pivots):
            K[pc, t] = -R[i, f]
    return K


def integer_kernel(A: flint.fmpz_mat) -> flint.fmpz_mat:
    """Saturated Z-basis (as rows) of {x in Z^n : A x = 0}."""
    n = A.ncols()
    if A.nrows() == 0:
        return identity_z(n)
    H, U = A.transpose().hnf(transform=True)
    rows = [U.tolist()[i] for i in range(H.nrows()) if all(x == 0 for x in H.tolist()[i])]
    return flint.fmpz_mat(rows) if rows else flint.fmpz_mat(0, n)


def identity_z(n: int) -> flint.fmpz_mat:
    M = flint.fmpz_mat(n, n)
    for i in range(n):
        M[i, i] = 1
    return M


def identity_q(n: int) -> flint.fmpq_mat:
    M = flint.fmpq_mat(n, n)
    for i in range(n):
        M[i, i] = 1
    return M


def saturate_rows(rows: flint.fmpq_mat) -> flint.fmpz_mat:
    """Z-basis (rows) of Z^n intersected with the Q-span of the given rows."""
    n = rows.ncols()
    if rows.nrows() == 0:
        return flint.fmpz_mat(0, n)
    num, _ = rows.numer_denom()
    perp = integer_kernel(num)  # vectors orthogonal to every row
    if perp.nrows() == 0:
        return identity_z(n)
    return integer_kernel(perp)


def solve_columns(B: flint.fmpq_mat, V: flint.fmpq_mat) -> flint.fmpq_mat:
    """Solve B X = V for B of full column rank; raises ValueError if inconsistent."""
    aug = flint.fmpq_mat(B.nrows(), B.ncols() + V.ncols())
    for i in range(B.nrows()):
        for j in range(B.ncols()):
            aug[i, j] = B[i, j]
        for j in range(V.ncols()):
            aug[i, B.ncols() + j] = V[i, j]
    R, rank, pivots = rref_pivots(aug)
    r = B.ncols()
    if pivots[:r] != list(range(r)) or any(pc >= r for pc in pivots):
        raise ValueError("system has no solution in the column span")
    X = flint.fmpq_mat(r, V.ncols())
    for i in range(r):
        for j in range(V.ncols()):
            X[i, j] = R[i, r + j]
    return X


def hstack(*mats) -> flint.fmpq_mat:
    n = mats[0].nrows()
    out = flint.fmpq_mat(n, sum(m.ncols() for m in mats))
    off = 0
    for m in mats:
        for i in range(n):
            for j in range(m.ncols()):
                out[i, off + j] = m[i, j]
        off += m.ncols()
    return out


def vstack(*mats) -> flint.fmpq_mat:
    n = mats[0].ncols()
    out = flint.fmpq_mat(sum(m.nrows() for m in mats), n)
    off = 0
    for m in mats:
        for i in range(m.nrows()):
            for j in range(n):
                out[off + i, j] = m[i, j]
        off += m.nrows()
    return out


def to_q(M: flint.fmpz_mat) -> flint.fmpq_mat:
    return flint.fmpq_mat(M)


def factor_charpoly(M: flint.fmpq_mat):
    """Factor the characteristic polynomial of a rational matrix over Z.

    Returns a list of (fmpz_poly factor, multiplicity); the polynomial is made
    primitive first, so integral matrices give monic factors.
    """
    cp = M.charpoly()
    den = 1
    for c in cp.coeffs():
        den = den * int(c.q) // _gcd(den, int(c.q))
    zp = flint.fmpz_poly([int(c * den) for c in cp.coeffs()])
    _, factors = zp.factor()
    return factors


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def poly_at_matrix(poly: flint.fmpz_poly, M: flint.fmpq_mat) -> flint.fmpq_mat:
    """Evaluate an integer polynomial at a square matrix by Horner's rule."""
    n = M.nrows()
    out = flint.fmpq_mat(n, n)
    I = identity_q(n)
    for c in reversed(poly.coeffs()):
        out = out * M + I * int(c)
    return out
