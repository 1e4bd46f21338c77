"""Exact linear algebra over the localization Z_(p) of the integers at an odd prime.

Scalars are plain :class:`fractions.Fraction` values. An element is p-integral
when p does not divide its denominator; everything in this module accepts
non-integral entries (they live in K = Q), and lattices are Z_(p)-modules
inside K^n.

Matrices are lists of rows. :class:`PLocalMatrix` is a light immutable wrapper
used at module boundaries; internal helpers work on plain nested lists.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import NotFinite

INF = math.inf

Vector = list  # list[Fraction]
Rows = list  # list[list[Fraction]]


class _NoSolution:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NO_SOLUTION"

    def __bool__(self):
        return False


NO_SOLUTION = _NoSolution()


def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def valuation(x, p: int):
    """p-adic valuation of a rational; ``INF`` for zero."""
    x = frac(x)
    if x == 0:
        return INF
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def is_p_integral(x, p: int) -> bool:
    return frac(x).denominator % p != 0


def unit_part(x, p: int) -> Fraction:
    """x / p^v(x)."""
    x = frac(x)
    v = valuation(x, p)
    return x / Fraction(p) ** v


# ---------------------------------------------------------------------------
# ideals


@dataclass(frozen=True, order=False)
class PIdeal:
    """The ideal p^valuation of Z_(p); ``valuation=None`` is the zero ideal."""

    valuation: int | None

    def __post_init__(self):
        if self.valuation is not None and self.valuation < 0:
            raise ValueError("ideal valuation must be non-negative")

    @property
    def is_zero(self) -> bool:
        return self.valuation is None

    @property
    def is_unit(self) -> bool:
        return self.valuation == 0

    def __mul__(self, other: "PIdeal") -> "PIdeal":
        if self.is_zero or other.is_zero:
            return ZERO_IDEAL
        return PIdeal(self.valuation + other.valuation)

    def contains(self, other: "PIdeal") -> bool:
        """self ⊇ other."""
        if other.is_zero:
            return True
        if self.is_zero:
            return False
        return self.valuation <= other.valuation

    def contains_element(self, x, p: int) -> bool:
        return self.contains(PIdeal.generated_by(x, p))

    @staticmethod
    def generated_by(x, p: int) -> "PIdeal":
        v = valuation(x, p)
        if v == INF:
            return ZERO_IDEAL
        if v < 0:
            raise ValueError(f"{x} is not p-integral for p={p}")
        return PIdeal(v)

    def __str__(self):
        if self.is_zero:
            return "(0)"
        if self.valuation == 0:
            return "(1)"
        return f"p^{self.valuation}"

    def to_json(self):
        return None if self.is_zero else self.valuation


ZERO_IDEAL = PIdeal(None)
UNIT_IDEAL = PIdeal(0)


# ---------------------------------------------------------------------------
# plain matrix helpers


def identity(n: int) -> Rows:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Rows:
    return [[Fraction(0)] * n for _ in range(m)]


def to_rows(A) -> Rows:
    if isinstance(A, PLocalMatrix):
        return [list(r) for r in A.rows]
    return [[frac(x) for x in row] for row in A]


def matmul(A: Rows, B: Rows) -> Rows:
    if not A:
        return []
    Bt = list(zip(*B)) if B else []
    if not Bt:
        return [[] for _ in A]
    return [[sum((a * b for a, b in zip(row, col) if a and b), Fraction(0)) for col in Bt] for row in A]


def matvec(A: Rows, v: Sequence) -> Vector:
    return [sum((a * b for a, b in zip(row, v) if a and b), Fraction(0)) for row in A]


def transpose(A: Rows, ncols: int | None = None) -> Rows:
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(c) for c in zip(*A)]


def columns_to_matrix(vectors: Sequence[Sequence], n: int) -> Rows:
    """n x len(vectors) matrix whose columns are the vectors."""
    return [[frac(v[i]) for v in vectors] for i in range(n)]


def min_valuation(entries: Iterable, p: int):
    return min((valuation(x, p) for x in entries), default=INF)


def is_integral_matrix(A: Rows, p: int) -> bool:
    return all(is_p_integral(x, p) for row in A for x in row)


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class PLocalMatrix:
    p: int
    rows: tuple

    @classmethod
    def of(cls, p: int, rows) -> "PLocalMatrix":
        return cls(p, tuple(tuple(frac(x) for x in r) for r in rows))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def tolist(self) -> Rows:
        return [list(r) for r in self.rows]

    def __matmul__(self, other: "PLocalMatrix") -> "PLocalMatrix":
        return PLocalMatrix.of(self.p, matmul(self.tolist(), other.tolist()))

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def is_diagonal(self) -> bool:
        return all(x == 0 for i, r in enumerate(self.rows) for j, x in enumerate(r) if i != j)

    def diagonal_valuations(self) -> list:
        m, n = self.shape
        return [valuation(self.rows[i][i], self.p) for i in range(min(m, n))]


def determinant(A: Rows) -> Fraction:
    n = len(A)
    if n == 0:
        return Fraction(1)
    M = [list(r) for r in A]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        pv = M[c][c]
        det *= pv
        for r in range(c + 1, n):
            if M[r][c]:
                f = M[r][c] / pv
                row_c = M[c]
                M[r] = [x - f * y for x, y in zip(M[r], row_c)]
    return det


def rank(A: Rows) -> int:
    return len(row_echelon(A)[1])


def row_echelon(A: Rows, pivot_limit: int | None = None) -> tuple[Rows, list[int]]:
    """Reduced row echelon form over Q and the pivot columns.

    With pivot_limit, only the first pivot_limit columns are used as pivots and
    all rows (including those that become zero there) are returned.
    """
    M = [list(r) for r in A]
    if not M:
        return M, []
    m, n = len(M), len(M[0])
    pivots = []
    r = 0
    for c in range(n if pivot_limit is None else pivot_limit):
        piv = next((i for i in range(r, m) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pv = M[r][c]
        if pv != 1:
            M[r] = [x / pv for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    if pivot_limit is not None:
        return M, pivots
    return M[:r], pivots


def kernel_basis(A: Rows, ncols: int | None = None) -> list[Vector]:
    """Basis over K of {x : A x = 0}."""
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    if not A:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    R, piv = row_echelon(A)
    free = [c for c in range(n) if c not in set(piv)]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * n
        v[fcol] = Fraction(1)
        for row, pc in zip(R, piv):
            v[pc] = -row[fcol]
        basis.append(v)
    return basis


def solve_linear(A, b: Sequence):
    """Exact solution of A x = b over K, or ``NO_SOLUTION``.

    A may be a PLocalMatrix or a nested list. Underdetermined systems return
    the solution with free variables set to zero.
    """
    rows = to_rows(A)
    m = len(rows)
    n = len(rows[0]) if rows else 0
    aug = [rows[i] + [frac(b[i])] for i in range(m)]
    R, piv = row_echelon(aug)
    if n in piv:
        return NO_SOLUTION
    x = [Fraction(0)] * n
    for row, pc in zip(R, piv):
        x[pc] = row[n]
    return x


def inverse(A: Rows) -> Rows:
    n = len(A)
    aug = [list(A[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, piv = row_echelon(aug)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroDivisionError("singular matrix")
    return [r[n:] for r in R]


# ---------------------------------------------------------------------------
# Smith normal form over Z_(p)


@dataclass
class SNFResult:
    U: Rows
    D: Rows
    V: Rows
    U_inv: Rows
    valuations: list  # valuations of the nonzero diagonal entries

    @property
    def rank(self) -> int:
        return len(self.valuations)


def _snf(A: Rows, p: int, track: bool = True) -> SNFResult:
    m = len(A)
    n = len(A[0]) if m else 0
    W = [[frac(x) for x in row] for row in A]
    U = identity(m) if track else None
    Ui = identity(m) if track else None
    V = identity(n) if track else None
    vals = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            row = W[i]
            for j in range(t, n):
                x = row[j]
                if x:
                    v = valuation(x, p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        e, i, j = best
        if i != t:
            W[t], W[i] = W[i], W[t]
            if track:
                U[t], U[i] = U[i], U[t]
                for r in Ui:
                    r[t], r[i] = r[i], r[t]
        if j != t:
            for r in W:
                r[t], r[j] = r[j], r[t]
            if track:
                for r in V:
                    r[t], r[j] = r[j], r[t]
        target = Fraction(p) ** e
        u = W[t][t] / target
        if u != 1:
            W[t] = [x / u for x in W[t]]
            if track:
                U[t] = [x / u for x in U[t]]
                for r in Ui:
                    r[t] *= u
        piv = W[t][t]
        rowt = W[t]
        for i2 in range(t + 1, m):
            x = W[i2][t]
            if x:
                f = x / piv
                W[i2] = [a - f * b for a, b in zip(W[i2], rowt)]
                if track:
                    U[i2] = [a - f * b for a, b in zip(U[i2], U[t])]
                    for r in Ui:
                        r[t] += f * r[i2]
        for j2 in range(t + 1, n):
            x = W[t][j2]
            if x:
                f = x / piv
                for r in W:
                    if r[t]:
                        r[j2] -= f * r[t]
                if track:
                    for r in V:
                        if r[t]:
                            r[j2] -= f * r[t]
        vals.append(e)
    return SNFResult(U, W, V, Ui, vals)


def snf(A: PLocalMatrix) -> tuple[PLocalMatrix, PLocalMatrix, PLocalMatrix]:
    """Smith normal form over Z_(p): returns (U, D, V) with U A V = D.

    Pivot = entry of minimal valuation, ties broken by the lexicographically
    smallest position. Nonzero diagonal entries are normalized to p^e.
    """
    res = _snf(A.tolist(), A.p)
    return (PLocalMatrix.of(A.p, res.U), PLocalMatrix.of(A.p, res.D), PLocalMatrix.of(A.p, res.V))


def elementary_divisor_valuations(A: Rows, p: int) -> list:
    """Sorted valuations of the nonzero elementary divisors of A."""
    if not A or not A[0]:
        return []
    return _snf(A, p, track=False).valuations


# ---------------------------------------------------------------------------
# lattices


def lattice_basis(vectors: Sequence[Sequence], n: int, p: int) -> list[Vector]:
    """A Z_(p)-basis of the lattice spanned by the given vectors in K^n."""
    vecs = [v for v in vectors if any(v)]
    if not vecs:
        return []
    res = _snf(columns_to_matrix(vecs, n), p)
    out = []
    for t, e in enumerate(res.valuations):
        s = Fraction(p) ** e
        out.append([row[t] * s for row in res.U_inv])
    return out


def saturate(vectors: Sequence[Sequence], n: int, p: int) -> list[Vector]:
    """Basis of span_K(vectors) ∩ Z_(p)^n."""
    vecs = [v for v in vectors if any(v)]
    if not vecs:
        return []
    res = _snf(columns_to_matrix(vecs, n), p)
    return [[row[t] for row in res.U_inv] for t in range(res.rank)]


def coordinates(basis: Sequence[Sequence], v: Sequence):
    """Coordinates of v in the K-span of the basis, or NO_SOLUTION."""
    n = len(v)
    return solve_linear(columns_to_matrix(basis, n), v)


def coordinates_many(basis: Sequence[Sequence], vectors: Sequence[Sequence]) -> list:
    """Coordinates of several vectors in one elimination; NO_SOLUTION where absent."""
    if not vectors:
        return []
    n = len(vectors[0])
    m = len(basis)
    aug = [[frac(b[i]) for b in basis] + [frac(v[i]) for v in vectors] for i in range(n)]
    R, piv = row_echelon(aug, pivot_limit=m)
    rest = R[len(piv):]
    out = []
    for k in range(len(vectors)):
        col = m + k
        if any(row[col] for row in rest):
            out.append(NO_SOLUTION)
            continue
        x = [Fraction(0)] * m
        for row, pc in zip(R, piv):
            x[pc] = row[col]
        out.append(x)
    return out


def lattice_contains(basis: Sequence[Sequence], v: Sequence, p: int) -> bool:
    c = coordinates(basis, v) if basis else ([] if not any(v) else NO_SOLUTION)
    if c is NO_SOLUTION:
        return False
    return all(is_p_integral(x, p) for x in c)


def lattice_index_valuation(big: Sequence[Sequence], small: Sequence[Sequence], p: int) -> int:
    """v_p [big : small] for full-rank sublattice small ⊆ big of equal rank."""
    if len(big) != len(small):
        raise NotFinite("lattices have different ranks")
    rel = coordinates_many(big, small)
    if any(c is NO_SOLUTION for c in rel):
        raise ValueError("small lattice is not inside the K-span of big")
    pres = FiniteModulePresentation.of(p, len(big), columns_to_matrix(rel, len(big)))
    return fitting_ideal(pres).valuation


def lattices_equal(A: Sequence[Sequence], B: Sequence[Sequence], p: int) -> bool:
    if len(A) != len(B):
        return False
    return all(lattice_contains(A, b, p) for b in B) and all(lattice_contains(B, a, p) for a in A)


# ---------------------------------------------------------------------------
# finite modules


@dataclass(frozen=True)
class FiniteModulePresentation:
    """Z_(p)^generators / (column span of relations)."""

    p: int
    generators: int
    relations: PLocalMatrix = field(compare=False)

    @classmethod
    def of(cls, p: int, generators: int, relations: Rows) -> "FiniteModulePresentation":
        if generators == 0:
            relations = []
        rel = PLocalMatrix.of(p, relations)
        if any(not is_p_integral(x, p) for r in rel.rows for x in r):
            raise ValueError("relation entries must be p-integral")
        return cls(p, generators, rel)

    @classmethod
    def cyclic(cls, p: int, valuations: Sequence[int]) -> "FiniteModulePresentation":
        g = len(valuations)
        rel = [[Fraction(p) ** valuations[i] if i == j else Fraction(0) for j in range(g)] for i in range(g)]
        return cls.of(p, g, rel)

    @cached_property
    def elementary_divisors(self) -> list:
        if self.generators == 0:
            return []
        return elementary_divisor_valuations(self.relations.tolist(), self.p)

    @property
    def is_finite(self) -> bool:
        return len(self.elementary_divisors) == self.generators

    @property
    def length(self) -> int:
        return sum(self.elementary_divisors)

    def invariants(self) -> list:
        """Nontrivial cyclic factors O/p^e, e > 0."""
        return [e for e in self.elementary_divisors if e > 0]


def fitting_ideal(M: FiniteModulePresentation) -> PIdeal:
    if not M.is_finite:
        raise NotFinite(f"free rank {M.generators - len(M.elementary_divisors)} after localization")
    return PIdeal(sum(M.elementary_divisors))
