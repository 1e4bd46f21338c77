"""Numerical Manin periods of a rational weight-2 eigenform.

Closed paths {z0, g z0} with g = (a b; c d) in Gamma0(N) represent integral
homology classes. Taking z0 = (-d + i)/c puts both endpoints at height 1/c,
so the q-series for the integral of f converges geometrically. The periods
Omega+ and Omega- solve Phi(x) = Omega+ psi+(x) + Omega- psi-(x), where psi+-
are the primitive integral eigen-functionals on the cuspidal lattice.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import flint
import mpmath

from ..errors import PrecisionLoss, Unsupported
from . import linalg
from .localize import EigenformData, extend_eigenvalues, good_primes, working_bound
from .space import ModularSymbolSpace


@dataclass
class PeriodResult:
    omega_plus: float  # real
    omega_minus: float  # imaginary part of the minus period
    residual: float
    terms: int
    paths: int
    min_height: float

    def to_json(self) -> dict:
        return {
            "omega_plus": float(self.omega_plus),
            "omega_minus_over_i": float(self.omega_minus),
            "residual": float(self.residual),
            "terms": self.terms,
            "paths": self.paths,
            "min_height": float(self.min_height),
        }


def eigen_functionals(S: ModularSymbolSpace, f: EigenformData):
    """Primitive integral row vectors psi+ and psi- on the cuspidal lattice."""
    r = S.cuspidal_dimension
    out = []
    for sign in (1, -1):
        blocks = [linalg.to_q(S.star_involution).transpose() - linalg.identity_q(r) * sign]
        for l in good_primes(S.N, working_bound(S.N, S.k)):
            blocks.append(linalg.to_q(S.hecke_operator(l)).transpose() - linalg.identity_q(r) * f.eigenvalues[l])
        K = linalg.kernel_columns(linalg.vstack(*blocks))
        if K.ncols() != 1:
            raise Unsupported("eigen-functional space is not one-dimensional")
        vec = [Fraction(int(K[i, 0].p), int(K[i, 0].q)) for i in range(r)]
        den = 1
        for x in vec:
            den = den * x.denominator // gcd(den, x.denominator)
        ints = [int(x * den) for x in vec]
        g = 0
        for x in ints:
            g = gcd(g, x)
        out.append([x // g for x in ints])
    return out[0], out[1]


def _cuspidal_coordinates(S: ModularSymbolSpace, combo: dict):
    v = S.vector_of(combo)
    vl = S.lattice_inverse * v
    X = linalg.solve_columns(S.cuspidal_basis, vl)
    return [Fraction(int(X[i, 0].p), int(X[i, 0].q)) for i in range(X.nrows())]


def closed_paths(S: ModularSymbolSpace, max_multiple: int = 6):
    """Yield (gamma, cuspidal coordinates of {0, gamma 0}) for gamma with c = N m."""
    N = S.N
    for m in range(1, max_multiple + 1):
        c = N * m
        for d in range(1, c):
            if gcd(c, d) != 1:
                continue
            # a d - b c = 1
            a = pow(d, -1, c)
            b = (a * d - 1) // c
            combo = S.path_combo([1], (0, 1), (b, d))
            yield (a, b, c, d), _cuspidal_coordinates(S, combo)


def _integral(coeffs, z0, z1):
    """Integral of sum a_n q^n dz from z0 to z1 (both in the upper half-plane)."""
    two_pi_i = 2j * mpmath.pi
    q0 = mpmath.exp(two_pi_i * z0)
    q1 = mpmath.exp(two_pi_i * z1)
    total = mpmath.mpc(0)
    p0, p1 = mpmath.mpc(1), mpmath.mpc(1)
    for n in range(1, len(coeffs)):
        p0 *= q0
        p1 *= q1
        if coeffs[n]:
            total += coeffs[n] * (p1 - p0) / n
    return total / two_pi_i


def manin_periods(S: ModularSymbolSpace, f: EigenformData, precision: float = 1e-12, max_paths: int = 12) -> PeriodResult:
    """Omega+- normalized by the primitive integral eigen-functionals."""
    if S.k != 2:
        raise Unsupported("period integration is implemented in weight 2 only", "weight two")
    psi_p, psi_m = eigen_functionals(S, f)
    rows, values = [], []
    min_height = None
    terms = 0
    with mpmath.workdps(30):
        for (a, b, c, d), x in closed_paths(S):
            pp = sum((u * v for u, v in zip(psi_p, x)), Fraction(0))
            pm = sum((u * v for u, v in zip(psi_m, x)), Fraction(0))
            if pp == 0 and pm == 0:
                continue
            height = 1.0 / c
            n = int((mpmath.log(10 / precision) / (2 * mpmath.pi * height))) + 10
            if n > terms:
                extend_eigenvalues(S, f, n)
                coeffs = f.coefficients(n)
                terms = n
            z0 = mpmath.mpc(-d, 1) / c
            z1 = mpmath.mpc(a, 1) / c
            values.append(_integral(coeffs, z0, z1))
            rows.append((pp, pm))
            min_height = height if min_height is None else min(min_height, height)
            if len(rows) >= max_paths and _has_rank_two(rows):
                break
        if not _has_rank_two(rows):
            raise PrecisionLoss("closed paths do not detect both eigen-functionals")
        A = mpmath.matrix([[float(u), float(v)] for u, v in rows])
        y = mpmath.matrix(values)
        # least squares through the normal equations (2 x 2)
        AtA = A.T * A
        sol = mpmath.lu_solve(AtA, A.T * y)
        resid = max(abs(values[i] - sol[0] * float(rows[i][0]) - sol[1] * float(rows[i][1])) for i in range(len(rows)))
        scale = max(abs(v) for v in values)
        omega_p, omega_m = sol[0], sol[1]
        if resid > precision * max(1.0, float(scale)) * 100:
            raise PrecisionLoss(f"period fit residual {float(resid):.3e} exceeds tolerance")
        return PeriodResult(
            float(mpmath.re(omega_p)),
            float(mpmath.im(omega_m)),
            float(resid),
            terms,
            len(rows),
            float(min_height),
        )


def _has_rank_two(rows) -> bool:
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            if rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0] != 0:
                return True
    return False
