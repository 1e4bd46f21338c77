"""Independent q-expansion oracles and the q-expansion cache.

Nothing here touches modular symbols: dimensions come from the classical
genus/elliptic-point formula and coefficients from eta products, so these
functions can cross-check the modular-symbol engine.
"""
from __future__ import annotations

import json
import os
from math import gcd

from .dvr import INF, valuation


def prime_factors(n: int) -> list:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def primes_up_to(n: int) -> list:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i in range(n + 1) if sieve[i]]


def is_squarefree(n: int) -> bool:
    return all((n // q) % q for q in prime_factors(n))


def gamma0_index(N: int) -> int:
    """[SL2(Z) : Gamma0(N)] = N prod_{q | N} (1 + 1/q)."""
    out = N
    for q in prime_factors(N):
        out = out // q * (q + 1)
    return out


def _kronecker_minus(d: int, q: int) -> int:
    # Legendre symbol (-d / q) for d in {1, 3}, q prime
    if q == 2:
        return 0 if d == 1 else -1
    if q == 3 and d == 3:
        return 0
    v = pow((-d) % q, (q - 1) // 2, q)
    return 1 if v == 1 else -1


def _euler_phi(n: int) -> int:
    out = n
    for q in prime_factors(n):
        out = out // q * (q - 1)
    return out


def cusp_count(N: int) -> int:
    return sum(_euler_phi(gcd(d, N // d)) for d in range(1, N + 1) if N % d == 0)


def elliptic_counts(N: int):
    """Numbers of elliptic points of order 2 and 3 on X0(N)."""
    e2 = 0 if N % 4 == 0 else 1
    e3 = 0 if N % 9 == 0 else 1
    for q in prime_factors(N):
        if e2:
            e2 *= 1 + _kronecker_minus(1, q)
        if e3:
            e3 *= 1 + _kronecker_minus(3, q)
    return e2, e3


def dim_cusp_forms(N: int, k: int) -> int:
    """dim S_k(Gamma0(N)) for even k >= 2 from the genus formula."""
    if k < 2 or k % 2:
        raise ValueError("even weight >= 2 required")
    mu = gamma0_index(N)
    e2, e3 = elliptic_counts(N)
    c = cusp_count(N)
    twelve_genus = 12 + mu - 3 * e2 - 4 * e3 - 6 * c  # 12 * genus
    genus = twelve_genus // 12
    if k == 2:
        return genus
    return (k - 1) * (genus - 1) + (k // 2 - 1) * c + e2 * (k // 4) + e3 * (k // 3)


def sturm_bound(N: int, k: int) -> int:
    """k [SL2(Z) : Gamma0(N)] / 12, rounded up."""
    return -(-k * gamma0_index(N) // 12)


def _series_mul(a, b, prec):
    out = [0] * prec
    for i, x in enumerate(a):
        if x:
            for j in range(prec - i):
                if b[j]:
                    out[i + j] += x * b[j]
    return out


def eta_product(exponents: dict, prec: int) -> list:
    """Coefficients a_0..a_{prec-1} of prod_m eta(m z)^{r_m} (integral q-shift required)."""
    shift24 = sum(m * r for m, r in exponents.items())
    if shift24 % 24:
        raise ValueError("eta product has a fractional leading exponent")
    shift = shift24 // 24
    body = prec - shift
    series = [1] + [0] * (max(body, 1) - 1)
    for m, r in exponents.items():
        # prod_n (1 - q^{mn})^r, truncated
        factor = [1] + [0] * (len(series) - 1)
        for n in range(1, (len(series) - 1) // m + 1):
            poly = [0] * len(series)
            for j in range(abs(r) + 1):
                e = m * n * j
                if e >= len(series):
                    break
                poly[e] = (-1) ** j * _binom(abs(r), j)
            if r < 0:
                poly = _series_inverse(poly)
            factor = _series_mul(factor, poly, len(series))
        series = _series_mul(series, factor, len(series))
    return [0] * shift + series[: prec - shift]


def _binom(n, j):
    from math import comb

    return comb(n, j)


def _series_inverse(a):
    out = [0] * len(a)
    out[0] = 1
    for n in range(1, len(a)):
        out[n] = -sum(a[i] * out[n - i] for i in range(1, n + 1))
    return out


def delta_coefficients(prec: int) -> list:
    """Ramanujan's Delta = eta(z)^24."""
    return eta_product({1: 24}, prec)


ETA_NEWFORMS = {
    # level -> eta-product exponents of the unique rational weight-2 newform
    11: {1: 2, 11: 2},
    14: {1: 1, 2: 1, 7: 1, 14: 1},
    15: {1: 1, 3: 1, 5: 1, 15: 1},
    20: {2: 2, 10: 2},
    24: {2: 1, 4: 1, 6: 1, 12: 1},
    27: {3: 2, 9: 2},
    32: {4: 2, 8: 2},
    36: {6: 4},
}


def newform_coefficients(level: int, prec: int) -> list:
    """q-expansion of the eta-product newform at one of the levels in ETA_NEWFORMS."""
    return eta_product(ETA_NEWFORMS[level], prec)


def congruence_valuation(a_f: dict, a_g: dict, p: int, primes) -> float:
    """Largest e with a_l(f) = a_l(g) mod p^e for every l in primes (inf if all equal)."""
    return min((valuation(a_f[l] - a_g[l], p) for l in primes), default=INF)


def is_eisenstein_mod(eigenvalues: dict, p: int, k: int, primes) -> bool:
    """True when a_l = 1 + l^(k-1) mod p for every l in primes."""
    return all((eigenvalues[l] - 1 - pow(l, k - 1, p)) % p == 0 for l in primes)


class QExpansionCache:
    """JSON-lines store of {level, weight, label, a_n} records."""

    def __init__(self, path=None):
        self.path = os.environ.get("CONGRUA_CACHE") or path
        self._records = {}
        if self.path and os.path.exists(self.path):
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        rec = json.loads(line)
                        self._records[(rec["level"], rec["weight"], rec["label"])] = rec["a_n"]

    def get(self, level: int, weight: int, label: str, length: int = 0):
        a = self._records.get((level, weight, label))
        if a is None or len(a) < length:
            return None
        return a

    def put(self, level: int, weight: int, label: str, a_n: list):
        key = (level, weight, label)
        old = self._records.get(key)
        if old is not None and len(old) >= len(a_n):
            return
        self._records[key] = [int(x) for x in a_n]
        if self.path:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps({"level": level, "weight": weight, "label": label, "a_n": self._records[key]}) + "\n")

    def __len__(self):
        return len(self._records)
