"""The projective line over Z/NZ and the matrix sets used for Hecke operators."""
from __future__ import annotations

from math import gcd


def xgcd(a: int, b: int):
    """Return (x, y, g) with a*x + b*y == g == gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -x0, -y0, -a
    return x0, y0, a


class P1:
    """Representatives of P^1(Z/NZ) with a dense lookup table.

    Every representative (c, d) is a pair of coprime integers, so it lifts
    directly to a matrix in SL2(Z).
    """

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("level must be positive")
        self.N = N
        table = [-1] * (N * N)
        reps = []
        units = [t for t in range(1, N + 1) if gcd(t, N) == 1] if N > 1 else [1]
        for u in range(N):
            for v in range(N):
                if table[u * N + v] >= 0 or gcd(gcd(u, v), N) != 1:
                    continue
                orbit = {((t * u) % N, (t * v) % N) for t in units}
                idx = len(reps)
                for a, b in orbit:
                    table[a * N + b] = idx
                reps.append(self._coprime_lift(min(orbit, key=lambda ab: (gcd(ab[0], ab[1]) != 1, ab))))
        if N == 1:
            reps = [(0, 1)]
            table = [0]
        self.reps = reps
        self._table = table

    def _coprime_lift(self, pair):
        c, d = pair
        N = self.N
        if c == 0:
            # d is a unit, so the orbit minimum is (0, 1)
            return 0, 1
        t = 0
        while gcd(c, d + t * N) != 1:
            t += 1
        return c, d + t * N

    def __len__(self):
        return len(self.reps)

    def index(self, c: int, d: int) -> int:
        """Index of the class of (c : d), or -1 when gcd(c, d, N) > 1."""
        N = self.N
        return self._table[(c % N) * N + (d % N)]


def merel_matrices(n: int):
    """Merel's set of integer matrices (a b; c d) of determinant n used for T_n."""
    out = []
    for a in range(1, n + 1):
        for d in range((n + a - 1) // a, n + 2 - a):
            bc = a * d - n
            if bc == 0:
                out.extend((a, b, 0, d) for b in range(a))
                out.extend((a, 0, c, d) for c in range(1, d))
            else:
                for b in range((bc - 1) // (d - 1) + 1, a):
                    if bc % b == 0:
                        out.append((a, b, bc // b, d))
    return out


def heilbronn_cremona(ell: int):
    """Cremona's Heilbronn matrices for a prime ell (valid for ell not dividing the level)."""
    out = [(1, 0, 0, ell)]
    if ell == 2:
        return out + [(2, 0, 0, 1), (2, 1, 0, 1), (1, 0, 1, 2)]
    half = ell // 2
    for r in range(-half, half + 1):
        x1, x2, y1, y2 = ell, -r, 0, 1
        a, b = -ell, r
        out.append((x1, x2, y1, y2))
        while b != 0:
            q = _nearest(a, b)
            a, b = -b, a - b * q
            x1, x2 = x2, q * x2 - x1
            y1, y2 = y2, q * y2 - y1
            out.append((x1, x2, y1, y2))
    return out


def _nearest(a: int, b: int) -> int:
    # a/b rounded to the nearest integer, halves away from zero
    num, den = abs(a), abs(b)
    q = (2 * num + den) // (2 * den)
    return q if (a < 0) == (b < 0) else -q


def continued_fraction_matrices(num: int, den: int):
    """Matrices g_j in SL2(Z) with {oo, num/den} = sum_j g_j{0, oo}."""
    if den < 0:
        num, den = -num, -den
    out = []
    p_prev, q_prev = 1, 0  # p_{-1}/q_{-1} = oo
    p_prev2, q_prev2 = 0, 1
    a, b = num, den
    j = 0
    while b != 0:
        q, r = divmod(a, b)
        p_cur = q * p_prev + p_prev2
        q_cur = q * q_prev + q_prev2
        s = -1 if j % 2 == 0 else 1  # (-1)^(j-1)
        out.append((p_cur, s * p_prev, q_cur, s * q_prev))
        p_prev2, q_prev2, p_prev, q_prev = p_prev, q_prev, p_cur, q_cur
        a, b = b, r
        j += 1
    return out
