"""Weight-k Manin symbols for Gamma0(N).

A Manin symbol (i, c, d) stands for X^i Y^(k-2-i) [c : d]. The space is the
quotient of the free module on symbols by the two- and three-term relations;
we keep the integral lattice spanned by symbol images and the cuspidal
sublattice (kernel of the boundary map) as Z-bases in that lattice.
"""
from __future__ import annotations

from functools import cached_property, lru_cache
from math import comb

import flint

from ..errors import Unsupported
from . import linalg
from .p1 import P1, continued_fraction_matrices, heilbronn_cremona, merel_matrices, xgcd


@lru_cache(maxsize=None)
def _binomial_row(n: int, a: int, b: int):
    # coefficients of X^j Y^(n-j) in (aX + bY)^n
    return tuple(comb(n, j) * a**j * b ** (n - j) for j in range(n + 1))


@lru_cache(maxsize=200_000)
def transformed_monomial(i: int, w: int, a: int, b: int, c: int, d: int):
    """Coefficients of X^j Y^(w-j) in (aX + bY)^i (cX + dY)^(w-i)."""
    left = _binomial_row(i, a, b)
    right = _binomial_row(w - i, c, d)
    out = [0] * (w + 1)
    for s, x in enumerate(left):
        if x:
            for t, y in enumerate(right):
                out[s + t] += x * y
    return tuple(out)


class ModularSymbolSpace:
    """Modular symbols of even weight k >= 2 for Gamma0(N), with integral structure."""

    def __init__(self, N: int, k: int):
        if N < 1 or k < 2 or k % 2:
            raise ValueError("need N >= 1 and even k >= 2")
        self.N = N
        self.k = k
        self.p1 = P1(N)
        self.n_p1 = len(self.p1)
        self.n_symbols = (k - 1) * self.n_p1
        self._build_quotient()

    # -- symbols -------------------------------------------------------------
    def symbol_index(self, i: int, c: int, d: int) -> int:
        j = self.p1.index(c, d)
        return -1 if j < 0 else i * self.n_p1 + j

    def symbol(self, s: int):
        i, j = divmod(s, self.n_p1)
        c, d = self.p1.reps[j]
        return i, c, d

    def _build_quotient(self):
        k, n = self.k, self.n_symbols
        w = k - 2
        # two-term relations x_s + (-1)^i x_{sigma s} = 0
        rep = [None] * n  # (representative symbol, coefficient)
        for s in range(n):
            if rep[s] is not None:
                continue
            i, c, d = self.symbol(s)
            t = self.symbol_index(w - i, d, -c)
            eps = -1 if i % 2 else 1
            if t == s:
                rep[s] = (s, 1) if eps == -1 else (s, 0)
            else:
                rep[s] = (s, 1)
                rep[t] = (s, -eps)
        reps = sorted({r for r, c in rep if c != 0})
        rep_pos = {r: t for t, r in enumerate(reps)}

        # three-term relations, written in the representatives
        rows = set()
        for s in range(n):
            i, c, d = self.symbol(s)
            row = {}

            def add(sym, coeff):
                r, e = rep[sym]
                if e and coeff:
                    key = rep_pos[r]
                    row[key] = row.get(key, 0) + e * coeff

            add(s, 1)
            for j in range(w - i + 1):
                add(self.symbol_index(j, d, -c - d), (-1) ** (w + j) * comb(w - i, j))
            for j in range(i + 1):
                add(self.symbol_index(w - i + j, -c - d, c), (-1) ** (w - i + j) * comb(i, j))
            row = tuple(sorted((key, v) for key, v in row.items() if v))
            if row:
                rows.add(row)
        rows = sorted(rows)
        m = len(reps)
        if rows:
            R = flint.fmpq_mat(len(rows), m)
            for r, row in enumerate(rows):
                for key, v in row:
                    R[r, key] = v
            R, rank, pivots = linalg.rref_pivots(R)
        else:
            rank, pivots = 0, []
        pivot_set = set(pivots)
        free_pos = [t for t in range(m) if t not in pivot_set]
        self.free = [reps[t] for t in free_pos]
        self.dim = len(self.free)
        where = {t: f for f, t in enumerate(free_pos)}
        rep_image = {}
        for t in free_pos:
            rep_image[reps[t]] = {where[t]: flint.fmpq(1)}
        if rank:
            Rl = R.tolist()
            for row_i, pc in enumerate(pivots):
                img = {}
                for t in free_pos:
                    x = Rl[row_i][t]
                    if x != 0:
                        img[where[t]] = -x
                rep_image[reps[pc]] = img
        images = []
        for s in range(n):
            r, e = rep[s]
            if e == 0 or not rep_image[r]:
                images.append({})
            else:
                images.append({f: e * x for f, x in rep_image[r].items()})
        self._images = images

    def vector_of(self, combo: dict) -> flint.fmpq_mat:
        """Free-basis column vector of an integer combination {symbol: coeff}."""
        v = flint.fmpq_mat(self.dim, 1)
        for s, a in combo.items():
            if a:
                for f, x in self._images[s].items():
                    v[f, 0] += a * x
        return v

    def _matrix_from(self, fn) -> flint.fmpq_mat:
        """Free-basis matrix of the linear map sending free generator s to fn(s)."""
        M = flint.fmpq_mat(self.dim, self.dim)
        for col, s in enumerate(self.free):
            combo = fn(s)
            for t, a in combo.items():
                if a:
                    for f, x in self._images[t].items():
                        M[f, col] += a * x
        return M

    def act(self, s: int, mats, combo=None, scale=1) -> dict:
        """Sum over g in mats of the right action of g on symbol s."""
        combo = {} if combo is None else combo
        i, c, d = self.symbol(s)
        w = self.k - 2
        for a, b, cc, dd in mats:
            t0 = self.p1.index(a * c + cc * d, b * c + dd * d)
            if t0 < 0:
                continue
            coeffs = transformed_monomial(i, w, a, b, cc, dd)
            for j, x in enumerate(coeffs):
                if x:
                    t = j * self.n_p1 + t0
                    combo[t] = combo.get(t, 0) + scale * x
        return combo

    # -- integral structure --------------------------------------------------
    @cached_property
    def lattice_basis(self) -> flint.fmpq_mat:
        """Columns: a Z-basis of the lattice spanned by all symbol images (free coords)."""
        den = 1
        for img in self._images:
            for x in img.values():
                den = den * int(x.q) // linalg._gcd(den, int(x.q))
        rows = []
        seen = set()
        for img in self._images:
            key = tuple(sorted(img.items()))
            if not img or key in seen:
                continue
            seen.add(key)
            row = [0] * self.dim
            for f, x in img.items():
                row[f] = int(x * den)
            rows.append(row)
        if self.dim == 0:
            return flint.fmpq_mat(0, 0)
        H = flint.fmpz_mat(rows).hnf()
        basis = [r for r in H.tolist() if any(x != 0 for x in r)]
        B = flint.fmpq_mat(flint.fmpz_mat(basis).transpose()) / den
        return B

    @cached_property
    def lattice_inverse(self) -> flint.fmpq_mat:
        return self.lattice_basis.inv()

    def to_lattice(self, M_free: flint.fmpq_mat) -> flint.fmpq_mat:
        return self.lattice_inverse * M_free * self.lattice_basis

    @cached_property
    def cusps(self) -> list:
        out = []
        self._boundary_cols = []
        w = self.k - 2
        for s in self.free:
            i, c, d = self.symbol(s)
            a, b, g = xgcd(d, -c)
            assert g == 1
            col = {}
            if i == w:
                j = self._cusp_index(out, a, c)
                col[j] = col.get(j, 0) + 1
            if i == 0:
                j = self._cusp_index(out, b, d)
                col[j] = col.get(j, 0) - 1
            self._boundary_cols.append(col)
        return out

    def _cusp_index(self, cusps, u, v):
        N = self.N
        for j, (u2, v2) in enumerate(cusps):
            s1 = xgcd(u, v)[0]
            s2 = xgcd(u2, v2)[0]
            if (s1 * v2 - s2 * v) % linalg._gcd(N, (v * v2) % N if N > 1 else 1) == 0:
                return j
        cusps.append((u, v))
        return len(cusps) - 1

    @cached_property
    def boundary_matrix(self) -> flint.fmpq_mat:
        """Boundary map in free coordinates (rows indexed by cusps)."""
        cusps = self.cusps
        B = flint.fmpq_mat(len(cusps), self.dim)
        for col, entries in enumerate(self._boundary_cols):
            for j, v in entries.items():
                B[j, col] = v
        return B

    @cached_property
    def cuspidal_basis(self) -> flint.fmpq_mat:
        """Columns: Z-basis of the cuspidal lattice, in lattice coordinates."""
        if self.dim == 0:
            return flint.fmpq_mat(0, 0)
        Bd = self.boundary_matrix * self.lattice_basis
        num, _ = Bd.numer_denom()
        K = linalg.integer_kernel(num)
        return flint.fmpq_mat(K.transpose())

    @property
    def cuspidal_dimension(self) -> int:
        """Rank of the kernel of the boundary map (no lattice computation needed)."""
        if self.dim == 0:
            return 0
        return self.dim - self.boundary_matrix.rank()

    def restrict_to_cuspidal(self, M_free: flint.fmpq_mat) -> flint.fmpz_mat:
        """Matrix on the cuspidal lattice basis of an operator given in free coords."""
        C = self.cuspidal_basis
        if C.ncols() == 0:
            return flint.fmpz_mat(0, 0)
        ML = self.to_lattice(M_free)
        X = linalg.solve_columns(C, ML * C)
        return linalg.as_integral(X)

    def cuspidal_to_free(self) -> flint.fmpq_mat:
        return self.lattice_basis * self.cuspidal_basis

    # -- operators -----------------------------------------------------------
    def hecke_free(self, n: int) -> flint.fmpq_mat:
        cache = self.__dict__.setdefault("_hecke_cache", {})
        if n not in cache:
            mats = heilbronn_cremona(n) if _is_prime(n) and self.N % n else merel_matrices(n)
            cache[n] = self._matrix_from(lambda s: self.act(s, mats))
        return cache[n]

    def hecke_operator(self, ell: int) -> flint.fmpz_mat:
        """T_ell (or U_ell when ell divides N) on the cuspidal lattice."""
        cache = self.__dict__.setdefault("_hecke_cusp_cache", {})
        if ell not in cache:
            cache[ell] = self.restrict_to_cuspidal(self.hecke_free(ell))
        return cache[ell]

    def hecke_on_symbol(self, s: int, n: int) -> dict:
        mats = heilbronn_cremona(n) if _is_prime(n) and self.N % n else merel_matrices(n)
        return self.act(s, mats)

    @cached_property
    def star_free(self) -> flint.fmpq_mat:
        def star(s):
            i, c, d = self.symbol(s)
            return {self.symbol_index(i, -c, d): -1 if i % 2 == 0 else 1}

        return self._matrix_from(star)

    @cached_property
    def star_involution(self) -> flint.fmpz_mat:
        return self.restrict_to_cuspidal(self.star_free)

    def path_combo(self, poly, alpha, beta, combo=None, scale=1) -> dict:
        """Symbols of P{alpha, beta}; cusps are (num, den) pairs, den = 0 for oo.

        ``poly`` lists the coefficients of X^i Y^(k-2-i).
        """
        combo = {} if combo is None else combo
        for cusp, sign in ((beta, scale), (alpha, -scale)):
            num, den = cusp
            if den == 0:
                continue
            for a, b, c, d in continued_fraction_matrices(num, den):
                t0 = self.p1.index(c, d)
                w = self.k - 2
                for i, q in enumerate(poly):
                    if not q:
                        continue
                    coeffs = transformed_monomial(i, w, a, b, c, d)
                    for j, x in enumerate(coeffs):
                        if x:
                            t = j * self.n_p1 + t0
                            combo[t] = combo.get(t, 0) + sign * q * x
        return combo

    @cached_property
    def atkin_lehner_free(self) -> flint.fmpq_mat:
        if self.k != 2:
            raise Unsupported("the Atkin-Lehner involution is implemented in weight 2 only", "weight two")
        N = self.N

        def image(num, den):
            # W z = -1/(N z)
            if den == 0:
                return (0, 1)
            if num == 0:
                return (1, 0)
            return (-den, N * num)

        def fn(s):
            _, c, d = self.symbol(s)
            a, b, _ = xgcd(d, -c)
            return self.path_combo([1], image(b, d), image(a, c))

        return self._matrix_from(fn)

    @cached_property
    def atkin_lehner(self) -> flint.fmpz_mat:
        return self.restrict_to_cuspidal(self.atkin_lehner_free)

    @cached_property
    def intersection_matrix(self) -> flint.fmpz_mat:
        """Intersection pairing on the cuspidal lattice basis (weight 2)."""
        if self.k != 2:
            raise Unsupported("the intersection pairing is implemented in weight 2 only", "weight two")
        C = linalg.to_fractions(self.cuspidal_to_free().transpose())  # rows: basis vectors
        r = len(C)
        coeff = []
        for vec in C:
            a = [0] * self.n_p1
            for f, s in enumerate(self.free):
                a[s] = vec[f]
            coeff.append(a)
        p1 = self.p1
        seen = [False] * self.n_p1
        gram = [[0] * r for _ in range(r)]
        sigma = [p1.index(d, -c) for c, d in p1.reps]
        for start in range(self.n_p1):
            if seen[start]:
                continue
            cycle = []
            j = start
            while not seen[j]:
                seen[j] = True
                cycle.append(j)
                c, d = p1.reps[j]
                j = p1.index(c, c + d)
            flows = [[a[s] - a[sigma[s]] for s in cycle] for a in coeff]
            for x in range(r):
                fx = flows[x]
                for y in range(x + 1, r):
                    fy = flows[y]
                    total, before = 0, 0
                    after = sum(fy)
                    for i in range(len(cycle)):
                        after -= fy[i]
                        total += fx[i] * (after - before)
                        before += fy[i]
                    gram[x][y] += total
        out = flint.fmpz_mat(r, r)
        for x in range(r):
            for y in range(x + 1, r):
                v = gram[x][y] / 2
                if v.denominator != 1:
                    raise ValueError("intersection numbers must be integral")
                out[x, y] = int(v)
                out[y, x] = -int(v)
        return out

    @cached_property
    def twisted_pairing(self) -> flint.fmpz_mat:
        """Gram matrix of [x, y] = <x, W_N y> on the cuspidal lattice basis."""
        return self.intersection_matrix * self.atkin_lehner


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


_SPACES: dict = {}


def build_space(N: int, k: int) -> ModularSymbolSpace:
    """Construct (and memoize) the modular symbol space of level N and weight k."""
    key = (N, k)
    if key not in _SPACES:
        _SPACES[key] = ModularSymbolSpace(N, k)
    return _SPACES[key]
