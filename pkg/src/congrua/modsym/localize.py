"""Rational eigenforms, the localized Hecke algebra and the two congruence numbers.

The Hecke algebra here is generated by the T_l with l prime to the level.
Localizing at the maximal ideal of a rational eigenform f means cutting out,
inside the plus and minus cuspidal lattices, the generalized eigenspace of
every eigensystem congruent to f modulo p.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd

import flint

from .. import dvr, serialize
from ..dvr import PIdeal, valuation
from ..errors import BlockNotFound, EisensteinIdeal, HypothesisViolation, PairingDegenerate, Unsupported
from ..finalg import AlgebraModule, Character, FiniteFlatAlgebra, PerfectPairing, duality_transfer, eta
from ..qexp import congruence_valuation, is_eisenstein_mod, primes_up_to, sturm_bound
from . import linalg
from .space import ModularSymbolSpace

MIN_PRIME_BOUND = 30


def working_bound(N: int, k: int) -> int:
    """Largest prime used for eigensystem comparisons: the Sturm bound, but at least 30."""
    return max(sturm_bound(N, k), MIN_PRIME_BOUND)


def good_primes(N: int, bound: int) -> list:
    return [l for l in primes_up_to(bound) if N % l]


# ---------------------------------------------------------------------------
# sublattices and restricted operators


def sign_lattice(S: ModularSymbolSpace, sign: int) -> flint.fmpz_mat:
    """Rows: Z-basis of the cuspidal lattice vectors fixed by sign * star."""
    r = S.cuspidal_dimension
    A = linalg.to_q(S.star_involution) - linalg.identity_q(r) * sign
    K = linalg.kernel_columns(A)
    return linalg.saturate_rows(K.transpose())


def restrict(op: flint.fmpz_mat, rows: flint.fmpz_mat) -> flint.fmpq_mat:
    """Matrix of op (acting on column vectors) on the span of the given rows."""
    B = linalg.to_q(rows.transpose())
    return linalg.solve_columns(B, linalg.to_q(op) * B)


def restrict_q(op: flint.fmpq_mat, basis: flint.fmpq_mat) -> flint.fmpq_mat:
    return linalg.solve_columns(basis, op * basis)


def _primitive(vec) -> list:
    vec = [Fraction(x) for x in vec]
    den = 1
    for x in vec:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    for x in ints:
        if x:
            return ints if x > 0 else [-y for y in ints]
    return ints


def _eigenvalue(op, vec) -> Fraction:
    """Scalar a with op vec = a vec (raises if vec is not an eigenvector)."""
    image = [sum((Fraction(int(op[i, j])) * vec[j] for j in range(len(vec))), Fraction(0)) for i in range(len(vec))]
    j = next(i for i, x in enumerate(vec) if x)
    a = image[j] / vec[j]
    if any(image[i] != a * vec[i] for i in range(len(vec))):
        raise ValueError("vector is not an eigenvector")
    return a


# ---------------------------------------------------------------------------
# eigenforms


@dataclass
class EigenformData:
    """A rational Hecke eigenform found in the cuspidal modular symbols."""

    level: int
    weight: int
    eigenvalues: dict  # prime -> int, including U_l eigenvalues for l | N
    plus: list  # primitive integer vector in cuspidal coordinates
    minus: list
    label: str = ""
    newform: bool = True

    def residual(self, p: int) -> dict:
        return {l: a % p for l, a in sorted(self.eigenvalues.items())}

    def is_eisenstein(self, p: int, bound: int | None = None) -> bool:
        bound = working_bound(self.level, self.weight) if bound is None else bound
        return is_eisenstein_mod(self.eigenvalues, p, self.weight, good_primes(self.level, bound))

    def ramanujan_ok(self, tol: float = 1e-9) -> bool:
        k = self.weight
        return all(abs(a) <= 2 * l ** ((k - 1) / 2) + tol for l, a in self.eigenvalues.items() if self.level % l)

    def coefficients(self, n: int) -> list:
        """a_0 .. a_n from the prime eigenvalues via the Hecke recursion."""
        k, N = self.weight, self.level
        a = [0] * (n + 1)
        if n >= 1:
            a[1] = 1
        for l in primes_up_to(n):
            if l not in self.eigenvalues:
                raise KeyError(f"eigenvalue at {l} not computed")
        powers = {}
        for l in primes_up_to(n):
            seq = [1, self.eigenvalues[l]]
            q = l
            while q * l <= n:
                nxt = self.eigenvalues[l] * seq[-1] - (0 if N % l == 0 else l ** (k - 1) * seq[-2])
                seq.append(nxt)
                q *= l
            powers[l] = seq
        # multiplicativity through a smallest-prime-factor sieve
        spf = list(range(n + 1))
        for i in range(2, int(n**0.5) + 1):
            if spf[i] == i:
                for j in range(i * i, n + 1, i):
                    if spf[j] == j:
                        spf[j] = i
        for m in range(2, n + 1):
            l = spf[m]
            e, rest = 0, m
            while rest % l == 0:
                rest //= l
                e += 1
            a[m] = powers[l][e] * a[rest]
        return a

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "weight": self.weight,
            "label": self.label,
            "eigenvalues": {str(l): a for l, a in sorted(self.eigenvalues.items())},
        }


def _joint_eigenspaces(ops: dict, dim: int):
    """Split Q^dim into joint rational eigenspaces of commuting operators.

    Returns (pieces, irrational_dim) with pieces a list of (basis columns,
    eigenvalue dict); irrational_dim counts dimensions with a non-rational
    eigenvalue somewhere.
    """
    pieces = [(linalg.identity_q(dim), {})]
    lost = 0
    for l, op in ops.items():
        new = []
        for V, eig in pieces:
            A = restrict_q(op, V)
            for F, e in linalg.factor_charpoly(A):
                if F.degree() != 1:
                    lost += F.degree() * e
                    continue
                a = Fraction(-int(F.coeffs()[0]), int(F.coeffs()[1]))
                K = linalg.kernel_columns(A - linalg.identity_q(A.nrows()) * flint.fmpq(a.numerator, a.denominator))
                new.append((V * K, {**eig, l: a}))
        pieces = new
    return pieces, lost


def rational_eigenforms(S: ModularSymbolSpace, include_old: bool = False) -> list:
    """Rational eigensystems of the T_l (l prime to N) on the cuspidal plus space.

    One-dimensional joint eigenspaces are newforms; larger ones are oldforms
    (returned only with include_old).
    """
    N, k = S.N, S.k
    if S.cuspidal_dimension == 0:
        return []
    P = sign_lattice(S, 1)
    M = sign_lattice(S, -1)
    primes = good_primes(N, working_bound(N, k))
    ops_plus = {l: restrict(S.hecke_operator(l), P) for l in primes}
    ops_minus = {l: restrict(S.hecke_operator(l), M) for l in primes}
    pieces, _ = _joint_eigenspaces(ops_plus, P.nrows())
    out = []
    for V, eig in pieces:
        if V.ncols() != 1 and not include_old:
            continue
        plus = None
        minus = None
        if V.ncols() == 1:
            vp = [x for x in linalg.to_fractions(V.transpose())[0]]
            plus = _primitive(_to_cusp(vp, P))
            Km = _common_kernel(ops_minus, eig, M.nrows())
            if Km.ncols() != 1:
                raise BlockNotFound("minus eigenspace of a newform is not one-dimensional")
            minus = _primitive(_to_cusp(linalg.to_fractions(Km.transpose())[0], M))
        ints = {l: int(a) for l, a in eig.items() if a.denominator == 1}
        if len(ints) != len(eig):
            raise ValueError("eigenvalues of integral operators must be integers")
        f = EigenformData(N, k, ints, plus, minus, newform=V.ncols() == 1)
        if f.newform:
            for q in sorted(set(_prime_divisors(N))):
                f.eigenvalues[q] = int(_eigenvalue(S.hecke_operator(q), [Fraction(x) for x in plus]))
        out.append(f)
    out.sort(key=lambda f: (not f.newform, [f.eigenvalues[l] for l in primes]))
    for i, f in enumerate(out):
        f.label = f"{N}.{k}.{_letters(i)}"
    return out


def _letters(i: int) -> str:
    s = ""
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        s = chr(97 + r) + s
    return s


def _prime_divisors(N):
    from ..qexp import prime_factors

    return prime_factors(N)


def _to_cusp(coords, rows: flint.fmpz_mat) -> list:
    R = linalg.to_fractions(linalg.to_q(rows))
    return [sum((c * R[i][j] for i, c in enumerate(coords)), Fraction(0)) for j in range(rows.ncols())]


def _common_kernel(ops: dict, eig: dict, dim: int) -> flint.fmpq_mat:
    V = linalg.identity_q(dim)
    for l, a in eig.items():
        A = restrict_q(ops[l], V)
        K = linalg.kernel_columns(A - linalg.identity_q(A.nrows()) * flint.fmpq(a.numerator, a.denominator))
        V = V * K
    return V


def extend_eigenvalues(S: ModularSymbolSpace, f: EigenformData, bound: int) -> EigenformData:
    """Add a_l for all primes l <= bound using one symbol and an eigen-functional."""
    missing = [l for l in primes_up_to(bound) if l not in f.eigenvalues]
    if not missing:
        return f
    if S.k == 2:
        values = _path_eigenvalues(S, f, missing)
        for l in missing:
            if values[l].denominator != 1:
                raise ValueError(f"non-integral eigenvalue at {l}")
            f.eigenvalues[l] = int(values[l])
        return f
    psi_img, s0, norm = _eigen_functional(S, f)
    for l in missing:
        combo = S.hecke_on_symbol(s0, l)
        val = sum((c * psi_img[t] for t, c in combo.items() if c), Fraction(0)) / norm
        if val.denominator != 1:
            raise ValueError(f"non-integral eigenvalue at {l}")
        f.eigenvalues[l] = int(val)
    return f


def _path_eigenvalues(S: ModularSymbolSpace, f: EigenformData, primes) -> dict:
    """a_l from T_l{alpha, oo} = sum_r {(alpha + r)/l, oo} + {l alpha, oo} (weight 2, l prime to N).

    Each path is expanded by continued fractions and evaluated with the
    eigen-functional, which costs O(l log l) per prime.
    """
    psi_img, _, _ = _eigen_functional(S, f)
    n, N, table = S.n_p1, S.N, S.p1._table
    den = 1
    for x in psi_img[:n]:
        den = den * x.denominator // gcd(den, x.denominator)
    psi = [int(x * den) for x in psi_img[:n]]

    def to_cusp(num, d):
        # psi({oo, num/d})
        total, qp, qpp, s, a, b = 0, 0, 1, -1, num, d
        while b:
            q, r = divmod(a, b)
            qc = q * qp + qpp
            total += psi[table[(qc % N) * N + (s * qp) % N]]
            qpp, qp, a, b, s = qp, qc, b, r, -s
        return total

    base = 0
    for b0 in range(1, 4 * N + 2):
        for a0 in range(b0):
            if gcd(a0, b0) == 1:
                base = -to_cusp(a0, b0)
                if base:
                    break
        if base:
            break
    if not base:
        raise BlockNotFound("eigen-functional vanishes on every test path")
    out = {}
    for l in primes:
        if N % l == 0:
            raise ValueError(f"path formula needs l prime to the level, got {l}")
        v = -to_cusp(l * a0, b0)
        for r in range(l):
            v -= to_cusp(a0 + r * b0, l * b0)
        out[l] = Fraction(v, base)
    return out


def _eigen_functional(S: ModularSymbolSpace, f: EigenformData):
    cache = S.__dict__.setdefault("_functional_cache", {})
    if f.label in cache:
        return cache[f.label]
    d = S.dim
    blocks = [S.hecke_free(l).transpose() - linalg.identity_q(d) * f.eigenvalues[l] for l in good_primes(S.N, working_bound(S.N, S.k))]
    K = linalg.kernel_columns(linalg.vstack(*blocks))
    if K.ncols() == 0:
        raise BlockNotFound("no eigen-functional for this eigensystem")
    psi = [K[i, 0] for i in range(d)]
    psi_img = []
    for img in S._images:
        val = sum((psi[fi] * x for fi, x in img.items()), flint.fmpq(0))
        psi_img.append(Fraction(int(val.p), int(val.q)))
    s0 = next(s for s in S.free if psi_img[s] != 0)
    cache[f.label] = (psi_img, s0, psi_img[s0])
    return cache[f.label]


# ---------------------------------------------------------------------------
# the localized Hecke lattice


def _check_standing(N: int, k: int, p: int):
    if p < 3 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
        raise HypothesisViolation(f"p = {p} must be an odd prime", "p is an odd prime")
    if N % p == 0:
        raise HypothesisViolation(f"p = {p} divides the level {N}", "p does not divide the level N")
    if p <= k - 2:
        raise HypothesisViolation(f"p = {p} is not larger than k - 2 = {k - 2}", "p > k - 2")


@dataclass
class HeckeLattice:
    """The m-local block of the plus and minus cuspidal lattices with its Hecke algebra."""

    space: ModularSymbolSpace
    form: EigenformData
    p: int
    plus_rows: flint.fmpz_mat  # Z-basis of the plus block, cuspidal coordinates
    minus_rows: flint.fmpz_mat
    algebra: FiniteFlatAlgebra
    character: Character
    plus_module: AlgebraModule
    minus_module: AlgebraModule
    delta_plus: list  # coordinates in plus_rows
    delta_minus: list
    eigensystems: list = field(default_factory=list)
    generator_primes: list = field(default_factory=list)

    @property
    def rank(self) -> int:
        return self.plus_rows.nrows()

    @cached_property
    def gram(self) -> list:
        """Twisted pairing between the plus and minus block bases."""
        G = linalg.to_q(self.plus_rows) * linalg.to_q(self.space.twisted_pairing) * linalg.to_q(self.minus_rows.transpose())
        return linalg.to_fractions(G)

    def pairing(self) -> PerfectPairing:
        det = dvr.determinant(self.gram)
        if det == 0 or valuation(det, self.p) != 0:
            raise PairingDegenerate(f"twisted pairing determinant {det} is not a unit at {self.p}")
        return PerfectPairing.create(self.plus_module, self.minus_module, self.gram)

    def to_json(self) -> dict:
        return {
            "algebra": serialize.algebra_to_json(self.algebra),
            "character": serialize.character_to_json(self.character),
            "plus_module": serialize.module_to_json(self.plus_module),
            "minus_module": serialize.module_to_json(self.minus_module),
            "rank": self.rank,
            "eigensystems": len(self.eigensystems),
        }


def localize_at_eigenform(S: ModularSymbolSpace, f: EigenformData, p: int) -> HeckeLattice:
    N, k = S.N, S.k
    _check_standing(N, k, p)
    bound = working_bound(N, k)
    primes = good_primes(N, bound)
    if f.is_eisenstein(p, bound):
        raise EisensteinIdeal(f"a_l = 1 + l^{k - 1} mod {p} for all l <= {bound} prime to {N}")
    if f.plus is None:
        raise Unsupported("localization needs a newform with one-dimensional eigenspaces")

    blocks = {}
    for sign in (1, -1):
        L = sign_lattice(S, sign)
        ops = {l: restrict(S.hecke_operator(l), L) for l in primes}
        V = linalg.identity_q(L.nrows())
        for l in primes:
            A = restrict_q(ops[l], V)
            g = flint.fmpz_poly([1])
            for F, e in linalg.factor_charpoly(A):
                if int(F(f.eigenvalues[l])) % p == 0:
                    g = g * F**e
            if g.degree() == 0:
                raise BlockNotFound(f"no eigenvalue of T_{l} reduces to a_{l} mod {p}")
            V = V * linalg.kernel_columns(linalg.poly_at_matrix(g, A))
        pieces, lost = _joint_eigenspaces({l: restrict_q(ops[l], V) for l in primes}, V.ncols())
        if lost:
            raise Unsupported(f"the block at {p} contains eigenvalues outside Q")
        rows_local = linalg.saturate_rows(V.transpose())
        blocks[sign] = (rows_local * L, pieces)
    plus_rows, pieces = blocks[1]
    minus_rows, _ = blocks[-1]
    if plus_rows.nrows() != minus_rows.nrows():
        raise BlockNotFound("plus and minus blocks differ in rank")

    def on_block(l):
        op = S.hecke_operator(l)
        return restrict(op, plus_rows), restrict(op, minus_rows)

    mats = {l: on_block(l) for l in primes}
    r = plus_rows.nrows()

    def flat(pair):
        return [x for M in pair for row in linalg.to_fractions(M) for x in row]

    one = (linalg.identity_q(r), linalg.identity_q(r))
    gens = [one] + [mats[l] for l in primes]
    basis = _algebra_closure(gens, p, flat)

    # stabilization: a few primes past the bound must not enlarge the algebra
    extra = [l for l in primes_up_to(2 * bound) if N % l and l > bound][:4]
    if extra:
        bigger = _algebra_closure(gens + [on_block(l) for l in extra], p, flat)
        if not dvr.lattices_equal([flat(b) for b in basis], [flat(b) for b in bigger], p):
            basis = bigger

    vecs = [flat(b) for b in basis]
    n = len(basis)

    def coords(pair):
        c = dvr.coordinates_many(vecs, [flat(pair)])[0]
        if c is dvr.NO_SOLUTION:
            raise ValueError("product left the algebra span")
        return c

    consts = [[coords((basis[i][0] * basis[j][0], basis[i][1] * basis[j][1])) for j in range(n)] for i in range(n)]
    unit = coords(one)
    T = FiniteFlatAlgebra.create(p, consts, unit, label=f"T[{f.label}, p={p}]")

    dp = _coords_in_rows([Fraction(x) for x in f.plus], plus_rows)
    dm = _coords_in_rows([Fraction(x) for x in f.minus], minus_rows)
    dp, dm = _primitive(dp), _primitive(dm)
    values = []
    for b in basis:
        values.append(_eigenvalue(_as_fmpz(b[0]), [Fraction(x) for x in dp]))
    lam = Character.create(T, values)
    plus_mod = AlgebraModule.create(T, [linalg.to_fractions(b[0]) for b in basis])
    minus_mod = AlgebraModule.create(T, [linalg.to_fractions(b[1]) for b in basis])
    systems = [{l: int(a) for l, a in eig.items()} for _, eig in pieces]
    return HeckeLattice(S, f, p, plus_rows, minus_rows, T, lam, plus_mod, minus_mod, dp, dm, systems, primes)


def _as_fmpz(M: flint.fmpq_mat) -> flint.fmpz_mat:
    num, den = M.numer_denom()
    if den != 1:
        raise ValueError("Hecke matrix on the block is not integral")
    return num


def _coords_in_rows(vec, rows: flint.fmpz_mat) -> list:
    B = linalg.to_q(rows.transpose())
    v = flint.fmpq_mat(len(vec), 1, [flint.fmpq(x.numerator, x.denominator) for x in vec])
    X = linalg.solve_columns(B, v)
    return [Fraction(int(X[i, 0].p), int(X[i, 0].q)) for i in range(X.nrows())]


def _algebra_closure(gens, p, flat):
    """O-basis (as matrix pairs) of the O-algebra generated by gens."""
    elements = list(gens)
    basis_vecs = dvr.lattice_basis([flat(g) for g in elements], len(flat(gens[0])), p)
    while True:
        basis = _from_vectors(basis_vecs, gens[0])
        products = [(a[0] * b[0], a[1] * b[1]) for i, a in enumerate(basis) for b in basis[i:]]
        new_vecs = dvr.lattice_basis(basis_vecs + [flat(x) for x in products], len(basis_vecs[0]), p)
        if dvr.lattices_equal(new_vecs, basis_vecs, p):
            return basis
        basis_vecs = new_vecs


def _from_vectors(vecs, template):
    r = template[0].nrows()
    out = []
    for v in vecs:
        A = flint.fmpq_mat(r, r, [flint.fmpq(x.numerator, x.denominator) for x in v[: r * r]])
        B = flint.fmpq_mat(r, r, [flint.fmpq(x.numerator, x.denominator) for x in v[r * r :]])
        out.append((A, B))
    return out


# ---------------------------------------------------------------------------
# congruence numbers and checks


def congruence_number(L: HeckeLattice) -> PIdeal:
    """eta_f = lambda_f(Ann_T(ker lambda_f))."""
    return eta(L.algebra, L.character)


def cohomological_congruence_number(L: HeckeLattice) -> PIdeal:
    """Ideal generated by [delta+, delta-] for the twisted pairing."""
    pairing = L.pairing()
    value = pairing.pair([Fraction(x) for x in L.delta_plus], [Fraction(x) for x in L.delta_minus])
    return PIdeal.generated_by(value, L.p)


def pontryagin_triple(L: HeckeLattice):
    """(Fitt C0(H+), Fitt C0(H-), pairing ideal) through the finalg machinery."""
    return duality_transfer(L.pairing(), L.character)


def cyclic_generator(M: AlgebraModule, trials: int = 200, seed: int = 0):
    """A vector v with {b_i v} an O-basis of M, or None if none was found."""
    T = M.algebra
    if T.rank != M.rank:
        return None
    n = M.rank
    rng = random.Random(seed)
    candidates = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    candidates.append([Fraction(1)] * n)
    candidates += [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(trials)]
    for v in candidates:
        cols = [dvr.matvec([list(r) for r in A], v) for A in M.action]
        det = dvr.determinant(dvr.columns_to_matrix(cols, n))
        if det != 0 and valuation(det, T.p) == 0:
            return v
    return None


def is_free(L: HeckeLattice) -> bool:
    return cyclic_generator(L.plus_module) is not None and cyclic_generator(L.minus_module) is not None


def sturm_oracle(f: EigenformData, g: EigenformData, p: int, bound: int | None = None) -> float:
    """Largest e with a_l(f) = a_l(g) mod p^e for all primes l <= bound prime to N."""
    bound = working_bound(f.level, f.weight) if bound is None else bound
    return congruence_valuation(f.eigenvalues, g.eigenvalues, p, good_primes(f.level, bound))
