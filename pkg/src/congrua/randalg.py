"""Seeded random finite flat algebras for property testing.

Every family is realized as an order inside O^n (componentwise product), so
T_K = K^n is split semisimple and characters are coordinate projections.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import dvr
from .dvr import lattice_basis, matvec
from .finalg import (
    AlgebraModule,
    BaseChangeDatum,
    Character,
    FiniteFlatAlgebra,
    PerfectPairing,
)

FAMILIES = ("SplitProduct", "MonogenicGlue", "FiberProduct", "TripleGlue", "TensorSquare")


@dataclass(frozen=True)
class RandAlgSpec:
    family: str
    p: int = 3
    params: tuple = ()


@dataclass(frozen=True, eq=False)
class Order:
    """An order of O^n with its basis (as vectors of O^n) and the abstract algebra."""

    algebra: FiniteFlatAlgebra
    basis: tuple  # vectors in O^n
    n: int

    def embed(self, coords: Sequence) -> list:
        return [sum((c * b[i] for c, b in zip(coords, self.basis)), Fraction(0)) for i in range(self.n)]

    def coords(self, vec: Sequence) -> list:
        return dvr.coordinates(list(self.basis), list(vec))

    def projection_character(self, j: int) -> Character:
        return Character.create(self.algebra, [b[j] for b in self.basis])

    def module(self, lattice: Sequence[Sequence], copies: int = 1) -> AlgebraModule:
        """T acting componentwise on a T-stable lattice in (K^n)^copies."""
        B = [list(v) for v in lattice]
        N = len(B)
        acts = []
        for b in self.basis:
            scaled = [[x * b[i % self.n] for i, x in enumerate(v)] for v in B]
            acts.append(dvr.columns_to_matrix(dvr.coordinates_many(B, scaled), N))
        return AlgebraModule.create(self.algebra, acts)


def _mul(x, y):
    return [a * b for a, b in zip(x, y)]


def order_closure(generators: Sequence[Sequence], n: int, p: int, label: str = "") -> Order:
    """Smallest Z_(p)-order of K^n containing 1 and the generators."""
    one = [Fraction(1)] * n
    basis = lattice_basis([one] + [list(map(Fraction, g)) for g in generators], n, p)
    while True:
        prods = [_mul(x, y) for x, y in itertools.combinations_with_replacement(basis, 2)]
        new = lattice_basis(basis + prods, n, p)
        if len(new) == len(basis) and dvr.lattices_equal(new, basis, p):
            break
        basis = new
    basis = _canonical_basis(basis, n, p)
    r = len(basis)
    prods = [_mul(basis[i], basis[j]) for i in range(r) for j in range(r)] + [one]
    coords = dvr.coordinates_many(basis, prods)
    c = [[coords[i * r + j] for j in range(r)] for i in range(r)]
    unit = coords[-1]
    alg = FiniteFlatAlgebra.create(p, c, unit, label=label)
    return Order(alg, tuple(tuple(b) for b in basis), n)


def _canonical_basis(basis, n, p):
    """Echelon basis: pivot of minimal valuation per column, normalized to p^v."""
    B = [list(v) for v in basis]
    r = len(B)
    done = 0
    for col in range(n):
        if done == r:
            break
        cand = [(dvr.valuation(B[i][col], p), i) for i in range(done, r) if B[i][col]]
        if not cand:
            continue
        v, i = min(cand)
        B[done], B[i] = B[i], B[done]
        scale = Fraction(p) ** v / B[done][col]
        piv = [x * scale for x in B[done]]
        B[done] = piv
        for k in range(done + 1, r):
            if B[k][col]:
                f = B[k][col] / piv[col]
                B[k] = [a - f * b for a, b in zip(B[k], piv)]
        done += 1
    return B


# ---------------------------------------------------------------------------
# families


def split_product(p: int, parts: Sequence[Order]) -> Order:
    n = sum(o.n for o in parts)
    gens = []
    off = 0
    for o in parts:
        for b in o.basis:
            v = [Fraction(0)] * n
            v[off:off + o.n] = b
            gens.append(v)
        off += o.n
    return order_closure(gens, n, p, "SplitProduct")


def monogenic_glue(p: int, roots: Sequence[int]) -> Order:
    """O[x]/prod(x - a_i) realized as the order generated by (a_1..a_n)."""
    return order_closure([[Fraction(a) for a in roots]], len(roots), p, "MonogenicGlue")


def fiber_product(p: int, A: Order, ja: int, B: Order, jb: int) -> Order:
    """{(x, y) in A x B : x_ja ≡ y_jb mod p}, glued along coordinates ja and jb."""
    n = A.n + B.n
    gens = [[Fraction(1)] * n]
    for src, off, j in ((A, 0, ja), (B, A.n, jb)):
        for b in src.basis:
            # b - b_j.1 lies in the kernel of the residue map, as does p.b
            v = [Fraction(0)] * n
            v[off:off + src.n] = [x - b[j] for x in b]
            gens.append(v)
            w = [Fraction(0)] * n
            w[off:off + src.n] = [p * x for x in b]
            gens.append(w)
    return order_closure(gens, n, p, "FiberProduct")


def triple_glue(p: int, m: int = 1, n: int = 3) -> Order:
    """O.1 + p^m O^n; for m = 1, n = 3 this is {a ≡ b ≡ c mod p}."""
    gens = []
    for i in range(n):
        v = [Fraction(0)] * n
        v[i] = Fraction(p) ** m
        gens.append(v)
    return order_closure(gens, n, p, "TripleGlue")


def tensor_square(p: int, A: Order) -> Order:
    n = A.n * A.n
    gens = [[x * y for x in a for y in b] for a in A.basis for b in A.basis]
    return order_closure(gens, n, p, "TensorSquare")


# ---------------------------------------------------------------------------
# random instances


@dataclass(eq=False)
class Instance:
    """A generated algebra with a character, a base-change datum and test modules."""

    family: str
    seed: int
    p: int
    order: Order
    lam: Character
    lam_index: int
    datum: BaseChangeDatum
    target_order: Order
    module: AlgebraModule
    module_lattice: list
    pairing: PerfectPairing
    rank_one: bool
    extra: dict = field(default_factory=dict)


def _random_glue(rng: random.Random, p: int, size: int) -> Order:
    a1 = rng.randint(-p, p)
    roots = [a1]
    while len(roots) < size:
        e = rng.randint(1, 3)
        a = a1 + (p ** e) * rng.choice([u for u in range(-p + 1, p) if u % p])
        if a not in roots:
            roots.append(a)
    return monogenic_glue(p, roots)


def _random_small(rng: random.Random, p: int) -> Order:
    size = rng.randint(1, 3)
    if size == 1:
        return order_closure([], 1, p, "O")
    return _random_glue(rng, p, size)


def make_family(family: str, rng: random.Random, p: int) -> Order:
    if family == "SplitProduct":
        return split_product(p, [_random_small(rng, p), _random_small(rng, p)])
    if family == "MonogenicGlue":
        return _random_glue(rng, p, rng.randint(2, 4))
    if family == "FiberProduct":
        A, B = _random_small(rng, p), _random_small(rng, p)
        return fiber_product(p, A, rng.randrange(A.n), B, rng.randrange(B.n))
    if family == "TripleGlue":
        return triple_glue(p, rng.randint(1, 2), rng.choice([3, 3, 4]))
    if family == "TensorSquare":
        return tensor_square(p, _random_glue(rng, p, 2))
    raise ValueError(f"unknown family {family}")


def random_algebra(spec: RandAlgSpec, seed: int) -> tuple[FiniteFlatAlgebra, Character]:
    rng = random.Random(f"{spec.family}:{spec.p}:{seed}")
    order = make_family(spec.family, rng, spec.p)
    j = rng.randrange(order.n)
    return order.algebra, order.projection_character(j)


def _random_vector(rng, n, p):
    return [Fraction(rng.randint(-p * p, p * p)) for _ in range(n)]


def random_lattice_module(rng: random.Random, order: Order, copies: int = 1) -> list:
    """T-span of random vectors in (O^n)^copies, full rank."""
    n, p = order.n, order.algebra.p
    N = n * copies
    while True:
        gens = [_random_vector(rng, N, p) for _ in range(rng.randint(1, 2) + copies - 1)]
        span = []
        for g in gens:
            for b in order.basis:
                span.append([x * b[i % n] for i, x in enumerate(g)])
        L = lattice_basis(span, N, p)
        if len(L) == N:
            return L


def dual_lattice(L: list) -> list:
    """Dual under the standard form sum x_i y_i: columns of (L^T)^{-1}."""
    N = len(L)
    Bt = dvr.columns_to_matrix(L, N)  # columns are basis vectors
    inv_t = dvr.transpose(dvr.inverse(Bt))
    return [[inv_t[r][c] for r in range(N)] for c in range(N)]


def random_unimodular(rng: random.Random, n: int, p: int) -> list:
    while True:
        U = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        if dvr.valuation(dvr.determinant(U), p) == 0:
            return U


def random_base_change(rng: random.Random, order: Order, lam_index: int) -> tuple[BaseChangeDatum, Order]:
    """theta = projection onto a coordinate subset J containing lam_index.

    Usually T is the image of theta (O-surjective); sometimes T = O^J.
    """
    n, p = order.n, order.algebra.p
    others = [i for i in range(n) if i != lam_index]
    J = sorted([lam_index] + rng.sample(others, rng.randint(0, len(others))))
    proj = [[b[j] for j in J] for b in order.basis]
    if rng.random() < 0.8:
        target = order_closure(proj, len(J), p, "Image")
    else:
        target = split_product(p, [order_closure([], 1, p, "O") for _ in J]) if len(J) > 1 else order_closure([], 1, p, "O")
    theta_cols = dvr.coordinates_many(list(target.basis), proj)
    theta = dvr.columns_to_matrix(theta_cols, target.algebra.rank)
    lam = target.projection_character(J.index(lam_index))
    return BaseChangeDatum.create(order.algebra, target.algebra, theta, lam), target


def random_instance(family: str, seed: int, p: int = 3) -> Instance:
    rng = random.Random(f"{family}:{p}:{seed}")
    order = make_family(family, rng, p)
    j = rng.randrange(order.n)
    lam = order.projection_character(j)
    datum, target = random_base_change(rng, order, j)
    copies = 1 if rng.random() < 0.75 else 2
    L = random_lattice_module(rng, order, copies)
    M = order.module(L, copies)
    # M2 = dual lattice in a scrambled basis; gram = L^T U
    D = dual_lattice(L)
    U = random_unimodular(rng, len(D), p)
    D2 = [[sum((U[k][c] * D[k][r] for k in range(len(D))), Fraction(0)) for r in range(len(D[0]))] for c in range(len(D))]
    M2 = order.module(D2, copies)
    gram = [[sum((a * b for a, b in zip(x, y)), Fraction(0)) for y in D2] for x in L]
    P = PerfectPairing.create(M, M2, gram)
    return Instance(family, seed, p, order, lam, j, datum, target, M, L, P, copies == 1)
