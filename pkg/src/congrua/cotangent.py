"""Cotangent modules C1 = p/p^2, the complete-intersection criterion and the Wiles defect.

The defect is computed two ways: directly as Fitt(C1) / eta, and from a
presentation O[x_1..x_g]/(f_0..f_g) by splitting off a complete-intersection
cover T0 = O[x]/(h_1..h_g) with T = T0/(f).
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy

from . import dvr
from .dvr import NO_SOLUTION, FiniteModulePresentation, PIdeal, fitting_ideal, lattice_basis, valuation
from .errors import Degenerate, InvalidStructure, NoCICover, NoIdempotent, PreconditionFailed
from .finalg import (
    BaseChangeDatum,
    Character,
    FiniteFlatAlgebra,
    annihilator,
    eta,
    quotient_presentation,
)

Polynomial = dict  # {exponent tuple: Fraction}


@dataclass
class C1Result:
    cotangent_presentation: FiniteModulePresentation
    fitting: PIdeal

    def to_json(self):
        return {"invariants": self.cotangent_presentation.invariants(), "fitting": self.fitting.to_json()}


def _product_lattice(T: FiniteFlatAlgebra, A: Sequence, B: Sequence, symmetric: bool) -> list:
    if symmetric:
        prods = [T.mul(a, b) for a, b in itertools.combinations_with_replacement(A, 2)]
    else:
        prods = [T.mul(a, b) for a in A for b in B]
    return lattice_basis(prods, T.rank, T.p)


def c1(T: FiniteFlatAlgebra, lam: Character) -> C1Result:
    """Present ker(lambda) / ker(lambda)^2."""
    ker = lam.kernel_basis
    sq = _product_lattice(T, ker, ker, symmetric=True)
    pres = quotient_presentation(ker, sq, T.p) if len(sq) == len(ker) else _non_finite(T.p, ker, sq)
    return C1Result(pres, fitting_ideal(pres))


def _non_finite(p, big, small):
    # keep the free part visible so fitting_ideal raises NotFinite
    rel = dvr.coordinates_many(big, small)
    return FiniteModulePresentation.of(p, len(big), dvr.columns_to_matrix(rel, len(big)) if rel else [[Fraction(0)] for _ in big])


class LCIVerdict(enum.Enum):
    COMPLETE_INTERSECTION = "CompleteIntersection"
    NOT_CI = "NotCI"


@dataclass
class LCIReport:
    verdict: LCIVerdict
    eta: PIdeal
    fitting_c1: PIdeal

    @property
    def inclusion_holds(self) -> bool:
        return self.eta.contains(self.fitting_c1)

    def to_json(self):
        return {"verdict": self.verdict.value, "eta": self.eta.to_json(), "fitting_c1": self.fitting_c1.to_json()}


def lci_criterion(T: FiniteFlatAlgebra, lam: Character) -> LCIReport:
    e = eta(T, lam)
    f = c1(T, lam).fitting
    verdict = LCIVerdict.COMPLETE_INTERSECTION if e == f else LCIVerdict.NOT_CI
    return LCIReport(verdict, e, f)


def wiles_defect(T: FiniteFlatAlgebra, lam: Character) -> PIdeal:
    """Fitt(C1) * eta^{-1}."""
    try:
        e = eta(T, lam)
    except NoIdempotent as exc:
        raise Degenerate(str(exc)) from exc
    if e.is_zero:
        raise Degenerate("eta is the zero ideal")
    f = c1(T, lam).fitting
    return PIdeal(f.valuation - e.valuation)


# ---------------------------------------------------------------------------
# presentations


def _poly(d) -> Polynomial:
    return {tuple(k): Fraction(v) for k, v in dict(d).items() if v}


@dataclass(frozen=True, eq=False)
class AlgebraPresentation:
    """T = O[x_1..x_g]/(f_0..f_g) with x_j mapped to the given elements of T."""

    num_vars: int
    relations: tuple  # g+1 polynomials
    target: FiniteFlatAlgebra
    images: tuple  # algebra elements, one per variable

    @classmethod
    def create(cls, target, relations, images, check=True):
        rels = tuple(_poly(f) for f in relations)
        imgs = tuple(tuple(Fraction(x) for x in v) for v in images)
        P = cls(len(imgs), rels, target, imgs)
        if check:
            P.validate()
        return P

    def evaluate(self, f: Polynomial) -> list:
        T = self.target
        out = [Fraction(0)] * T.rank
        for exps, c in f.items():
            term = list(T.unit)
            for x, e in zip(self.images, exps):
                for _ in range(e):
                    term = T.mul(term, x)
            out = [a + c * b for a, b in zip(out, term)]
        return out

    def validate(self):
        T = self.target
        if len(self.relations) != self.num_vars + 1:
            raise InvalidStructure("a presentation needs exactly g+1 relations")
        for i, f in enumerate(self.relations):
            if any(len(k) != self.num_vars for k in f):
                raise InvalidStructure(f"relation {i} has wrong arity")
            if not all(dvr.is_p_integral(c, T.p) for c in f.values()):
                raise InvalidStructure(f"relation {i} is not over O")
            if any(self.evaluate(f)):
                raise InvalidStructure(f"relation {i} does not vanish in T")
        span = _monomial_closure(T, self.images)
        full = [T.basis_vector(i) for i in range(T.rank)]
        if len(span) != T.rank or dvr.lattice_index_valuation(full, span, T.p) != 0:
            raise InvalidStructure("the variables do not generate T")
        return self

    def to_json(self):
        return {
            "num_vars": self.num_vars,
            "relations": [
                [[list(k), str(v)] for k, v in sorted(f.items())] for f in self.relations
            ],
        }


def _monomial_closure(T: FiniteFlatAlgebra, gens: Sequence) -> list:
    basis = lattice_basis([list(T.unit)], T.rank, T.p)
    while True:
        new = lattice_basis(basis + [T.mul(b, g) for b in basis for g in gens], T.rank, T.p)
        if len(new) == len(basis) and dvr.lattices_equal(new, basis, T.p):
            return new
        basis = new


@dataclass
class DefectReport:
    defect: PIdeal
    cover_relations: tuple  # coefficient rows used: (row for f, rows for h_1..h_g)
    cover_rank: int
    c1_target: PIdeal
    c1_cover: PIdeal
    lambda_ann_f: PIdeal

    def to_json(self):
        return {
            "defect": self.defect.to_json(),
            "cover_rank": self.cover_rank,
            "c1_target": self.c1_target.to_json(),
            "c1_cover": self.c1_cover.to_json(),
            "lambda_ann_f": self.lambda_ann_f.to_json(),
        }


def _combine(rels: Sequence[Polynomial], coeffs: Sequence[int]) -> Polynomial:
    out: dict = {}
    for c, f in zip(coeffs, rels):
        if c:
            for k, v in f.items():
                out[k] = out.get(k, Fraction(0)) + c * v
    return {k: v for k, v in out.items() if v}


def _to_sympy(f: Polynomial, gens, modulus: int | None = None):
    expr = 0
    for k, v in f.items():
        if modulus is None:
            coeff = sympy.Rational(v.numerator, v.denominator)
        else:
            coeff = (v.numerator * pow(v.denominator, -1, modulus)) % modulus
        mon = 1
        for x, e in zip(gens, k):
            mon *= x ** e
        expr += coeff * mon
    return expr


def _standard_monomials(G, gens, bound: int = 512):
    """Monomials not divisible by any leading monomial; None if the quotient is infinite."""
    if not G.exprs:
        return None
    if any(sympy.Poly(g, *gens).is_ground and g != 0 for g in G.exprs):
        return []
    leads = [sympy.Poly(g, *gens).monoms(order=G.order)[0] for g in G.exprs]
    g = len(gens)
    seen = {(0,) * g}
    frontier = [(0,) * g]
    out = []
    while frontier:
        m = frontier.pop()
        if any(all(a >= b for a, b in zip(m, L)) for L in leads):
            continue
        out.append(m)
        if len(out) > bound:
            return None
        for j in range(g):
            n = tuple(e + (i == j) for i, e in enumerate(m))
            if n not in seen:
                seen.add(n)
                frontier.append(n)
    return sorted(out)


@dataclass
class _Cover:
    algebra: FiniteFlatAlgebra
    lam0: Character
    f_coords: list


def _build_cover(P: AlgebraPresentation, lam: Character, h: Sequence[Polynomial], f: Polynomial):
    """T0 = O[x]/(h) if finite flat, with lambda_0 and the image of f; else None."""
    g, p = P.num_vars, P.target.p
    if g == 0:
        return None
    gens = sympy.symbols(f"x0:{g}")
    hq = [_to_sympy(q, gens) for q in h]
    if any(e == 0 for e in hq):
        return None
    Gq = sympy.groebner(hq, *gens, order="grevlex", domain="QQ")
    std = _standard_monomials(Gq, gens)
    if not std:
        return None
    hp = [_to_sympy(q, gens, p) for q in h]
    hp = [e for e in hp if sympy.expand(e) != 0]
    if len(hp) < g:
        return None
    Gp = sympy.groebner(hp, *gens, order="grevlex", modulus=p)
    stdp = _standard_monomials(Gp, gens)
    if stdp is None or len(stdp) != len(std):
        return None
    d = len(std)
    index = {m: i for i, m in enumerate(std)}

    def normal_form(expr) -> list:
        r = Gq.reduce(sympy.expand(expr))[1]
        vec = [Fraction(0)] * d
        for mon, c in sympy.Poly(r, *gens).terms():
            c = sympy.Rational(c)
            vec[index[mon]] += Fraction(int(c.p), int(c.q))
        return vec

    # O-span of all monomials: close {1} under multiplication by the variables
    x_nf = [normal_form(x) for x in gens]

    def mul(u, v):
        eu = sum((sympy.Rational(c.numerator, c.denominator) * _mono(gens, std[i]) for i, c in enumerate(u) if c), 0)
        ev = sum((sympy.Rational(c.numerator, c.denominator) * _mono(gens, std[i]) for i, c in enumerate(v) if c), 0)
        return normal_form(eu * ev)

    L = lattice_basis([normal_form(1)], d, p)
    for _ in range(4 * d + 4):
        new = lattice_basis(L + [mul(b, x) for b in L for x in x_nf], d, p)
        if len(new) == len(L) and dvr.lattices_equal(new, L, p):
            break
        L = new
    else:
        return None
    if len(L) != d:
        return None
    prods = [mul(L[i], L[j]) for i in range(d) for j in range(d)]
    coords = dvr.coordinates_many(L, prods + [normal_form(1), normal_form(_to_sympy(f, gens))])
    if any(c is NO_SOLUTION or not all(dvr.is_p_integral(x, p) for x in c) for c in coords):
        return None
    c = [[coords[i * d + j] for j in range(d)] for i in range(d)]
    T0 = FiniteFlatAlgebra.create(p, c, coords[d * d], label="cover")
    # lambda_0 on the lattice basis: evaluate the standard monomials at the point lambda(x)
    point = [lam(v) for v in P.images]
    mon_vals = [_eval_mono(point, m) for m in std]
    lam0 = Character.create(T0, [sum((a * b for a, b in zip(v, mon_vals)), Fraction(0)) for v in L])
    return _Cover(T0, lam0, coords[d * d + 1])


def _mono(gens, exps):
    out = 1
    for x, e in zip(gens, exps):
        out *= x ** e
    return out


def _eval_mono(point, exps):
    out = Fraction(1)
    for a, e in zip(point, exps):
        out *= a ** e
    return out


def _recombinations(g: int, p: int, bound: int):
    """Coefficient matrices (rows: f, h_1..h_g), subsets first, then {-1,0,1} mixes."""
    size = g + 1
    for drop in range(size - 1, -1, -1):
        rows = [tuple(int(i == j) for j in range(size)) for i in range(size)]
        yield (rows[drop],) + tuple(r for i, r in enumerate(rows) if i != drop)
    count = 0
    vecs = [v for v in itertools.product((0, 1, -1), repeat=size) if any(v)]
    for combo in itertools.product(vecs, repeat=size):
        M = [list(r) for r in combo]
        if dvr.valuation(dvr.determinant([[Fraction(x) for x in r] for r in M]), p) != 0:
            continue
        count += 1
        if count > bound:
            return
        yield tuple(combo)


def defect_via_cotangent_complex(P: AlgebraPresentation, lam: Character, bound: int = 2000) -> DefectReport:
    """Fitt H1 of the cotangent complex via a complete-intersection cover.

    v(H1) = v(Fitt C1(T)) + v(lambda_0(Ann_{T0}(f))) - v(Fitt C1(T0)).
    """
    T, p = P.target, P.target.p
    c1_T = c1(T, lam).fitting
    for rows in _recombinations(P.num_vars, p, bound):
        f = _combine(P.relations, rows[0])
        h = [_combine(P.relations, r) for r in rows[1:]]
        cover = _build_cover(P, lam, h, f)
        if cover is None:
            continue
        T0 = cover.algebra
        fT0 = lattice_basis([T0.mul(cover.f_coords, T0.basis_vector(i)) for i in range(T0.rank)], T0.rank, p)
        if T0.rank - len(fT0) != T.rank:
            continue
        ann = annihilator(T0, [cover.f_coords])
        v_ann = min((valuation(cover.lam0(a), p) for a in ann), default=dvr.INF)
        if v_ann == dvr.INF:
            continue
        c1_0 = c1(T0, cover.lam0).fitting
        v = c1_T.valuation + v_ann - c1_0.valuation
        return DefectReport(PIdeal(v), rows, T0.rank, c1_T, c1_0, PIdeal(v_ann))
    raise NoCICover(f"no complete-intersection cover within {bound} recombinations")


# ---------------------------------------------------------------------------
# base change


def c1_sharp(D: BaseChangeDatum) -> FiniteModulePresentation:
    """ker(theta) / ker(lambda') ker(theta)."""
    S = D.source
    ker = D.kernel
    if not ker:
        return FiniteModulePresentation.of(S.p, 0, [])
    prod = _product_lattice(S, D.lam_prime.kernel_basis, ker, symmetric=False)
    return quotient_presentation(ker, prod, S.p)


@dataclass
class C1SequenceReport:
    fitting_source: PIdeal
    fitting_target: PIdeal
    fitting_sharp: PIdeal
    holds: bool

    def to_json(self):
        return {
            "fitting_c1_source": self.fitting_source.to_json(),
            "fitting_c1_target": self.fitting_target.to_json(),
            "fitting_c1_sharp": self.fitting_sharp.to_json(),
            "holds": self.holds,
        }


def c1_sequence_ideals(D: BaseChangeDatum) -> C1SequenceReport:
    a = c1(D.source, D.lam_prime).fitting
    b = c1(D.target, D.lam).fitting
    c = fitting_ideal(c1_sharp(D))
    return C1SequenceReport(a, b, c, a == b * c)


def check_c1_exact_sequence(D: BaseChangeDatum) -> C1SequenceReport:
    """Fitt C1(T') = Fitt C1(T) * Fitt C1_sharp for a complete-intersection target.

    Raises PreconditionFailed (carrying the three ideals as ``report``) when T is
    not a complete intersection at lambda or theta is not onto over O.
    """
    rep = c1_sequence_ideals(D)
    if lci_criterion(D.target, D.lam).verdict is not LCIVerdict.COMPLETE_INTERSECTION:
        err = PreconditionFailed("target is a complete intersection at lambda")
        err.report = rep
        raise err
    if not D.is_surjective:
        err = PreconditionFailed("theta is onto over O")
        err.report = rep
        raise err
    return rep
