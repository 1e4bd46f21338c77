from fractions import Fraction

import pytest

from congrua import dvr
from congrua.dvr import PIdeal, fitting_ideal
from congrua.errors import InvalidStructure
from congrua.finalg import (
    AlgebraModule,
    BaseChangeDatum,
    Character,
    FiniteFlatAlgebra,
    Verdict,
    c0_module,
    check_bc_factorization,
    check_hida_factorization,
    eta,
    eta_sharp,
    gorenstein_check,
    idempotent_for_character,
)
from congrua.randalg import monogenic_glue, split_product, triple_glue

P = 3


def rank_one(p=P):
    return FiniteFlatAlgebra.create(p, [[[1]]], [1])


def glued(m, p=P):
    return monogenic_glue(p, [0, p**m])


def test_split_algebra_has_no_congruence():
    O = split_product(P, [monogenic_glue(P, [0]), monogenic_glue(P, [0])])
    lam = O.projection_character(0)
    assert eta(O.algebra, lam) == PIdeal(0)
    e = idempotent_for_character(O.algebra, lam)
    assert O.embed(e) == [1, 0]


@pytest.mark.parametrize("m", [1, 2, 3])
def test_glued_algebra_eta(m):
    O = glued(m)
    lam = O.projection_character(0)
    assert eta(O.algebra, lam) == PIdeal(m)
    e = idempotent_for_character(O.algebra, lam)
    assert O.algebra.mul(e, e) == e and lam(e) == 1
    assert not all(dvr.is_p_integral(x, P) for x in e)


def test_triple_glue_eta():
    O = triple_glue(P)
    assert eta(O.algebra, O.projection_character(0)) == PIdeal(1)


@pytest.mark.parametrize("m", [1, 2])
def test_congruence_module_of_regular_and_double(m):
    O = glued(m)
    T, lam = O.algebra, O.projection_character(0)
    reg = AlgebraModule.regular(T)
    assert fitting_ideal(c0_module(reg, lam)) == PIdeal(m)
    assert fitting_ideal(c0_module(reg.direct_sum(reg), lam)) == PIdeal(2 * m)


def test_free_rank_one_module_over_O_has_trivial_c0():
    T = rank_one()
    lam = Character.create(T, [1])
    assert fitting_ideal(c0_module(AlgebraModule.regular(T), lam)) == PIdeal(0)


def glued_datum(m, p=P):
    O = glued(m, p)
    T = rank_one(p)
    theta = [[b[0] for b in O.basis]]
    return BaseChangeDatum.create(O.algebra, T, theta, Character.create(T, [1]))


@pytest.mark.parametrize("m", [1, 2])
def test_eta_sharp_of_glued_datum(m):
    assert eta_sharp(glued_datum(m)) == PIdeal(m)


def test_trivial_datum():
    T = rank_one()
    D = BaseChangeDatum.create(T, T, [[1]], Character.create(T, [1]))
    assert eta_sharp(D) == PIdeal(0)
    assert check_bc_factorization(D, AlgebraModule.regular(T)).holds
    assert check_hida_factorization(D).holds


def test_bc_factorization_on_glued_datum():
    D = glued_datum(2)
    assert check_bc_factorization(D, AlgebraModule.regular(D.source)).holds


def test_gorenstein_verdicts():
    assert gorenstein_check(glued(2).algebra) is Verdict.GORENSTEIN
    assert gorenstein_check(triple_glue(P).algebra) is Verdict.INCONCLUSIVE


def test_invalid_structure_constants_rejected():
    T = triple_glue(P).algebra
    consts = [[list(v) for v in row] for row in T.structure_constants]
    consts[1][2] = [x + 1 for x in consts[1][2]]
    with pytest.raises(InvalidStructure):
        FiniteFlatAlgebra.create(P, consts, T.unit)


def test_character_must_be_multiplicative():
    T = glued(1).algebra
    with pytest.raises(InvalidStructure):
        Character.create(T, [Fraction(2), Fraction(5)])
