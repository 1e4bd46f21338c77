import pytest

from congrua.cotangent import AlgebraPresentation, LCIVerdict, c1, c1_sharp, check_c1_exact_sequence, defect_via_cotangent_complex, lci_criterion, wiles_defect
from congrua.dvr import PIdeal, fitting_ideal
from congrua.errors import InvalidStructure
from congrua.finalg import Character, FiniteFlatAlgebra
from congrua.presentations import glue_presentation, monogenic_presentation, standard_fixtures
from congrua.randalg import monogenic_glue, triple_glue

from test_finalg import glued_datum

P = 3


def test_c1_rank_one():
    T = FiniteFlatAlgebra.create(P, [[[1]]], [1])
    assert c1(T, Character.create(T, [1])).fitting == PIdeal(0)


@pytest.mark.parametrize("m", [1, 2])
def test_glued_algebra_is_ci(m):
    O = monogenic_glue(P, [0, P**m])
    lam = O.projection_character(0)
    assert c1(O.algebra, lam).fitting == PIdeal(m)
    rep = lci_criterion(O.algebra, lam)
    assert rep.verdict is LCIVerdict.COMPLETE_INTERSECTION
    assert wiles_defect(O.algebra, lam) == PIdeal(0)


def test_triple_glue_is_not_ci():
    O = triple_glue(P)
    lam = O.projection_character(0)
    rep = lci_criterion(O.algebra, lam)
    assert (rep.eta, rep.fitting_c1, rep.verdict) == (PIdeal(1), PIdeal(2), LCIVerdict.NOT_CI)
    assert wiles_defect(O.algebra, lam) == PIdeal(1)


@pytest.mark.parametrize("p", [3, 5])
def test_defect_routes_agree(p):
    for name, O, Pres, expected in standard_fixtures(p):
        for j in range(O.n):
            lam = O.projection_character(j)
            a = wiles_defect(O.algebra, lam)
            b = defect_via_cotangent_complex(Pres, lam).defect
            assert a == b, name
            if expected is not None:
                assert a == PIdeal(expected), name


def test_padding_relation_presentation():
    # O[x]/(x^2 - p x) with the zero relation as padding
    O = monogenic_glue(P, [0, P])
    x = O.coords([0, P])
    pres = AlgebraPresentation.create(O.algebra, [{}, {(2,): 1, (1,): -P}], [x])
    assert defect_via_cotangent_complex(pres, O.projection_character(0)).defect == PIdeal(0)


def test_presentation_must_vanish():
    O = monogenic_glue(P, [0, P])
    with pytest.raises(InvalidStructure):
        AlgebraPresentation.create(O.algebra, [{(1,): 1}, {(2,): 1}], [O.coords([0, P])])


def test_c1_sharp_and_sequence_on_glued_datum():
    D = glued_datum(2)
    assert fitting_ideal(c1_sharp(D)) == PIdeal(2)
    assert check_c1_exact_sequence(D).holds


def test_glue_presentation_has_three_relations():
    _, pres = glue_presentation(P)
    assert pres.num_vars == 2 and len(pres.relations) == 3
    _, pres = monogenic_presentation(P, [0, P])
    assert pres.num_vars == 1 and len(pres.relations) == 2
