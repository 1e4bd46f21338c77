from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from congrua import dvr
from congrua.dvr import FiniteModulePresentation, PIdeal, PLocalMatrix, fitting_ideal

small = st.integers(min_value=-30, max_value=30)


def test_valuation_and_units():
    assert dvr.valuation(Fraction(18, 5), 3) == 2
    assert dvr.valuation(Fraction(5, 27), 3) == -3
    assert dvr.valuation(0, 3) == dvr.INF
    assert dvr.unit_part(Fraction(18), 3) == 2


def test_ideal_arithmetic():
    assert PIdeal(1) * PIdeal(2) == PIdeal(3)
    assert PIdeal(1).contains(PIdeal(2))
    assert not PIdeal(2).contains(PIdeal(1))
    assert PIdeal.generated_by(Fraction(50, 7), 5) == PIdeal(2)


def test_snf_identity_and_diagonal():
    p = 3
    _, D, _ = dvr.snf(PLocalMatrix.of(p, [[1, 0], [0, 1]]))
    assert D.diagonal_valuations() == [0, 0]
    _, D, _ = dvr.snf(PLocalMatrix.of(p, [[p, 0], [0, p * p]]))
    assert D.diagonal_valuations() == [1, 2]


def test_snf_against_determinant():
    # [[2, p], [p, p^2]] at p = 5: the first divisor is a unit, the product is det
    p = 5
    A = [[2, p], [p, p * p]]
    _, D, _ = dvr.snf(PLocalMatrix.of(p, A))
    det = dvr.determinant([[Fraction(x) for x in r] for r in A])
    assert D.diagonal_valuations() == [0, dvr.valuation(det, p)]


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_snf_transforms(rows):
    p = 3
    A = PLocalMatrix.of(p, rows)
    U, D, V = dvr.snf(A)
    assert (U @ A @ V).tolist() == D.tolist()
    assert D.is_diagonal()
    vals = [v for v in D.diagonal_valuations() if v != dvr.INF]
    assert vals == sorted(vals)
    for M in (U, V):
        det = dvr.determinant(M.tolist())
        assert dvr.valuation(det, p) == 0


def test_fitting_of_cyclic_sum():
    assert fitting_ideal(FiniteModulePresentation.cyclic(3, [1, 2])) == PIdeal(3)
    assert fitting_ideal(FiniteModulePresentation.of(3, 0, [])) == PIdeal(0)


def _cokernel_order(rows, p, e):
    # brute-force |coker| by enumerating (Z/p^e)^2 modulo the image
    q = p**e
    image = set()
    for a, b in product(range(q), repeat=2):
        image.add(((rows[0][0] * a + rows[0][1] * b) % q, (rows[1][0] * a + rows[1][1] * b) % q))
    return q * q // len(image)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_fitting_matches_cokernel_count(p):
    rows = [[p, 1], [0, p]]
    M = FiniteModulePresentation.of(p, 2, rows)
    order = _cokernel_order(rows, p, 3)
    assert p ** fitting_ideal(M).valuation == order


def test_saturate_examples():
    p = 3
    assert dvr.saturate([[p, 0]], 2, p) == [[1, 0]]
    assert dvr.lattices_equal(dvr.saturate([[1, 1], [1, -1]], 2, p), [[1, 0], [0, 1]], p)
    assert dvr.saturate([[p, p * p]], 2, p) == [[1, p]]


def test_solve_linear():
    x = dvr.solve_linear([[Fraction(3)]], [Fraction(1)])
    assert x == [Fraction(1, 3)] and not dvr.is_p_integral(x[0], 3)
    assert dvr.solve_linear([[0]], [1]) is dvr.NO_SOLUTION


@given(st.lists(st.lists(small, min_size=5, max_size=5), min_size=5, max_size=5), st.lists(small, min_size=5, max_size=5))
@settings(max_examples=40, deadline=None)
def test_solve_linear_residual(rows, b):
    A = [[Fraction(x) for x in r] for r in rows]
    if dvr.determinant(A) == 0:
        return
    x = dvr.solve_linear(A, b)
    assert dvr.matvec(A, x) == [Fraction(v) for v in b]
