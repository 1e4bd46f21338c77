import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from congrua.errors import ConditionViolated, NotPrimitive, PoleHit, SlowConvergence, UnsupportedLocalType
from congrua.lfunc import (
    QuadraticCharacter,
    SelfDualLSeries,
    adjoint_coefficients,
    adjoint_l_value,
    congruence_prime_report,
    detect_rational,
    gamma_C,
    gamma_R,
    gamma_factor,
    gauss_sum,
    is_fundamental_discriminant,
    kronecker,
    local_type,
)
from congrua.modsym.periods import manin_periods
from congrua.pipeline import find_eigenform


def test_gamma_factor_closed_forms():
    assert gamma_factor(2, 1, 1) == pytest.approx(1 / (2 * math.pi**3), rel=1e-14)
    assert float(gamma_C(1)) == pytest.approx(1 / math.pi, rel=1e-15)
    with pytest.raises(PoleHit):
        gamma_factor(2, 0, 0)


@pytest.mark.parametrize("s", [0.5, 1, 2, 3.5])
def test_duplication(s):
    assert abs(gamma_C(s) - gamma_R(s) * gamma_R(s + 1)) < 1e-12


def test_gauss_sums():
    assert gauss_sum(QuadraticCharacter.of(5)) == pytest.approx(math.sqrt(5), abs=1e-12)
    assert gauss_sum(QuadraticCharacter.of(-3)) == pytest.approx(1j * math.sqrt(3), abs=1e-12)
    assert gauss_sum(QuadraticCharacter.of(1)) == 1
    with pytest.raises(NotPrimitive):
        QuadraticCharacter.of(12 * 9)


def test_gauss_sum_products():
    for D in range(-200, 201):
        if D == 0 or not is_fundamental_discriminant(D):
            continue
        a = QuadraticCharacter.of(D)
        g = gauss_sum(a)
        # a is real, so conj(a) = a
        assert abs(g * g - a(-1) * abs(D)) < 1e-10


@given(st.integers(min_value=-400, max_value=400), st.integers(min_value=1, max_value=300), st.integers(min_value=1, max_value=300))
@settings(max_examples=200, deadline=None)
def test_kronecker_is_multiplicative(D, m, n):
    if D % 4 in (2, 3):
        return
    assert kronecker(D, m * n) == kronecker(D, m) * kronecker(D, n)


def test_detect_rational():
    assert detect_rational(0.5 + 1e-12, 10**6, 1e-9) == (1, 2)
    assert detect_rational(math.pi, 10**3, 1e-9) is None
    assert detect_rational(22 / 7 + 1e-13, 10**6, 1e-9) == (22, 7)


def test_local_types():
    assert local_type(11, 2, 11, 1) == "special"
    assert local_type(15, 4, 3, 4) == "principal"
    with pytest.raises(UnsupportedLocalType):
        local_type(18, 2, 3, 0)
    with pytest.raises(UnsupportedLocalType):
        local_type(15, 4, 3, 0)


def test_adjoint_coefficients_11a():
    _, f = find_eigenform(11, 2)
    a = adjoint_coefficients(f, QuadraticCharacter(1), 12)
    # unramified: a_l(Ad) = a_l^2 / l - 1; special at 11: 1/11
    assert a[2] == pytest.approx(4 / 2 - 1)
    assert a[3] == pytest.approx(1 / 3 - 1)
    assert a[11] == pytest.approx(1 / 11)
    assert a[6] == pytest.approx(a[2] * a[3])


def test_generic_engine_on_dirichlet_l_function():
    # L(s, chi_-4): degree 1, odd (mu = 1), conductor 4, sign +1
    N = 60
    series = SelfDualLSeries([0.0] + [float(kronecker(-4, n)) for n in range(1, N + 1)], [1], 1, 4)
    eps, residual = series.root_number()
    assert eps == 1 and residual < 1e-10
    assert series.value(1, eps, N)[0] == pytest.approx(math.pi / 4, rel=1e-12)
    assert series.value(2, eps, N)[0] == pytest.approx(float(mpmath.catalan), rel=1e-12)


@pytest.fixture(scope="module")
def form11():
    S, f = find_eigenform(11, 2)
    return S, f, manin_periods(S, f)


def test_trivial_twist_11a(form11):
    S, f, periods = form11
    res = adjoint_l_value(f, space=S, periods=periods, primes=[3])
    assert res.rational == (8, 11)
    assert res.valuations[3] == 0
    assert res.root_number == 1 and res.symmetry_residual < 1e-8
    assert abs(res.normalized - 8 / 11) < res.error_bound + 1e-10


def test_budget_doubling_is_stable(form11):
    S, f, _ = form11
    a = adjoint_l_value(f, space=S, target_error=1e-12)
    series_terms = a.terms
    b = adjoint_l_value(f, space=S, target_error=1e-14)
    assert b.terms > series_terms
    assert abs(a.value - b.value) < 1e-11


def test_refusals(form11):
    S, f, _ = form11
    with pytest.raises(ConditionViolated):
        adjoint_l_value(f, QuadraticCharacter.of(33), space=S)
    with pytest.raises(SlowConvergence):
        adjoint_l_value(f, QuadraticCharacter.of(5), space=S, budget=50)


def test_report_entries(form11):
    S, f, periods = form11
    rep = congruence_prime_report(f, [5, -4, 33, 6], [3, 5], space=S, periods=periods)
    by_disc = {e["disc"]: e for e in rep["entries"]}
    assert by_disc[5]["status"] == "DETECTED"
    flags = {x["p"]: x["flag"] for x in by_disc[5]["predictions"]}
    assert flags[5] == "ConditionViolated"
    assert by_disc[-4]["status"] == "RAW_ONLY"
    assert by_disc[33]["error"] == "ConditionViolated"
    assert by_disc[6]["error"] == "NotPrimitive"


def test_predicted_prime():
    S, f = find_eigenform(14, 2)
    rep = congruence_prime_report(f, [13], [17], space=S)
    (entry,) = rep["entries"]
    assert entry["rational"] == {"num": -816, "den": 91}
    assert entry["predictions"][0]["flag"] == "PREDICTED"
