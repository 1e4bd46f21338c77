from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from congrua.errors import EisensteinIdeal, HypothesisViolation, Unsupported
from congrua.modsym import build_space
from congrua.modsym.localize import (
    cohomological_congruence_number,
    congruence_number,
    extend_eigenvalues,
    is_free,
    localize_at_eigenform,
    rational_eigenforms,
    sturm_oracle,
)
from congrua.modsym.p1 import P1, heilbronn_cremona, merel_matrices
from congrua.modsym.periods import manin_periods
from congrua.qexp import delta_coefficients, dim_cusp_forms, newform_coefficients, primes_up_to


@pytest.mark.parametrize("N", [1, 2, 11, 12, 30, 97])
def test_p1_size(N):
    # |P^1(Z/N)| = index of Gamma0(N)
    from congrua.qexp import gamma0_index

    assert len(P1(N).reps) == gamma0_index(N)


@pytest.mark.parametrize("N,k", [(11, 2), (37, 2), (23, 4), (13, 6), (1, 12)])
def test_heilbronn_matches_merel(N, k):
    S = build_space(N, k)
    for l in (2, 3, 5):
        if N % l == 0:
            continue
        A = S._matrix_from(lambda s: S.act(s, merel_matrices(l)))
        B = S._matrix_from(lambda s: S.act(s, heilbronn_cremona(l)))
        assert A == B


@pytest.mark.parametrize("N,k", [(11, 2), (23, 2), (30, 2), (11, 4), (1, 12), (20, 6)])
def test_dimension_oracle(N, k):
    assert build_space(N, k).cuspidal_dimension == 2 * dim_cusp_forms(N, k)


@pytest.mark.parametrize("N", [11, 37, 43])
def test_hecke_commute_and_star_equivariant(N):
    S = build_space(N, 2)
    ops = [S.hecke_operator(l) for l in (2, 3, 5, 7) if N % l]
    star = S.star_involution
    for A in ops:
        assert A * star == star * A
        for B in ops:
            assert A * B == B * A


def test_eigenvalues_match_eta_products():
    S = build_space(11, 2)
    f = rational_eigenforms(S)[0]
    extend_eigenvalues(S, f, 50)
    assert f.coefficients(50) == newform_coefficients(11, 51)
    D = build_space(1, 12)
    g = rational_eigenforms(D)[0]
    extend_eigenvalues(D, g, 20)
    assert g.coefficients(20) == delta_coefficients(21)


def test_hecke_recursion_at_prime_powers():
    S = build_space(37, 2)
    f = rational_eigenforms(S)[0]
    extend_eigenvalues(S, f, 30)
    a = f.coefficients(30)
    assert a[4] == a[2] ** 2 - 2 and a[8] == a[2] * a[4] - 2 * a[2]
    assert a[6] == a[2] * a[3]


def test_path_eigenvalues_agree_with_hecke_matrices():
    S = build_space(43, 2)
    f = rational_eigenforms(S)[0]
    extend_eigenvalues(S, f, 60)
    v = [Fraction(x) for x in f.plus]
    for l in primes_up_to(60):
        if 43 % l == 0:
            continue
        M = S.hecke_operator(l)
        image = [sum(int(M[i, j]) * v[j] for j in range(len(v))) for i in range(len(v))]
        assert image == [f.eigenvalues[l] * x for x in v]


def test_single_form_block():
    S = build_space(11, 2)
    f = rational_eigenforms(S)[0]
    L = localize_at_eigenform(S, f, 3)
    assert congruence_number(L).valuation == 0
    assert cohomological_congruence_number(L).valuation == 0
    assert is_free(L)


def test_congruent_pair_block():
    S = build_space(118, 2)
    forms = {f.label: f for f in rational_eigenforms(S)}
    f, g = forms["118.2.b"], forms["118.2.c"]
    assert sturm_oracle(f, g, 3) == 1
    L = localize_at_eigenform(S, f, 3)
    assert L.rank == 2
    assert congruence_number(L).valuation == cohomological_congruence_number(L).valuation == 1
    assert is_free(L)


def test_eisenstein_refusals():
    S = build_space(11, 2)
    with pytest.raises(EisensteinIdeal):
        localize_at_eigenform(S, rational_eigenforms(S)[0], 5)
    D = build_space(1, 12)
    with pytest.raises(EisensteinIdeal):
        localize_at_eigenform(D, rational_eigenforms(D)[0], 691)


@pytest.mark.parametrize("p", [2, 11, 9])
def test_standing_hypotheses(p):
    S = build_space(11, 2)
    with pytest.raises(HypothesisViolation):
        localize_at_eigenform(S, rational_eigenforms(S)[0], p)


def test_irrational_block_unsupported():
    S = build_space(142, 2)
    f = next(f for f in rational_eigenforms(S) if f.label == "142.2.a")
    with pytest.raises(Unsupported):
        localize_at_eigenform(S, f, 3)


def test_periods_converge_and_rescale():
    S = build_space(11, 2)
    f = rational_eigenforms(S)[0]
    a = manin_periods(S, f, precision=1e-10)
    b = manin_periods(S, f, precision=1e-13)
    assert abs(a.omega_plus - b.omega_plus) < 1e-10 * abs(b.omega_plus)
    assert abs(a.omega_minus - b.omega_minus) < 1e-10 * abs(b.omega_minus)
    # the real lattice period of the curve 11a is 2 pi times the generator of the minus line
    assert abs(b.omega_minus * 2 * 3.141592653589793 * 2 - 1.269209304279553) < 1e-9


@given(st.integers(min_value=1, max_value=60), st.integers(min_value=0, max_value=59))
@settings(max_examples=50, deadline=None)
def test_p1_index_is_unit_invariant(N, c):
    P = P1(N)
    from math import gcd

    for d in range(N):
        i = P.index(c, d)
        if i < 0:
            continue
        for u in range(1, N):
            if gcd(u, N) == 1:
                assert P.index(u * c, u * d) == i
