import dataclasses

from hypothesis import given, settings, strategies as st

from congrua import serialize
from congrua.finalg import FiniteFlatAlgebra
from congrua.formalism import CHECKS, run_suites
from congrua.randalg import FAMILIES, random_instance


@given(st.integers(min_value=0, max_value=10**6), st.sampled_from(FAMILIES))
@settings(max_examples=30, deadline=None)
def test_random_instances_are_valid(seed, family):
    inst = random_instance(family, seed, 3)
    inst.order.algebra.validate()
    inst.lam.validate()
    inst.datum.validate()
    inst.module.validate()


def test_small_suite_passes():
    report = run_suites(seed=5, count=4)
    assert report.ok
    assert set(CHECKS) <= set(report.tallies)


def test_zero_count_is_vacuous():
    report = run_suites(seed=1, count=0)
    assert report.ok and not report.counterexamples


def corrupt(inst):
    """Swap in an algebra whose structure constants no longer define a ring."""
    T = inst.order.algebra
    consts = [[list(v) for v in row] for row in T.structure_constants]
    consts[0][0] = [x + 1 for x in consts[0][0]]
    bad = FiniteFlatAlgebra.create(T.p, consts, T.unit, check=False)
    order = dataclasses.replace(inst.order, algebra=bad)
    return dataclasses.replace(inst, order=order)


def test_corrupted_instances_fail_with_counterexample():
    report = run_suites(seed=2, count=2, mutate=corrupt)
    assert not report.ok
    assert report.counterexamples


def test_report_is_deterministic():
    a = serialize.dumps(run_suites(seed=9, count=3).to_json())
    b = serialize.dumps(run_suites(seed=9, count=3).to_json())
    assert a == b
