"""Acceptance criteria: each test records one PASS/FAIL line, shown in the terminal summary."""
import time

from congrua.cli import cmd_verify_formalism
from congrua.cotangent import defect_via_cotangent_complex, wiles_defect
from congrua.dvr import PIdeal
from congrua.experiments import classical_check, scan_blocks, scan_congruent_pairs, twisted_integrality
from congrua.formalism import CHECKS, run_suites
from congrua.modsym import build_space
from congrua.modsym.localize import extend_eigenvalues, rational_eigenforms
from congrua.presentations import standard_fixtures
from congrua.qexp import delta_coefficients, dim_cusp_forms, newform_coefficients
from congrua import serialize

from conftest import ACCEPTANCE_LINES

FORMALISM_COUNT = 200
FORMALISM_SECONDS = 120
MODSYM_SECONDS = 5 * 60
CROSS_ORACLE_SECONDS = 30 * 60
CLASSICAL_SECONDS = 15 * 60
CLASSICAL_MIN_FIXTURES = 5
DETECTION_ERROR = 1e-8
MAX_DENOMINATOR = 10**6


def record(name, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    print(ACCEPTANCE_LINES[-1])
    return ok


def test_formalism_suites():
    start = time.perf_counter()
    report = run_suites(seed=1, count=FORMALISM_COUNT)
    secs = time.perf_counter() - start
    failed = {c: t.failed for c, t in report.tallies.items() if t.failed}
    ok = report.ok and set(CHECKS) <= set(report.tallies) and secs < FORMALISM_SECONDS
    checked = sum(t.passed for t in report.tallies.values())
    assert record("formalism_suites", ok, f"{checked} checks passed, failures {failed or 0}, {secs:.0f}s (limit {FORMALISM_SECONDS}s)")


def test_wiles_defect_double_computation():
    start = time.perf_counter()
    mismatches, glue = [], []
    for p in (3, 5, 7):
        for name, O, P, expected in standard_fixtures(p):
            for j in range(O.n):
                lam = O.projection_character(j)
                a = wiles_defect(O.algebra, lam)
                b = defect_via_cotangent_complex(P, lam).defect
                if a != b or (expected is not None and a != PIdeal(expected)):
                    mismatches.append((p, name, j, str(a), str(b)))
                if name == "triple_glue":
                    glue.append(a == PIdeal(1))
    ok = not mismatches and glue and all(glue)
    secs = time.perf_counter() - start
    assert record("wiles_defect", ok, f"mismatches {mismatches or 0}, triple glue defect 1 on {sum(glue)}/{len(glue)} characters, {secs:.1f}s")


def test_modular_symbols_regression():
    start = time.perf_counter()
    bad = [(N, k) for k in (2, 4, 6) for N in range(1, 101) if build_space(N, k).cuspidal_dimension != 2 * dim_cusp_forms(N, k)]
    S = build_space(11, 2)
    f = rational_eigenforms(S)[0]
    extend_eigenvalues(S, f, 20)
    ok11 = f.coefficients(20) == newform_coefficients(11, 21)
    D = build_space(1, 12)
    g = rational_eigenforms(D)[0]
    extend_eigenvalues(D, g, 20)
    ok1 = g.coefficients(20) == delta_coefficients(21)
    secs = time.perf_counter() - start
    ok = not bad and ok11 and ok1 and secs < MODSYM_SECONDS
    assert record("modsym_regression", ok, f"dimension mismatches {bad or 0} over N<=100, k in (2,4,6); eta(q)^2 eta(q^11)^2 {ok11}; Delta {ok1}; {secs:.0f}s")


def test_congruence_cross_oracle():
    start = time.perf_counter()
    pairs = scan_congruent_pairs(150, (3, 5, 7))
    in_scope = [r for r in pairs if r["in_scope"]]
    disagree = [r for r in in_scope if not r["agree"]]
    blocks = scan_blocks(150, (3, 5, 7))
    bad_blocks = [(b["label"], b["p"]) for b in blocks["blocks"] if not b["agree"]]
    secs = time.perf_counter() - start
    ok = bool(in_scope) and not disagree and not bad_blocks and secs < CROSS_ORACLE_SECONDS
    assert record(
        "congruence_cross_oracle",
        ok,
        f"{len(pairs)} congruent pairs, {len(in_scope)} in scope, {len(disagree)} disagree; "
        f"{len(blocks['blocks'])} blocks, {len(bad_blocks)} disagree, skipped {blocks['skipped']}; {secs:.0f}s",
    )


def test_classical_numeric_check():
    start = time.perf_counter()
    recs = classical_check(max_denominator=MAX_DENOMINATOR, error=DETECTION_ERROR)
    matched = [f"{r['level']}{r['label']}@{r['p']}" for r in recs if r["match"]]
    missed = [f"{r['level']}{r['label']}@{r['p']}" for r in recs if not r["match"]]
    secs = time.perf_counter() - start
    ok = len(matched) >= CLASSICAL_MIN_FIXTURES and not missed and secs < CLASSICAL_SECONDS
    assert record("classical_valuations", ok, f"{len(matched)}/{len(recs)} fixtures match (need {CLASSICAL_MIN_FIXTURES}), missed {missed or 0}, {secs:.0f}s")


def test_twisted_integrality():
    recs = twisted_integrality()
    bad = [(r["level"], r["disc"], r.get("violations", r.get("error"))) for r in recs if not r["ok"]]
    checked = sum(len(r.get("valuations", {})) for r in recs)
    ok = bool(recs) and not bad
    assert record("twisted_integrality", ok, f"{len(recs)} fixtures, {checked} (fixture, p) valuations checked, violations {bad or 0}")


def test_determinism():
    a = serialize.dumps(cmd_verify_formalism(11, 20)[1])
    b = serialize.dumps(cmd_verify_formalism(11, 20)[1])
    ok = a.encode() == b.encode()
    assert record("determinism", ok, f"two seeded runs, {len(a)} bytes, identical {ok}")
