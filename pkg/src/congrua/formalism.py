"""Randomized property suites for the congruence-module identities.

Each generated instance is run through every check; a check either passes,
fails (with a serialized counterexample) or is skipped because its hypotheses
do not hold for that instance.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import dvr, serialize
from .cotangent import LCIVerdict, c1_sequence_ideals, lci_criterion
from .finalg import (
    AlgebraModule,
    base_change_lattice,
    check_bc_factorization,
    check_hida_factorization,
    check_linear_bc,
    congruence_lattices,
    duality_transfer,
    eta,
    eta_module,
    idempotent_for_character,
)
from .randalg import FAMILIES, random_instance

CHECKS = (
    "eta_definitions",
    "bc_congruence",
    "pontryagin",
    "lci_inclusion",
    "hida_factorization",
    "c1_exact_sequence",
    "linear_bc",
)


@dataclass
class CheckTally:
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    strong: int = 0  # instances where the stronger (equality / rank-one) form was asserted

    def to_json(self):
        return {"passed": self.passed, "failed": self.failed, "skipped": self.skipped, "strong_form": self.strong}


@dataclass
class SuiteReport:
    seed: int
    count: int
    p: int
    tallies: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(t.failed == 0 for t in self.tallies.values())

    def to_json(self):
        return {
            "seed": self.seed,
            "count_per_family": self.count,
            "p": self.p,
            "checks": {f: {c: t.to_json() for c, t in sorted(ch.items())} for f, ch in sorted(self.tallies_by_family.items())},
            "totals": {c: t.to_json() for c, t in sorted(self.tallies.items())},
            "counterexamples": self.counterexamples,
            "ok": self.ok,
        }

    tallies_by_family: dict = field(default_factory=dict)


def _check_instance(inst):
    """Yield (check, status, strong, detail) for one instance; status in pass/fail/skip."""
    T, lam, D, M = inst.order.algebra, inst.lam, inst.datum, inst.module

    e1 = eta(T, lam)
    e2 = eta_module(AlgebraModule.regular(T), lam)
    yield "eta_definitions", e1 == e2, True, {"eta": e1.to_json(), "fitting_c0": e2.to_json()}

    for mod in (M, AlgebraModule.regular(T)):
        r = check_bc_factorization(D, mod)
        yield "bc_congruence", r.holds, True, r.to_json()

    f1, f2, f3 = duality_transfer(inst.pairing, lam, require_rank_one=False)
    ok = f1 == f2 and (f3 is None or f3 == f1)
    yield "pontryagin", ok, f3 is not None, {"fitt1": f1.to_json(), "fitt2": f2.to_json(), "pairing": None if f3 is None else f3.to_json()}

    lci = lci_criterion(T, lam)
    yield "lci_inclusion", lci.inclusion_holds, lci.verdict is LCIVerdict.COMPLETE_INTERSECTION, lci.to_json()

    h = check_hida_factorization(D)
    if h.applicable:
        yield "hida_factorization", h.holds, h.equality_expected, h.to_json()
    else:
        yield "hida_factorization", None, False, h.to_json()

    target_ci = lci_criterion(D.target, D.lam).verdict is LCIVerdict.COMPLETE_INTERSECTION
    if target_ci and D.is_surjective:
        r = c1_sequence_ideals(D)
        yield "c1_exact_sequence", r.holds, True, r.to_json()
    else:
        yield "c1_exact_sequence", None, False, {}

    if inst.rank_one:
        rng = random.Random(f"linear-bc:{inst.family}:{inst.seed}")
        nt = base_change_lattice(D, M.dual())
        coeffs = [Fraction(rng.randint(-3, 3)) for _ in nt]
        phi = [sum((c * b[i] for c, b in zip(coeffs, nt)), Fraction(0)) for i in range(M.rank)]
        e_lp = idempotent_for_character(T, D.lam_prime)
        lower = congruence_lattices(M, e_lp)[1]
        k = rng.choice([1, 2, inst.p, 1 + inst.p])
        delta = [k * x for x in lower[0]]
        r = check_linear_bc(D, M, phi, delta)
        yield "linear_bc", r.holds, r.phi_of_delta_valuation != dvr.INF, r.to_json()
    else:
        yield "linear_bc", None, False, {}


def run_suites(seed: int, count: int, p: int = 3, families=FAMILIES, mutate=None) -> SuiteReport:
    """Run every check on ``count`` instances per family.

    ``mutate`` (test harness only) may replace an instance before checking.
    """
    start = time.perf_counter()
    report = SuiteReport(seed, count, p)
    report.tallies = {c: CheckTally() for c in CHECKS}
    for fam in families:
        fam_t = {c: CheckTally() for c in CHECKS}
        report.tallies_by_family[fam] = fam_t
        for i in range(count):
            inst_seed = seed * 1_000_003 + i
            inst = random_instance(fam, inst_seed, p)
            if mutate is not None:
                inst = mutate(inst)
            try:
                results = list(_check_instance(inst))
            except Exception as exc:  # any exception is a failed instance
                results = [("exception", False, False, {"error": f"{type(exc).__name__}: {exc}"})]
            for check, status, strong, detail in results:
                tallies = [fam_t.get(check), report.tallies.get(check)]
                if check == "exception":
                    tallies = [fam_t.setdefault(check, CheckTally()), report.tallies.setdefault(check, CheckTally())]
                for t in tallies:
                    if status is None:
                        t.skipped += 1
                    elif status:
                        t.passed += 1
                        t.strong += int(bool(strong))
                    else:
                        t.failed += 1
                if status is False:
                    report.counterexamples.append(
                        {
                            "family": fam,
                            "seed": inst_seed,
                            "check": check,
                            "detail": detail,
                            "datum": serialize.datum_to_json(inst.datum, seed=inst_seed),
                            "character_index": inst.lam_index,
                        }
                    )
    report.seconds = time.perf_counter() - start
    return report
