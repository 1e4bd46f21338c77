"""Command-line interface: ``congrua <command> [flags]``.

Every command prints (or writes to --out) one JSON document with a top-level
``"schema": 1``. Exit codes: 0 success, 1 a property check failed, 2 the
request was refused or could not be completed.
"""
from __future__ import annotations

import argparse
import sys

from . import serialize
from .errors import CongruaError, HypothesisViolation
from .formalism import run_suites
from .lfunc import DEFAULT_BUDGET, QuadraticCharacter, adjoint_l_value, congruence_prime_report
from .pipeline import cached_eigenvalues, congruence_summary, find_eigenform, refusal
from .qexp import QExpansionCache

SCHEMA = 1


def _doc(command: str, body: dict) -> dict:
    return {"schema": SCHEMA, "command": command, **body}


def _validate_level(N: int, k: int):
    if N < 1:
        raise HypothesisViolation(f"level {N} must be positive", "the level N is a positive integer")
    if k < 2 or k % 2:
        raise HypothesisViolation(f"weight {k} must be even and at least 2", "the weight k is even and at least 2")


def cmd_verify_formalism(seed: int, count: int, p: int = 3, mutate=None):
    """(exit code, report) for the randomized algebra suites."""
    report = run_suites(seed, count, p=p, mutate=mutate)
    return (0 if report.ok else 1), _doc("verify-formalism", report.to_json())


def cmd_congruence_number(N: int, k: int, p: int, label: str | None = None):
    try:
        _validate_level(N, k)
        S, f = find_eigenform(N, k, label)
        body = {"level": N, "weight": k, "prime": p, **congruence_summary(S, f, p)}
        return 0, _doc("congruence-number", body)
    except CongruaError as exc:
        return 2, _doc("congruence-number", {"level": N, "weight": k, "prime": p, **refusal(exc)})


def cmd_adjoint_lvalue(N: int, k: int, D: int, primes, budget: int = DEFAULT_BUDGET, precision: float = 1e-12, label=None, cache=None):
    from .modsym.periods import manin_periods

    head = {"level": N, "weight": k, "disc": D, "primes": list(primes)}
    try:
        _validate_level(N, k)
        alpha = QuadraticCharacter.of(D)
        S, f = find_eigenform(N, k, label)
        if cache is not None:
            cached_eigenvalues(S, f, 100, cache)
        periods = manin_periods(S, f) if (k == 2 and D > 0) else None
        res = adjoint_l_value(f, alpha, precision, budget, space=S, periods=periods, primes=list(primes))
        if cache is not None:
            cached_eigenvalues(S, f, res.terms, cache)
        body = {**head, "label": f.label, **res.to_json()}
        if periods is None:
            body["note"] = "normalized value unavailable: periods are computed for weight two and real quadratic twists only"
        return 0, _doc("adjoint-lvalue", body)
    except CongruaError as exc:
        return 2, _doc("adjoint-lvalue", {**head, **refusal(exc)})


def cmd_base_change_report(N: int, k: int, discs, primes, budget: int = DEFAULT_BUDGET, precision: float = 1e-12, label=None):
    head = {"level": N, "weight": k}
    try:
        _validate_level(N, k)
        S, f = find_eigenform(N, k, label)
        rep = congruence_prime_report(f, list(discs), list(primes), space=S, target_error=precision, budget=budget)
        return 0, _doc("base-change-report", {**head, **rep})
    except CongruaError as exc:
        return 2, _doc("base-change-report", {**head, **refusal(exc)})


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="congrua", description="Congruence modules, modular symbols and adjoint L-values.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write JSON here instead of stdout")
        sp.add_argument("--cache", help="q-expansion cache file (JSON lines); CONGRUA_CACHE overrides")
        return sp

    vf = common(sub.add_parser("verify-formalism", help="run the randomized algebra property suites"))
    vf.add_argument("--seed", type=int, default=1)
    vf.add_argument("--count", type=int, default=200)
    vf.add_argument("--prime", type=int, default=3)

    cn = common(sub.add_parser("congruence-number", help="congruence numbers of a rational newform at p"))
    cn.add_argument("--level", type=int, required=True)
    cn.add_argument("--weight", type=int, default=2)
    cn.add_argument("--prime", type=int, required=True)
    cn.add_argument("--label", help="newform label or letter (default: the first)")

    al = common(sub.add_parser("adjoint-lvalue", help="L(Ad f x alpha_D, 1) and its normalization"))
    al.add_argument("--level", type=int, required=True)
    al.add_argument("--weight", type=int, default=2)
    al.add_argument("--disc", type=int, default=1)
    al.add_argument("--prime", type=int, action="append", default=[])
    al.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    al.add_argument("--precision", type=float, default=1e-12)
    al.add_argument("--label")

    bc = common(sub.add_parser("base-change-report", help="predicted non-base-change congruence primes"))
    bc.add_argument("--level", type=int, required=True)
    bc.add_argument("--weight", type=int, default=2)
    bc.add_argument("--disc", type=int, action="append", required=True)
    bc.add_argument("--prime", type=int, action="append", required=True)
    bc.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    bc.add_argument("--precision", type=float, default=1e-12)
    bc.add_argument("--label")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cache = QExpansionCache(args.cache) if (args.cache or _env_cache()) else None
    if args.command == "verify-formalism":
        code, doc = cmd_verify_formalism(args.seed, args.count, args.prime)
    elif args.command == "congruence-number":
        code, doc = cmd_congruence_number(args.level, args.weight, args.prime, args.label)
    elif args.command == "adjoint-lvalue":
        code, doc = cmd_adjoint_lvalue(args.level, args.weight, args.disc, args.prime, args.budget, args.precision, args.label, cache)
    else:
        code, doc = cmd_base_change_report(args.level, args.weight, args.disc, args.prime, args.budget, args.precision, args.label)
    text = serialize.dumps(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def _env_cache():
    import os

    return os.environ.get("CONGRUA_CACHE")


if __name__ == "__main__":
    sys.exit(main())
