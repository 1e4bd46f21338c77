"""Batch experiments: congruent-pair scans, L-value valuation checks, twisted integrality."""
from __future__ import annotations

import time

from .dvr import INF, valuation
from .errors import CongruaError, EisensteinIdeal, Unsupported
from .lfunc import QuadraticCharacter, _phi_F, adjoint_l_value, classical_ratio, detect_rational
from .modsym.localize import (
    cohomological_congruence_number,
    congruence_number,
    is_free,
    localize_at_eigenform,
    rational_eigenforms,
    sturm_oracle,
)
from .modsym.periods import manin_periods
from .modsym.space import build_space
from .pipeline import block_oracle_valuation, find_eigenform
from .qexp import is_squarefree, prime_factors

# (level, label letter, p): weight-2 rational newforms at non-Eisenstein primes
CLASSICAL_FIXTURES = [
    (11, "a", 3),
    (14, "a", 5),
    (15, "a", 7),
    (17, "a", 5),
    (19, "a", 5),
    (37, "a", 3),
    (78, "a", 5),
    (118, "b", 3),
]

# (level, label letter, real quadratic discriminant)
TWIST_FIXTURES = [
    (11, "a", 5),
    (11, "a", 8),
    (11, "a", 13),
    (14, "a", 5),
    (14, "a", 13),
    (15, "a", 13),
    (17, "a", 5),
    (19, "a", 5),
]


def scan_congruent_pairs(max_level: int = 150, primes=(3, 5, 7), weight: int = 2) -> list:
    """Every pair of rational newforms at squarefree N <= max_level congruent mod some p in primes.

    For each pair and each member, the block is localized and the three
    valuations are compared; pairs outside the supported scope are recorded
    with the reason.
    """
    out = []
    for N in range(1, max_level + 1):
        if not is_squarefree(N):
            continue
        S = build_space(N, weight)
        forms = rational_eigenforms(S)
        for i, f in enumerate(forms):
            for g in forms[i + 1 :]:
                for p in primes:
                    if N % p == 0:
                        continue
                    e = sturm_oracle(f, g, p)
                    if e < 1:
                        continue
                    rec = {"level": N, "p": p, "pair": [f.label, g.label], "pair_valuation": None if e == INF else int(e)}
                    members = []
                    for h in (f, g):
                        try:
                            L = localize_at_eigenform(S, h, p)
                            members.append(
                                {
                                    "label": h.label,
                                    "eta": congruence_number(L).valuation,
                                    "eta_coh": cohomological_congruence_number(L).valuation,
                                    "oracle": int(block_oracle_valuation(L)),
                                    "free": is_free(L),
                                    "rank": L.rank,
                                }
                            )
                        except (EisensteinIdeal, Unsupported) as exc:
                            members.append({"label": h.label, "skipped": exc.kind})
                    rec["members"] = members
                    in_scope = all("skipped" not in m for m in members)
                    rec["in_scope"] = in_scope
                    if in_scope:
                        rec["agree"] = all(m["eta"] == m["eta_coh"] == m["oracle"] for m in members)
                    out.append(rec)
    return out


def classical_check(fixtures=CLASSICAL_FIXTURES, max_denominator: int = 10**6, error: float = 1e-8) -> list:
    """v_p of the rationalized L(Ad f, 1)/(pi^(k+1) Omega+ Omega-) against v_p(eta_coh)."""
    out = []
    for N, letter, p in fixtures:
        start = time.perf_counter()
        rec = {"level": N, "label": letter, "p": p}
        try:
            S, f = find_eigenform(N, 2, letter)
            L = localize_at_eigenform(S, f, p)
            rec["eta_coh_valuation"] = cohomological_congruence_number(L).valuation
            rec["eta_valuation"] = congruence_number(L).valuation
            periods = manin_periods(S, f)
            ratio, res = classical_ratio(f, periods, space=S)
            rec["ratio"] = ratio
            rec["error_bound"] = res.error_bound
            rat = detect_rational(ratio, max_denominator, error)
            rec["rational"] = None if rat is None else list(rat)
            rec["ratio_valuation"] = None if rat is None else valuation(rat[0], p) - valuation(rat[1], p)
            rec["match"] = rat is not None and rec["ratio_valuation"] == rec["eta_coh_valuation"]
        except CongruaError as exc:
            rec.update({"match": False, **exc.to_json()})
        rec["seconds"] = round(time.perf_counter() - start, 2)
        out.append(rec)
    return out


def admissible_primes(N: int, k: int, D: int, bound: int = 50) -> list:
    """Odd primes p <= bound with p > k - 2, p prime to D and to 2 N phi_F(N)."""
    from .qexp import primes_up_to

    bad = 2 * N * _phi_F(N, D) * abs(D)
    return [p for p in primes_up_to(bound) if p > 2 and p > k - 2 and bad % p]


def twisted_integrality(fixtures=TWIST_FIXTURES, bound: int = 50) -> list:
    """Detected L*(Ad f (x) alpha_D) and its valuations at every admissible prime."""
    out = []
    for N, letter, D in fixtures:
        start = time.perf_counter()
        rec = {"level": N, "label": letter, "disc": D}
        try:
            if any(N % q == 0 for q in prime_factors(D)):
                raise ValueError("fixture discriminant must be prime to the level")
            S, f = find_eigenform(N, 2, letter)
            primes = admissible_primes(N, 2, D, bound)
            res = adjoint_l_value(f, QuadraticCharacter.of(D), space=S, periods=manin_periods(S, f), primes=primes)
            rec["normalized"] = res.normalized
            rec["rational"] = None if res.rational is None else list(res.rational)
            rec["valuations"] = {str(p): v for p, v in sorted(res.valuations.items())}
            rec["violations"] = [p for p, v in res.valuations.items() if v < 0]
            rec["ok"] = res.rational is not None and not rec["violations"]
        except CongruaError as exc:
            rec.update({"ok": False, **exc.to_json()})
        rec["seconds"] = round(time.perf_counter() - start, 2)
        out.append(rec)
    return out


def scan_blocks(max_level: int = 150, primes=(3, 5, 7), weight: int = 2) -> dict:
    """Compare eta, eta_coh and the block oracle on every rational newform block."""
    records, skipped = [], {}
    for N in range(1, max_level + 1):
        if not is_squarefree(N):
            continue
        S = build_space(N, weight)
        for f in rational_eigenforms(S):
            for p in primes:
                if N % p == 0:
                    continue
                try:
                    L = localize_at_eigenform(S, f, p)
                    eta = congruence_number(L).valuation
                    coh = cohomological_congruence_number(L).valuation
                except (EisensteinIdeal, Unsupported) as exc:
                    skipped[exc.kind] = skipped.get(exc.kind, 0) + 1
                    continue
                oracle = int(block_oracle_valuation(L))
                records.append(
                    {
                        "level": N,
                        "label": f.label,
                        "p": p,
                        "rank": L.rank,
                        "eta": eta,
                        "eta_coh": coh,
                        "oracle": oracle,
                        "free": is_free(L),
                        "agree": eta == coh == oracle,
                    }
                )
    return {"blocks": records, "skipped": skipped}
