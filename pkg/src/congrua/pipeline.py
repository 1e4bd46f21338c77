"""End-to-end computations shared by the command line, scripts and tests."""
from __future__ import annotations

from .dvr import INF
from .errors import BlockNotFound, CongruaError
from .modsym.localize import (
    cohomological_congruence_number,
    congruence_number,
    extend_eigenvalues,
    localize_at_eigenform,
    rational_eigenforms,
    good_primes,
    working_bound,
)
from .modsym.space import build_space
from .qexp import QExpansionCache, congruence_valuation, primes_up_to


def _valuation_json(v):
    return None if v is None or v == INF else int(v)


def find_eigenform(N: int, k: int, label: str | None = None):
    """(space, eigenform) for the newform with the given label (default: the first)."""
    S = build_space(N, k)
    forms = rational_eigenforms(S)
    if not forms:
        raise BlockNotFound(f"no rational newform at level {N}, weight {k}")
    if label is None:
        return S, forms[0]
    for f in forms:
        if f.label == label or f.label.rsplit(".", 1)[-1] == label:
            return S, f
    raise BlockNotFound(f"no rational newform labelled {label} at level {N}, weight {k}")


def block_oracle_valuation(L) -> int | float:
    """Largest congruence exponent between f and another eigensystem in its block."""
    f = L.form
    primes = good_primes(f.level, working_bound(f.level, f.weight))
    best = 0
    for system in L.eigensystems:
        if all(system[l] == f.eigenvalues[l] for l in primes):
            continue
        best = max(best, congruence_valuation(f.eigenvalues, system, L.p, primes))
    return best


def congruence_summary(S, f, p: int) -> dict:
    """Both congruence numbers, freeness and the q-expansion oracle for one block."""
    from .modsym.localize import is_free

    L = localize_at_eigenform(S, f, p)
    eta = congruence_number(L)
    eta_coh = cohomological_congruence_number(L)
    return {
        "label": f.label,
        "eta_valuation": _valuation_json(eta.valuation),
        "eta_coh_valuation": _valuation_json(eta_coh.valuation),
        "freeness_verified": is_free(L),
        "oracle_valuation": _valuation_json(block_oracle_valuation(L)),
        "block_rank": L.rank,
        "eigensystems": len(L.eigensystems),
    }


def cached_eigenvalues(S, f, bound: int, cache: QExpansionCache | None):
    """Fill f.eigenvalues up to bound, reading and updating the q-expansion cache."""
    if cache is not None:
        a = cache.get(f.level, f.weight, f.label, bound + 1)
        if a is not None:
            for l in primes_up_to(bound):
                f.eigenvalues.setdefault(l, a[l])
    extend_eigenvalues(S, f, bound)
    if cache is not None:
        cache.put(f.level, f.weight, f.label, f.coefficients(bound))
    return f


def refusal(exc: CongruaError) -> dict:
    return {"refused": True, **exc.to_json()}
