"""Integrality of normalized twisted adjoint L-values at admissible primes, plus a prediction report."""
import json
import time

from congrua.experiments import twisted_integrality
from congrua.lfunc import congruence_prime_report
from congrua.pipeline import find_eigenform


def main():
    start = time.perf_counter()
    rows = twisted_integrality()
    for rec in rows:
        print(json.dumps(rec, sort_keys=True))
    S, f = find_eigenform(14, 2, "a")
    report = congruence_prime_report(f, [13, -3, 21], [5, 7, 17], space=S)
    print(json.dumps(report, sort_keys=True))
    print(json.dumps({"fixtures": len(rows), "ok": sum(r["ok"] for r in rows), "seconds": round(time.perf_counter() - start, 1)}))


if __name__ == "__main__":
    main()
