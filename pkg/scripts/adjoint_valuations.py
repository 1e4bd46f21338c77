"""Compare v_p of rationalized adjoint L-values with the cohomological congruence number."""
import json
import time

from congrua.experiments import classical_check


def main():
    start = time.perf_counter()
    rows = classical_check()
    for rec in rows:
        print(json.dumps(rec, sort_keys=True))
    print(json.dumps({"fixtures": len(rows), "matches": sum(r["match"] for r in rows), "seconds": round(time.perf_counter() - start, 1)}))


if __name__ == "__main__":
    main()
