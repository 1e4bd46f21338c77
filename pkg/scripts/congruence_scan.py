"""Scan squarefree levels for congruent rational newforms and compare the three valuations."""
import argparse
import json
import time

from congrua.experiments import scan_blocks, scan_congruent_pairs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-level", type=int, default=150)
    ap.add_argument("--prime", type=int, action="append", help="default: 3, 5, 7")
    args = ap.parse_args()
    primes = tuple(args.prime or (3, 5, 7))
    start = time.perf_counter()
    pairs = scan_congruent_pairs(args.max_level, primes)
    for rec in pairs:
        print(json.dumps(rec, sort_keys=True))
    blocks = scan_blocks(args.max_level, primes)
    bad = [b for b in blocks["blocks"] if not b["agree"]]
    print(
        json.dumps(
            {
                "pairs": len(pairs),
                "pairs_in_scope": sum(r["in_scope"] for r in pairs),
                "pairs_disagreeing": sum(1 for r in pairs if r["in_scope"] and not r["agree"]),
                "blocks": len(blocks["blocks"]),
                "blocks_disagreeing": bad,
                "blocks_skipped": blocks["skipped"],
                "seconds": round(time.perf_counter() - start, 1),
            },
            sort_keys=True,
        )
    )


if __name__ == "__main__":
    main()
