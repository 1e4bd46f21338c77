"""Run the randomized algebra property suites and print the JSON report."""
import argparse
import sys

from congrua import serialize
from congrua.cli import cmd_verify_formalism


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--prime", type=int, default=3)
    args = ap.parse_args()
    code, doc = cmd_verify_formalism(args.seed, args.count, args.prime)
    sys.stdout.write(serialize.dumps(doc))
    return code


if __name__ == "__main__":
    sys.exit(main())
