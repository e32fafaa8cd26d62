"""Calibrate the interpolation constants for a few (n, d, N) and store them in the cache."""

import argparse
import math

from crestfactor.crest import GniConstants


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--L", type=float, default=2 * math.pi)
    ap.add_argument("--cache")
    args = ap.parse_args()

    consts = GniConstants.load(args.cache)
    for n, d, N in ((1, 1, 64), (2, 1, 64), (2, 2, 32), (2, 3, 16)):
        c = consts.get(n, d, args.L, N, samples=args.samples)
        print(f"n={n} d={d} N={N}: c = {c:.5f}")
    print(f"cache: {consts.path}")


if __name__ == "__main__":
    main()
