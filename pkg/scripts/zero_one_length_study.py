"""How the 0-1 chaos score of a quasi-periodic wave crest factor depends on series length.

Smooth quasi-periodic signals score near 0 at any length; crest factors of
standing waves are non-smooth in time (the maximiser jumps) and score high
until the series is long.  This is why classification is opt-in per scenario.
"""

import argparse

import numpy as np

from crestfactor.classifier import zero_one_test
from crestfactor.oracles import WaveMode, wave_crest


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lengths", type=int, nargs="+", default=[2000, 5000, 20000])
    ap.add_argument("--dt", type=float, default=0.05)
    ap.add_argument("--N", type=int, default=32)
    args = ap.parse_args()

    modes = [WaveMode(1.0, (1, 0)), WaveMode(0.6, (1, 1), 0.3), WaveMode(0.4, (2, 1), 1.1)]
    n_max = max(args.lengths)
    t = np.arange(n_max) * args.dt
    cf = np.array([wave_crest(modes, float(s), args.N) for s in t])
    smooth = np.sin(t) + 0.5 * np.sin(np.sqrt(2) * t)
    print(f"{'samples':>8s} {'K(crest)':>9s} {'K(smooth)':>10s}")
    for n in args.lengths:
        print(f"{n:8d} {zero_one_test(cf[:n]):9.3f} {zero_one_test(smooth[:n]):10.3f}")


if __name__ == "__main__":
    main()
