"""Sensitivity of the strip certification to the cutoff amplitude c.

For each corpus domain and each c, runs the default delta ladder
(1e-2 ... 1e-5, 7 rungs, 2000 samples, seed 0, unit normalization) and
prints the fitted slope, the target 2*epsilon and the number of sampled
strip points with a non-positive smallest Levi eigenvalue.

Usage: python scripts/c_sweep.py [c ...]   (default: 1/32 1/16 1/8 1/4 1/2)
"""

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from levigauge import WeightFamily, WeightParams, load_domain
from levigauge.index import frac_str
from levigauge.verify import run_verification

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ["ball", "bis_2_3", "bis_2_2_2", "bis_2_3_4", "c4"]
DELTAS = np.logspace(-2, -5, 7)


def main(argv):
    cs = [Fraction(a) for a in argv] or [Fraction(1, 32), Fraction(1, 16), Fraction(1, 8), Fraction(1, 4), Fraction(1, 2)]
    print(f"{'domain':<10} {'c':>5} {'slope':>8} {'target':>7} {'nonpos':>7}  passed")
    for name in CORPUS:
        vd = load_domain(ROOT / "corpus" / f"{name}.json")
        for c in cs:
            wf = WeightFamily(vd, WeightParams(c=float(c)))
            rep = run_verification(wf, DELTAS, 2000, seed=0, psh_samples=200)
            slope = "-" if rep.fit is None else f"{rep.fit.slope:.4f}"
            nonpos = sum(s.n_nonpositive for s in rep.per_delta)
            print(f"{name:<10} {frac_str(c):>5} {slope:>8} {frac_str(rep.target_slope):>7} {nonpos:>7}  {rep.passed}")


if __name__ == "__main__":
    main(sys.argv[1:])
