"""Randomized trials of every schedule guarantee, with rank margins.

Besides pass/fail, reports how far the smallest scaled singular value sits
above the rank tolerance, which is the quantity that decides whether double
precision can certify a schedule at all.
"""
import argparse
import json
import time

import numpy as np

from sampobs import rank_verdict
from sampobs.oracle import (
    REAL_BAND, check_positive_spectrum_trials, check_doubling_trials, check_real_spectrum_trials, check_regular_trials, check_third_order_trials,
    random_instants, random_system,
)


def margin_sweep(trials, seed, band):
    rng = np.random.default_rng(seed)
    margins = []
    for _ in range(trials):
        n = int(rng.integers(2, 6))
        sys_ = random_system(rng, n, real_only=True, allow_opposite=False, moduli=band)
        rep = rank_verdict(sys_, random_instants(rng, 2 * n - 1, 0, 50))
        margins.append(rep.scaled_singular_values[n - 1] / rep.tolerance)
    return float(np.min(margins)), float(np.median(margins))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seeds", default="0,1,2")
    args = ap.parse_args()

    runners = [check_real_spectrum_trials, check_positive_spectrum_trials, check_regular_trials, check_third_order_trials, check_doubling_trials]
    rows = []
    for seed in (int(s) for s in args.seeds.split(",")):
        for fn in runners:
            t0 = time.perf_counter()
            out = fn(trials=args.trials, seed=seed)
            rows.append({"check": out.name, "seed": seed, "trials": out.trials,
                         "failures": len(out.failures), "seconds": round(time.perf_counter() - t0, 3)})
            print(json.dumps(rows[-1]))

    for band in [(0.5, 1.0), REAL_BAND]:
        lo, med = margin_sweep(args.trials, 0, band)
        print(f"moduli {band}: smallest sigma_n / tol = {lo:.3g}, median {med:.3g}")


if __name__ == "__main__":
    main()
