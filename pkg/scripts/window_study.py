"""Empirical 'arbitrary samples' thresholds on small windows.

For each system and window length T, enumerate subsets of [0, T-1] and report
the smallest k such that every k-subset has full rank, next to the bound the
theory predicts for that family.
"""
import argparse

from sampobs import Eigenvalue, SystemSpec
from sampobs.oracle import min_samples_in_window, worst_case_system
from sampobs.scheduler import opposite_sign_members

CASES = {
    "opposite pair {0.5,-0.5}": (SystemSpec.diagonal([0.5, -0.5]), lambda T: 1 + -(-T // 2)),
    "free pair {0.3,0.6}": (SystemSpec.diagonal([0.3, 0.6]), lambda T: 2),
    "cube roots of 0.343": (worst_case_system(3, 0.343), lambda T: 1 + -(-2 * T // 3)),
    "{0.5,-0.5,0.9}": (SystemSpec.diagonal([0.5, -0.5, 0.9]), lambda T: -(-(2 + T) // 2)),
    "{+-0.5,+-0.7}": (SystemSpec.diagonal([0.5, -0.5, 0.7, -0.7]), lambda T: -(-(4 + T) // 2)),
    "conjugate sixth turn + 0.4": (
        SystemSpec.diagonal([Eigenvalue.exact(0.8, 1, 6), Eigenvalue.exact(0.8, -1, 6), 0.4]), None),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--windows", default="6,8,10,12,16", help="comma-separated window lengths")
    ap.add_argument("--cap", type=int, default=2000)
    args = ap.parse_args()
    windows = [int(x) for x in args.windows.split(",")]

    print(f"{'system':30s} {'T':>3s} {'empirical':>9s} {'predicted':>9s}  witness")
    for name, (sys_, bound) in CASES.items():
        for T in windows:
            if T < sys_.n:
                continue
            st = min_samples_in_window(sys_, 0, T, cap=args.cap)
            pred = "-" if bound is None else str(bound(T))
            emp = "none" if st.min_observable_size is None else str(st.min_observable_size)
            flag = "" if st.exhaustive else " (sampled)"
            print(f"{name:30s} {T:3d} {emp:>9s} {pred:>9s}  {list(st.failing_witness)}{flag}")
    print("\nN_p for {+-0.5,+-0.7}:", len(opposite_sign_members(CASES['{+-0.5,+-0.7}'][0])))


if __name__ == "__main__":
    main()
