"""Ninth-order worst-case example: nine ninth roots of 0.1314.

Prints the spectrum, the A^9 = gamma I check, the ranks of the eight-of-nine
schedule with and without a residue-8 instant, and the regular schedules
that do and do not work.
"""
import argparse
import json

from sampobs import pathology_report, rank_verdict
from sampobs.errors import PathologicalSpacing
from sampobs.oracle import ninth_root_checks, ninth_root_system, eight_of_nine_schedule
from sampobs.scheduler import scheme_regular


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--periods", type=int, default=9, help="number of nine-instant periods")
    args = ap.parse_args()

    sys_ = ninth_root_system()
    print("eigenvalues:")
    for e in sys_.eigenvalues:
        z = e.value
        print(f"  {z.real:+.4f} {z.imag:+.4f}j   phase {e.phase} turns")
    print("pathology periods:", pathology_report(sys_).global_minimal_periods)

    facts = ninth_root_checks()
    print(f"max |CA^9 - 0.1314 C| / |0.1314 C| = {facts['ca9_rel_err']:.2e}")
    print(f"four-decimal eigenvalues, max rel err of lam^9 = {facts['printed_power9_rel_err']:.2e}")

    sched = eight_of_nine_schedule(args.periods)
    print(f"eight of nine over {args.periods} periods ({len(sched)} instants): "
          f"rank {rank_verdict(sys_, sched).rank}")
    print(f"  plus instant 8: rank {rank_verdict(sys_, sorted(sched + [8])).rank}")

    for tbar in range(1, 13):
        try:
            res = scheme_regular(sys_, 0, tbar)
            print(f"regular spacing {tbar:2d}: rank {rank_verdict(sys_, res.schedule).rank}")
        except PathologicalSpacing as exc:
            print(f"regular spacing {tbar:2d}: refused ({exc})")
    print(json.dumps({k: v for k, v in facts.items() if k != "ca9_over_c"}, indent=2))


if __name__ == "__main__":
    main()
