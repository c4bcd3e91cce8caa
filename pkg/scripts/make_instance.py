#!/usr/bin/env python3
"""Generate seeded LP JSON instances (slack form) for the CLI.

Examples:
    python scripts/make_instance.py --m 4 --n 10 --seed 3 --out lp.json
    python scripts/make_instance.py --m 4 --n 8 --unbounded --out ub.json
"""

import argparse

from qsimplex.instances import random_bounded_lp, random_lp, random_unbounded_lp
from qsimplex.io import write_lp_json


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m", type=int, default=4)
    parser.add_argument("--n", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--density", type=float, default=0.7)
    parser.add_argument("--out", required=True)
    kind = parser.add_mutually_exclusive_group()
    kind.add_argument("--bounded", action="store_true",
                      help="reject until the classical solver certifies optimality")
    kind.add_argument("--unbounded", action="store_true",
                      help="plant a certifying nonpositive column")
    args = parser.parse_args()

    if args.unbounded:
        inst = random_unbounded_lp(args.m, args.n, seed=args.seed)
    elif args.bounded:
        inst = random_bounded_lp(args.m, args.n, seed=args.seed,
                                 density=args.density)
    else:
        inst = random_lp(args.m, args.n, seed=args.seed, density=args.density)
    write_lp_json(inst, args.out)
    print(f"wrote {args.out}: m={inst.m} n={inst.n} "
          f"d_c={inst.col_nnz_max} L={inst.max_abs_entry}")


if __name__ == "__main__":
    main()
