"""Residuals of the divisor-coordinate relations for m = 1 and m = 2.

Writes divisor_relations.csv (columns m, seed, relation, residual) into the
output directory (default: out/).  The m = 2 case takes several minutes.
"""

import argparse
import csv
import time
from pathlib import Path

from starweyl import gauss_calc as gc
from starweyl import transcend as tr
from starweyl.scenarios import k_matrices


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out")
    ap.add_argument("--hbar", type=float, default=0.7)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--m", type=int, nargs="+", default=[1, 2])
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for m in args.m:
        K = k_matrices({"K": {"kind": "random-generic", "seed": args.seed}}, m)[0]
        t0 = time.perf_counter()
        rel = tr.divisor_relations(gc.NumericContext(m, K, args.hbar))
        for name, v in rel.items():
            print("m=%d  %-45s %.3e" % (m, name, v))
            rows.append([m, args.seed, name, v])
        print("m=%d done in %.1f s" % (m, time.perf_counter() - t0))
    with open(out / "divisor_relations.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "seed", "relation", "residual"])
        w.writerows(rows)


if __name__ == "__main__":
    main()
