#!/usr/bin/env python3
"""Resolution sweep: banded quadrature against the exact polygonal oracle.

For every corpus curve and every N in a doubling ladder, evaluate both writhe
methods and the Fuller residual, print one table row per (curve, N), and
optionally dump the table as CSV.  The oracle delta should fall roughly
like 1/N^2 until it hits the noise floor of the flat curves.

usage: python3 scripts/convergence_study.py [--n-min 256] [--n-max 4096]
           [--band 2] [--out sweep.csv]
"""

import argparse
import sys
import time

from writhekit.corpus import corpus_curves
from writhekit.indicatrix import fuller_check
from writhekit.writhe import writhe_polygonal, writhe_quadrature

HEADER = "curve,n_samples,band,quadrature,polygonal,delta,residual_mod2,seconds"


def ladder(n_min, n_max):
    n = n_min
    while n <= n_max:
        yield n
        n *= 2


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-min", type=int, default=256)
    ap.add_argument("--n-max", type=int, default=4096)
    ap.add_argument("--band", type=int, default=2)
    ap.add_argument("--out", default=None, help="optional CSV path")
    args = ap.parse_args(argv)

    rows = [HEADER]
    print("%-12s %6s %22s %22s %10s %10s" %
          ("curve", "N", "quadrature", "polygonal", "delta", "residual"))
    for n in ladder(args.n_min, args.n_max):
        for name, curve in corpus_curves(n):
            t0 = time.time()
            quad = writhe_quadrature(curve, band=args.band).value
            poly = writhe_polygonal(curve).value
            res = fuller_check(curve, method="polygonal").residual_mod2
            dt = time.time() - t0
            print("%-12s %6d %22.15g %22.15g %10.3e %10.3e" %
                  (name, n, quad, poly, abs(quad - poly), res))
            rows.append("%s,%d,%d,%.17g,%.17g,%.6e,%.6e,%.3f" %
                        (name, n, args.band, quad, poly,
                         abs(quad - poly), res, dt))
        print()
    if args.out:
        with open(args.out, "w") as f:
            f.write("\n".join(rows) + "\n")
        print("wrote %s" % args.out, file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
