#!/usr/bin/env python3
"""Desk-scale survey of the orthogonality-complex connectivity evidence.

Builds the bound-B window of the complex for standard forms of increasing
rank over a few coefficient groups and tabulates vertex counts, edge
counts and the number of connected components.  Everything is exact; the
output is evidence at the chosen bound, never a proof.

Usage:
    python3 scripts/connectivity_survey.py [--gmax 4] [--bound 1]
"""

import argparse
import sys
import time

from wallforms.complexes import connectivity_report
from wallforms.forms import standard_form, trivial_parameter, z2_parameter
from wallforms.intlinalg import FgAbGroup, cyclic, trivial_group


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--gmax", type=int, default=4)
    ap.add_argument("--bound", type=int, default=1)
    args = ap.parse_args(argv)

    coeffs = [
        ("H = 0", trivial_parameter(trivial_group)),
        ("H = Z/2 (z2 parameter)", z2_parameter()),
        ("H = Z/2 + Z/4", trivial_parameter(FgAbGroup((2, 4)))),
    ]
    for label, param in coeffs:
        d = len(param.H.factors)
        print(f"\n{label}  (d = {d}; nonempty expected once stable rank >= {2 + d}, "
              f"connected once >= {4 + d})")
        print(f"{'g':>3} {'vertices':>9} {'edges':>9} {'components':>11} {'time':>7}")
        for g in range(1, args.gmax + 1):
            t0 = time.time()
            rep = connectivity_report(standard_form(g, param), g, d,
                                      bound=args.bound, max_degree=0)
            comps = rep.betti[0] if rep.betti else 0
            print(f"{g:>3} {rep.vertex_count:>9} {rep.edge_count:>9} "
                  f"{comps:>11} {time.time() - t0:>6.1f}s   [{rep.label}]")
    return 0


if __name__ == "__main__":
    sys.exit(main())
