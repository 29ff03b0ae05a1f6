"""Exhaustive census of every n=2, m=1 two-source table under the NM probe.

Prints the minimum measured non-malleability error over all 2^16 tables
with uniform 2-bit sources, and how many tables attain it.
"""

import argparse
import json
import time

import numpy as np

from extforge.nmcompile import nm_error_pair


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k1", type=int, default=2)
    ap.add_argument("--k2", type=int, default=2)
    args = ap.parse_args()
    from extforge.statlab import _flat_supports

    lx = list(_flat_supports(2, args.k1))
    ly = list(_flat_supports(2, args.k2))
    best, count, first = None, 0, None
    t0 = time.time()
    for v in range(1 << 16):
        tab = np.array([(v >> (15 - i)) & 1 for i in range(16)], dtype=np.int64).reshape(4, 4)
        e = max(nm_error_pair(tab, xs, ys, 1) for xs in lx for ys in ly)
        if best is None or e < best:
            best, count, first = e, 1, tab.tolist()
        elif e == best:
            count += 1
    print(json.dumps({"k1": args.k1, "k2": args.k2, "min_eps": str(best), "tables": count, "first": first, "seconds": round(time.time() - t0, 1)}, sort_keys=True))


if __name__ == "__main__":
    main()
