#!/usr/bin/env python3
"""Summarize an er-sweep CSV: aggregate delta versus connectivity.

Prints, per (w_d, a0) cell, the k_mean grid with the ensemble-averaged
delta_total_hat and default probability, and marks the connectivity where
the aggregate sensitivity peaks — the contagion window.

    python3 scripts/contagion_window.py out/er_sweep_quick.csv
"""

import csv
import sys
from collections import defaultdict


def main(path):
    cells = defaultdict(list)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (float(row["w_d"]), float(row["a0"]))
            cells[key].append((float(row["k_mean"]),
                               float(row["delta_total_hat"]),
                               float(row["default_prob"])))
    for (w_d, a0), pts in sorted(cells.items()):
        pts.sort()
        peak = max(pts, key=lambda t: t[1])
        print(f"w_d={w_d:g} a0={a0:g}  (peak at k_mean={peak[0]:g})")
        for k, dt, pd in pts:
            bar = "#" * int(round(40 * dt / peak[1])) if peak[1] > 0 else ""
            mark = " <- peak" if k == peak[0] else ""
            print(f"  k={k:4.1f}  delta_total={dt:8.4f}  pd={pd:6.3f}  {bar}{mark}")
        print()


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    main(sys.argv[1])
