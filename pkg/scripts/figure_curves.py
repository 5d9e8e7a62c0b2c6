"""Data for the two hazard-ratio figures, written as CSV files.

truncation.csv: marginal HR against surviving fraction, causal HR 1.2,
Var(U) = 1. trr.csv: causal HR against TRR for a marginal HR of 1.2 at S = 0.5.
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from frailhaz import adjust, pvf

FAMILIES = {
    "gamma": pvf.PvfFamily.gamma(),
    "inverse_gaussian": pvf.PvfFamily.inverse_gaussian(),
    "hougaard": pvf.PvfFamily.hougaard(-0.125),
    "compound_poisson": pvf.PvfFamily.compound_poisson(0.01),
}


def write(path, xname, grid, columns):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([xname, *columns])
        for i, x in enumerate(grid):
            w.writerow([f"{x:.17g}"] + ["" if c[i].y is None else f"{c[i].y:.17g}"
                                        for c in columns.values()])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures")
    ap.add_argument("--r", type=float, default=1.2)
    ap.add_argument("--s", type=float, default=0.5)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(exist_ok=True)
    s_grid = np.linspace(1.0, 0.011, 500)
    write(out / "truncation.csv", "s", s_grid,
          {k: adjust.hazard_ratio_curve(f, 1.0, args.r, s_grid) for k, f in FAMILIES.items()})
    trr_grid = np.linspace(1.03, 1.4, 501)
    write(out / "trr.csv", "trr", trr_grid,
          {k: adjust.trr_sensitivity_curve(f, args.s, args.r, trr_grid)
           for k, f in FAMILIES.items()})
    print(f"wrote {out / 'truncation.csv'} and {out / 'trr.csv'}")


if __name__ == "__main__":
    main()
