"""Coverage study for the three simulated scenarios.

Defaults to the desk-scale configs; pass --full for 10^6 subjects per arm
(several minutes per scenario on one core). FRAILHAZ_THREADS sets the number
of worker processes.
"""
import argparse
import json
from pathlib import Path

from frailhaz.errors import FrailtyError
from frailhaz.sim import coverage_study, load_config
from frailhaz.sim.study import thread_count

HERE = Path(__file__).parent / "configs"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--full", action="store_true")
    ap.add_argument("--json", help="also write all reports here")
    args = ap.parse_args()
    suffix = "_full" if args.full else ""
    reports = {}
    for k in (1, 2, 3):
        cfg = load_config(HERE / f"scenario{k}{suffix}.cfg")
        try:
            rep = coverage_study(cfg, args.reps, workers=thread_count())
        except FrailtyError as exc:
            print(f"Scenario {k} ({cfg.n_per_arm}/arm): {exc}")
            continue
        reports[k] = rep.__dict__
        print(f"Scenario {k} ({cfg.n_per_arm}/arm, r_cau={cfg.r_cau}, h0={cfg.h0}, "
              f"nu={cfg.nu:.4g}, t1={cfg.t1:g})")
        print(f"  median r_mar {rep.median_r_mar:.2f}   median adjusted "
              f"{rep.median_r_adjusted:.2f}")
        print(f"  coverage mar {rep.coverage_marginal:.3f}   coverage adjusted "
              f"{rep.coverage_adjusted:.3f}   failed reps {rep.n_failed}")
    if args.json:
        Path(args.json).write_text(json.dumps(reports, indent=2) + "\n")


if __name__ == "__main__":
    main()
