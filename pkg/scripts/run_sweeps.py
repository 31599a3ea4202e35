"""Run NBI sweeps for several algorithms and seeds and compare the frontiers.

    python scripts/run_sweeps.py --seeds 0 1 2 --out runs/
"""

import argparse
import json
from pathlib import Path

from nbiswarm import metrics
from nbiswarm.harness import RunConfig, compare_report, emit_plot_data, export, run_sweep
from nbiswarm.problem import gardenia


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--algorithms", nargs="+", default=["gsa", "pso", "hopso"])
    ap.add_argument("--seeds", nargs="+", type=int, default=[0])
    ap.add_argument("--params", default="{}", help="solver overrides as inline JSON")
    ap.add_argument("--out", default="runs")
    args = ap.parse_args()

    out = Path(args.out)
    params = json.loads(args.params)
    for seed in args.seeds:
        frontiers = {}
        for alg in args.algorithms:
            res = run_sweep(RunConfig(algorithm=alg, params=params, seed=seed,
                                      output=str(out / f"seed{seed}" / alg)))
            fr = res.frontier
            best = fr.points[metrics.rank_solutions(fr).best]
            print(f"seed {seed} {alg:<6} {len(fr)} points  set HVI {fr.set_hvi():.4f}  "
                  f"best HVI {best.point_hvi:.4f} at beta {best.beta}")
            frontiers[alg] = fr
        if len(frontiers) > 1:
            report = compare_report(frontiers, problem=gardenia())
            export(report, "json", out / f"seed{seed}" / "report.json")
            emit_plot_data(frontiers, report, out / f"seed{seed}" / "plot")


if __name__ == "__main__":
    main()
