"""Recompute the published HVIs, percentages and rankings from the bundled fixtures.

    python scripts/reproduce_tables.py [--full] [--out report.json]
"""

import argparse
import sys

from nbiswarm import metrics, reproduce
from nbiswarm.harness import export, load_fixture


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--full", action="store_true", help="also run the live sweeps")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()

    for alg, name in reproduce.FIXTURE_OF.items():
        fr = load_fixture(name)
        rank = metrics.rank_solutions(fr)
        print(f"{name} ({alg}): {len(fr)} rows, set HVI {fr.set_hvi():.4f}")
        for which in ("best", "median", "worst"):
            p = fr.points[getattr(rank, which)]
            print(f"  {which:<6} beta {p.beta}  f {p.F.tolist()}  HVI {p.point_hvi:.3f}")

    claims = reproduce.fixture_claims()
    report = None
    if args.full:
        extra, report = reproduce.sweep_claims(args.seed)
        claims += extra
    print()
    for c in claims:
        print(c.line())
    if args.out:
        doc = {"claims": [c.__dict__ | {"status": c.status} for c in claims]}
        if report is not None:
            doc["stochastic_comparison"] = report
        export(doc, "json", args.out)
    return 1 if any(c.status == "FAIL" for c in claims) else 0


if __name__ == "__main__":
    sys.exit(main())
