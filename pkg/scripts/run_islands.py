"""Median radius of misclassification islands around flipped labels as n grows."""

import argparse

from sci_interp.config import IslandsConfig
from sci_interp.experiments import run_islands
from sci_interp.io import json_text, write_atomic

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[100, 1000, 10000])
    ap.add_argument("--replicates", type=int, default=20)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="out/islands")
    args = ap.parse_args()
    results, files = run_islands(IslandsConfig(n_values=args.n, replicates=args.replicates), args.threads)
    for r in results["per_n"]:
        print(f"n={r['n']:>6} median radius {r['pooled_median']:.3g} over {r['islands_measured']} islands ({r['skipped']} skipped)")
    for p in results["pairs"]:
        print(f"n={p['n_small']} -> {p['n_large']}: shrinks in {p['pairs_shrinking']}/{p['defined_pairs']} replicates")
    for name, text in files.items():
        write_atomic(f"{args.out}/{name}", text)
    write_atomic(f"{args.out}/islands.json", json_text(results))
