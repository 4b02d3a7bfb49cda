"""Double-descent curve of min-norm least squares (default m=20, D=100)."""

import argparse

from sci_interp.config import DescentConfig
from sci_interp.experiments import run_descent_cmd
from sci_interp.io import json_text, write_atomic

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--replicates", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="out/descent")
    args = ap.parse_args()
    results, files = run_descent_cmd(DescentConfig(replicates=args.replicates, seed=args.seed))
    for r in results["records"]:
        print(f"p={r['p']:>4} GE {r['mean_ge']:12.4f} +- {r['std_error']:10.4f}  min sv {r['min_singular_value']:.4f}")
    print(f"peak at p={results['argmax_p']}, peak / overparameterized = {results['peak_to_overparameterized_ratio']:.1f}")
    for name, text in files.items():
        write_atomic(f"{args.out}/{name}", text)
    write_atomic(f"{args.out}/descent.json", json_text(results))
