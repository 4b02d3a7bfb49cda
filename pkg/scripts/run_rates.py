"""Excess-risk decay of wiNN and the fitted log-log slope for d = 1 and d = 2."""

import argparse

from sci_interp.config import RatesConfig
from sci_interp.core import HolderParams
from sci_interp.experiments import run_rates
from sci_interp.io import json_text, write_atomic

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--replicates", type=int, default=50)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="out/rates")
    args = ap.parse_args()
    for d in args.dims:
        cfg = RatesConfig(dim=d, replicates=args.replicates)
        results, files = run_rates(cfg, args.threads)
        for r in results["records"]:
            print(f"d={d} n={r['n']:>6} excess risk {r['mean_excess_risk']:.5f} +- {r['std_error']:.5f}")
        expected = -HolderParams(cfg.alpha, d).rate_exponent
        print(f"d={d} fitted slope {results['fitted_rate']:.3f} +- {results['rate_ci']:.3f} (expected {expected:.3f})")
        write_atomic(f"{args.out}/rates_d{d}.json", json_text(results))
