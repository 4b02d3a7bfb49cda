"""Write the figure data (1-D regression curve, 2-D class regions) to an output directory."""

import argparse
import sys

from sci_interp.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/figures")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for cmd in ("fig1", "fig2"):
        code = main([cmd, "--out", args.out, "--seed", str(args.seed)])
        if code:
            sys.exit(code)
