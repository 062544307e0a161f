"""Report-only experiment: linear growth of one long-wave mode in the RGL bench versus CCN theory.

Nothing here is asserted.  Near the zig-zag boundary the phase-diffusion rate
tracks the full sideband rate only while mu stays small against the roll amplitude.
Runs stop at t = 120: later on, round-off seeds faster sidebands and the roll
reorganizes, which ends the linear regime.  k = 0.7 lies on the grid for every mu below.
"""
import argparse

import numpy as np

from ccn_lab import ccn_bundle
from ccn_lab.pde.diagnostics import zigzag_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=float, default=0.7)
    ap.add_argument("--mu", type=float, nargs="+", default=[0.1, 0.05, 0.025])
    args = ap.parse_args()
    b = ccn_bundle((args.k, 0.0), "plus")
    print(f"k = {args.k}: tau = {b.tau:.5f}, curlyK = {b.curlyK:+.5f}")
    for mu in args.mu:
        rep = zigzag_experiment((args.k, 0.0), modes=[(1, 0)], mu=mu, t_end=120.0)
        ratio = rep.measured_rate / rep.cn_prediction if rep.cn_prediction else np.nan
        print(f"mu {mu:6.3f} (k snapped to {rep.snapped_kl[0]:.4f}): RGL {rep.measured_rate:+.3e}  sideband {rep.predicted_rate:+.3e}  "
              f"phase diffusion {rep.cn_prediction:+.3e}  ratio {ratio:.4f}")


if __name__ == "__main__":
    main()
