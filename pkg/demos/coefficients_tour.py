"""Walk through the CCN coefficients at one wavenumber on both characteristic branches."""
import argparse

from ccn_lab import ccn_bundle, classify, fluxes_closed
from ccn_lab.coeffs import kappa_printed


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=float, default=0.8)
    ap.add_argument("--l", type=float, default=0.0)
    args = ap.parse_args()
    kl = (args.k, args.l)
    fd = fluxes_closed(kl)
    print(f"wavenumber {kl}: region {classify(kl).value}")
    print(f"  B = {fd.B:.6f}  A = {fd.A:.6f}  delta_zz = {fd.delta_zz:.6f}")
    for branch in ("plus", "minus"):
        b = ccn_bundle(kl, branch)
        print(f"  {branch:5s} C = {b.C:+.6f}  tau = {b.tau:.6f}  cxy = {b.cxy:+.6f}")
        print(f"        kappa = {b.kappa:+.6f} (printed polynomial {kappa_printed(b.kl, b.C):+.6f})")
        print(f"        curlyK = {b.curlyK:+.6f}")


if __name__ == "__main__":
    main()
