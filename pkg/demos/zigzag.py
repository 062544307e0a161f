"""Seed long-wave phase noise on a roll and compare measured growth with the sideband prediction."""
import argparse

from ccn_lab.pde.diagnostics import zigzag_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=float, nargs="+", default=[0.4, 0.0, 0.8, 0.0])
    args = ap.parse_args()
    pts = list(zip(args.points[::2], args.points[1::2]))
    for kl in pts:
        rep = zigzag_experiment(kl)
        print(f"{kl}: {rep.verdict:<18s} measured {rep.measured_rate:+.6f}  "
              f"sideband {rep.predicted_rate:+.6f}  phase-diffusion {rep.cn_prediction:+.6f}  r2 {rep.r2:.5f}")


if __name__ == "__main__":
    main()
