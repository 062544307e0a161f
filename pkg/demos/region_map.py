"""Text rendering of the existence and zig-zag regions in the (k, l) plane."""
import argparse

from ccn_lab.regions import region_map

GLYPHS = {0: " ", 1: ".", 2: "#", 3: "o", 4: "+"}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--resolution", type=int, default=64)
    args = ap.parse_args()
    rm = region_map(args.resolution)
    for row in rm.codes[::-2]:
        print("".join(GLYPHS[c] for c in row))
    s = rm.summary()
    print(f"inner radius {s['inner_radius']:.5f} (exact {s['inner_radius_exact']:.5f})")
    print(f"outer radius {s['outer_radius']:.5f}")
    print(f"D_minus area fraction {s['D_minus_area_fraction']:.5f} (exact 2/3)")


if __name__ == "__main__":
    main()
