"""|Z| over the fugacity polydisc for the Petersen graph, at and beyond the proven radius.

    python scripts/scan_petersen.py --q 6 --samples 10000 --scales 1,10,100,1000
"""

import argparse

from chroma import petersen, zero_probe


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--q", type=int, default=6)
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--scales", default="1,10,100,1000", help="multiples of the proven radius")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    G = petersen()
    R = zero_probe.zero_free_radius(G.max_degree)
    print(f"proven radius R(3) = {R:.3e}")
    print(f"{'scale':>7} {'radius':>10} {'min |Z|':>12} {'bound':>12} {'violations':>10}")
    for s in map(float, args.scales.split(",")):
        rep = zero_probe.polydisc_scan(G, args.q, args.samples, seed=args.seed,
                                       radius_override=s * R, threads=args.threads)
        d = rep.to_json()
        print(f"{s:>7g} {s * R:>10.3e} {d['min_abs_z']:>12.5g} {d['min_lower_bound']:>12.5g} {len(rep.violations):>10}")


if __name__ == "__main__":
    main()
