"""Sample a coloring with skewed class sizes via a tilted fugacity.

    python scripts/skewed_sample.py --n 24 --target 10,8,6 --ball 0.2 --mode newton
"""

import argparse
import json

from chroma import cycle
from chroma.rejection import skewed_sample


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=24)
    ap.add_argument("--target", default="10,8,6")
    ap.add_argument("--mode", choices=("newton", "grid"), default="newton")
    ap.add_argument("--ball", type=float, default=0.2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    target = [int(x) for x in args.target.split(",")]
    out = skewed_sample(cycle(args.n), len(target), target, args.mode, seed=args.seed, ball_radius=args.ball)
    print(json.dumps(out.to_json(), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
