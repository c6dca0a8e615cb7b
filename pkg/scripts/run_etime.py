"""E-Time of the Top-N selection strategies on random fingerprints.

    python scripts/run_etime.py --pool 1000000 --k 1500
"""

import argparse

import numpy as np

from hinet.bench import strategy_rounds
from hinet.metrics import TimingRecord, e_time
from hinet.synth import random_fingerprints


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pool", type=int, default=1_000_000)
    ap.add_argument("--k", type=int, default=1500)
    ap.add_argument("--f", type=int, default=64, choices=(32, 64, 128))
    ap.add_argument("--repeats", type=int, default=31)
    ap.add_argument("--seed", type=int, default=8)
    args = ap.parse_args()

    pool = random_fingerprints(args.pool, args.f, seed=args.seed)
    target = random_fingerprints(1, args.f, seed=args.seed + 1)[0]
    rounds = strategy_rounds(pool, target, args.k, args.repeats)
    print("strategy,best_seconds,median_e_time")
    for name in sorted(rounds):
        rel = [e_time(TimingRecord(t_strategy=t, t_fullsort=b)) for t, b in zip(rounds[name], rounds["fullsort"])]
        print(f"{name},{min(rounds[name]):.4f},{float(np.median(rel)):.4f}")


if __name__ == "__main__":
    main()
