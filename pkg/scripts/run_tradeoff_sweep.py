"""Time/recall sweep over N on a seeded flat corpus.

    python scripts/run_tradeoff_sweep.py --docs 2000 --grid 250,500,1000,1500
"""

import argparse
import csv
import sys
import time

from hinet.bench import tradeoff_sweep
from hinet.synth import generate_flat


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--docs", type=int, default=2000)
    ap.add_argument("--length", type=int, default=24, help="tokens per document")
    ap.add_argument("--grid", default="250,500,1000,1500")
    ap.add_argument("--queries", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--strategy", default="window", choices=("replace", "window", "fullsort"))
    args = ap.parse_args()

    grid = tuple(int(x) for x in args.grid.split(","))
    docs, table = generate_flat(args.docs, seed=args.seed, length=args.length)
    t0 = time.perf_counter()
    rows = tradeoff_sweep(docs, table, grid, queries=args.queries, seed=args.seed,
                          strategy=args.strategy)
    out = csv.writer(sys.stdout)
    out.writerow(["n_top", "ti", "accuracy", "f1", "t_wmd", "t_screened"])
    for r in rows:
        out.writerow([r.n_top, f"{r.ti:.4f}", f"{r.accuracy:.4f}", f"{r.f1:.4f}",
                      f"{r.t_wmd:.4f}", f"{r.t_screened:.4f}"])
    print(f"# {time.perf_counter() - t0:.1f} s", file=sys.stderr)


if __name__ == "__main__":
    main()
