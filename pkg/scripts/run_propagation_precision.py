"""Synthetic corpus through the full pipeline, then per-topic precision.

    python scripts/run_propagation_precision.py --out /tmp/hin --docs 40 --seed 0
"""

import argparse
import sys
from pathlib import Path

from hinet import pipeline
from hinet.config import load_config


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, required=True)
    ap.add_argument("--docs", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-top", type=int, default=None)
    ap.add_argument("--theta", type=float, default=None)
    args = ap.parse_args()

    base = load_config(None).with_overrides(seed=args.seed, n_top=args.n_top, theta=args.theta)
    cfg = load_config(pipeline.synth_stage(args.out, base, n_docs=args.docs))
    pipeline.run_all(cfg)
    ws = pipeline.Workspace(cfg)
    pipeline.metrics_stage(ws)
    sys.stdout.write(ws.path(pipeline.PRECISION).read_text(encoding="utf-8"))


if __name__ == "__main__":
    main()
