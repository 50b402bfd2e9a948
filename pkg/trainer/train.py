#!/usr/bin/env python3
"""Train a freshness classifier: train.py --config c.json --data DIR --out weights/"""

from __future__ import annotations

import argparse
import sys

from freshtrain import TrainConfig, load_config
from freshtrain.pipeline import train


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", metavar="c.json",
                        help="training config (defaults to the published recipe)")
    parser.add_argument("--data", metavar="DIR", required=True,
                        help="dataset root containing a train/ split of class folders")
    parser.add_argument("--out", metavar="weights/", required=True)
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config) if args.config else TrainConfig()
        log = train(config, args.data, args.out)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    last = log["epochs"][-1]
    summary = f"train acc {last['train_accuracy']:.2%}"
    if "val_accuracy" in last:
        summary += f", val acc {last['val_accuracy']:.2%}"
    print(f"{log['model_id']}: {len(log['epochs'])} epoch(s), {summary}")
    print(f"weights saved under {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
