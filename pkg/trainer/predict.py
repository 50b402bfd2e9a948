#!/usr/bin/env python3
"""Export predictions: predict.py --weights W --data DIR --out P.jsonl"""

from __future__ import annotations

import argparse
import sys

from freshtrain.pipeline import predict


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--weights", metavar="W", required=True)
    parser.add_argument("--data", metavar="DIR", required=True,
                        help="split root containing class folders")
    parser.add_argument("--out", metavar="P.jsonl", required=True)
    args = parser.parse_args(argv)
    try:
        count = predict(args.weights, args.data, args.out)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {count} records to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
