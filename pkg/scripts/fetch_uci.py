#!/usr/bin/env python3
"""Download the UCI Iris, Wine and Glass files and convert them to labels-last CSV.

Checksums of the raw downloads are kept in ``uci.lock.json`` next to this
script. The first fetch of a file records its sha256; every later fetch must
reproduce it or the script stops with exit code 1. Commit the lock file to pin
the data.

    python scripts/fetch_uci.py --out data/
    amsos-bench run --dataset data/wine.csv --algorithm amsos
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import urllib.request
from pathlib import Path

BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"
LOCK = Path(__file__).with_name("uci.lock.json")

# name -> (url, index of the label column, columns to drop)
SOURCES = {
    "iris": (f"{BASE}/iris/iris.data", 4, ()),
    "wine": (f"{BASE}/wine/wine.data", 0, ()),
    "glass": (f"{BASE}/glass/glass.data", 10, (0,)),
}


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def to_labels_last(raw: bytes, label_col: int, drop) -> list[list[str]]:
    rows = []
    for record in csv.reader(raw.decode("ascii").splitlines()):
        if not record or not "".join(record).strip():
            continue
        label = record[label_col]
        features = [v for i, v in enumerate(record) if i != label_col and i not in drop]
        rows.append(features + [label])
    return rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("data"))
    parser.add_argument("names", nargs="*", help=f"subset of {', '.join(SOURCES)} (default: all)")
    args = parser.parse_args(argv)
    unknown = set(args.names) - set(SOURCES)
    if unknown:
        parser.error(f"unknown dataset(s): {', '.join(sorted(unknown))}")

    lock = json.loads(LOCK.read_text()) if LOCK.exists() else {}
    args.out.mkdir(parents=True, exist_ok=True)
    for name in args.names or SOURCES:
        url, label_col, drop = SOURCES[name]
        try:
            with urllib.request.urlopen(url, timeout=60) as response:
                raw = response.read()
        except OSError as exc:
            print(f"{name}: download failed: {exc}", file=sys.stderr)
            return 1
        digest = sha256(raw)
        if name in lock and lock[name] != digest:
            print(f"{name}: checksum mismatch, expected {lock[name]}, got {digest}", file=sys.stderr)
            return 1
        lock.setdefault(name, digest)
        target = args.out / f"{name}.csv"
        with target.open("w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(to_labels_last(raw, label_col, drop))
        print(f"{name}: {target} ({digest[:12]})")
    LOCK.write_text(json.dumps(lock, indent=2, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
