"""Shared helpers for the experiment scripts: output directory and CSV writing."""

from __future__ import annotations

import argparse
import csv
from pathlib import Path


def out_dir(name: str) -> Path:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=str(Path(__file__).parent / "out"))
    args = parser.parse_args()
    path = Path(args.out) / name
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, (str, int)) else format(float(v), ".17g") for v in row])
    print(f"wrote {path}")
