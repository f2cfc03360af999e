#!/usr/bin/env python3
"""Build a small MNIST subset in IDX format.

The 5,000-image MNIST sample shipped inside the mlxtend wheel on PyPI is
downloaded with pip, split into class-balanced train and test parts with a
fixed seed, and written as four IDX files:

    <out>/train-images-idx3-ubyte   <out>/train-labels-idx1-ubyte
    <out>/test-images-idx3-ubyte    <out>/test-labels-idx1-ubyte

Convert them with `wtm convert --from idx ... --labels ...`.
"""

import argparse
import glob
import gzip
import random
import struct
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"
SIDE = 28


def fetch_wheel(dest: Path, version: str) -> Path:
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "--quiet",
         "--only-binary=:all:", "-d", str(dest), f"mlxtend=={version}"],
        check=True,
    )
    wheels = glob.glob(str(dest / "mlxtend-*.whl"))
    if not wheels:
        sys.exit("pip did not produce an mlxtend wheel")
    return Path(wheels[0])


def load_rows(wheel: Path):
    with zipfile.ZipFile(wheel) as z:
        text = gzip.decompress(z.read(MEMBER)).decode("ascii")
    rows = []
    for line in text.splitlines():
        values = [int(v) for v in line.split(",")]
        if len(values) != SIDE * SIDE + 1:
            sys.exit(f"unexpected row width {len(values)}")
        rows.append((bytes(values[:-1]), values[-1]))
    return rows


def balanced_split(rows, train_per_class, test_per_class, seed):
    by_class = {}
    for pixels, label in rows:
        by_class.setdefault(label, []).append((pixels, label))
    rng = random.Random(seed)
    train, test = [], []
    for label in sorted(by_class):
        items = by_class[label]
        if len(items) < train_per_class + test_per_class:
            sys.exit(f"class {label} has only {len(items)} images")
        rng.shuffle(items)
        train += items[:train_per_class]
        test += items[train_per_class:train_per_class + test_per_class]
    rng.shuffle(train)
    rng.shuffle(test)
    return train, test


def write_idx(prefix: Path, rows):
    with open(f"{prefix}-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(rows), SIDE, SIDE))
        for pixels, _ in rows:
            f.write(pixels)
    with open(f"{prefix}-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x801, len(rows)))
        f.write(bytes(label for _, label in rows))


def main():
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", type=Path, default=Path("data/mnist"))
    parser.add_argument("--wheel", type=Path, help="use a local mlxtend wheel")
    parser.add_argument("--version", default="0.24.0", help="mlxtend version to download")
    parser.add_argument("--train", type=int, default=2000)
    parser.add_argument("--test", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    if args.train % 10 or args.test % 10:
        sys.exit("--train and --test must be multiples of 10 (balanced classes)")

    with tempfile.TemporaryDirectory() as tmp:
        wheel = args.wheel or fetch_wheel(Path(tmp), args.version)
        rows = load_rows(wheel)

    train, test = balanced_split(rows, args.train // 10, args.test // 10, args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    write_idx(args.out / "train", train)
    write_idx(args.out / "test", test)
    print(f"wrote {len(train)} train and {len(test)} test images to {args.out}")


if __name__ == "__main__":
    main()
