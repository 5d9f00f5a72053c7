#!/usr/bin/env python3
"""Build the bundled CSV datasets under data/.

Sources are the raw UCI/KEEL files shipped inside two PyPI wheels
(keel-ds, imbalanced-databases); balance-scale is regenerated from its
definition (full 5^4 factorial, class from comparing torques).

Usage: scripts/prepare_datasets.py [--wheels DIR] [--out data]
"""
import argparse
import csv
import glob
import itertools
import os
import subprocess
import sys
import zipfile

WHEELS = {
    "keel": ("keel-ds==0.2.5", "keel_ds-0.2.5-*.whl"),
    "imb": ("imbalanced-databases==0.1.1", "imbalanced_databases-0.1.1-*.whl"),
}


def wheel(directory, key):
    spec, pattern = WHEELS[key]
    hits = glob.glob(os.path.join(directory, pattern))
    if not hits:
        subprocess.check_call([sys.executable, "-m", "pip", "download", "--no-deps", spec, "-d", directory])
        hits = glob.glob(os.path.join(directory, pattern))
    return zipfile.ZipFile(hits[0])


def keel_rows(text):
    rows = []
    in_data = False
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.lower().startswith("@data"):
            in_data = True
            continue
        if line.startswith("@"):
            continue
        if in_data or "@relation" not in text:
            rows.append([c.strip() for c in line.split(",")])
    return rows


def write(path, rows):
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)
    print(f"{path}: {len(rows)} rows, {len(rows[0]) - 1} features")


def balance():
    rows = []
    for lw, ld, rw, rd in itertools.product(range(1, 6), repeat=4):
        left, right = lw * ld, rw * rd
        label = "L" if left > right else ("R" if right > left else "B")
        rows.append([lw, ld, rw, rd, label])
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--wheels", default="/tmp/iml-wheels")
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()
    os.makedirs(args.wheels, exist_ok=True)
    os.makedirs(args.out, exist_ok=True)
    keel = wheel(args.wheels, "keel")
    imb = wheel(args.wheels, "imb")

    write(os.path.join(args.out, "balance.csv"), balance())
    # KEEL drops the all-zero second attribute of the UCI file; restore it (d = 34).
    iono = keel_rows(keel.read("keel_ds/data/balanced/raw/ionosphere.dat").decode())
    write(os.path.join(args.out, "iono.csv"), [r[:1] + ["0"] + r[1:] for r in iono])
    write(os.path.join(args.out, "wine.csv"),
          keel_rows(keel.read("keel_ds/data/balanced/raw/wine.dat").decode()))
    spect = []
    for part in ("SPECTF.train.txt", "SPECTF.test.txt"):
        text = imb.read("imbalanced_databases/data/spect_f/" + part).decode()
        spect += [[c.strip() for c in line.split(",")] for line in text.splitlines() if line.strip()]
    # label is the first column in the UCI file
    write(os.path.join(args.out, "spectfheart.csv"), [r[1:] + [r[0]] for r in spect])


if __name__ == "__main__":
    main()
