#!/usr/bin/env python3
"""Download the real-world regression datasets into data/ as LIBSVM text.

Each dataset is tried from its LIBSVM page first. housing and mpg fall back to
copies shipped inside two PyPI wheels (scikit-learn 1.1.3 and vega_datasets
0.9.0) when that host is unreachable. Whatever the source, the rows are
re-written in one canonical LIBSVM form so the checksums in data/manifest.json
pin the numbers, not the formatting of a particular mirror.
"""

import argparse
import csv
import hashlib
import io
import json
import subprocess
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

LIBSVM = "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/regression/"
SOURCES = {
    "housing": LIBSVM + "housing",
    "mpg": LIBSVM + "mpg",
    "bodyfat": LIBSVM + "bodyfat",
    "mg": LIBSVM + "mg",
    "abalone": LIBSVM + "abalone",
    "cadata": LIBSVM + "cadata",
    "cpusmall": LIBSVM + "cpusmall",
    "space_ga": LIBSVM + "space_ga",
}


def fmt(v):
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def to_libsvm(rows):
    out = io.StringIO()
    for target, feats in rows:
        parts = [fmt(target)]
        parts += [f"{j + 1}:{fmt(x)}" for j, x in enumerate(feats) if float(x) != 0.0]
        out.write(" ".join(parts) + "\n")
    return out.getvalue()


def parse_libsvm(text, dim):
    rows = []
    for line in text.splitlines():
        tok = line.split()
        if not tok:
            continue
        feats = [0.0] * dim
        for t in tok[1:]:
            i, v = t.split(":")
            feats[int(i) - 1] = float(v)
        rows.append((float(tok[0]), feats))
    return rows


def from_libsvm_host(name, dim, timeout):
    with urllib.request.urlopen(SOURCES[name], timeout=timeout) as r:
        return parse_libsvm(r.read().decode(), dim)


def wheel_member(spec, member):
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "--quiet",
             "--disable-pip-version-check", "-d", tmp, spec],
            check=True,
        )
        wheel = next(Path(tmp).glob("*.whl"))
        with zipfile.ZipFile(wheel) as z:
            return z.read(member).decode()


def housing_fallback():
    text = wheel_member("scikit-learn==1.1.3", "sklearn/datasets/data/boston_house_prices.csv")
    reader = csv.reader(io.StringIO(text))
    next(reader)  # "506,13,..."
    header = next(reader)
    assert header[-1] == "MEDV", header
    return [(float(r[-1]), [float(x) for x in r[:-1]]) for r in reader if r]


def mpg_fallback():
    cars = json.loads(wheel_member("vega_datasets==0.9.0", "vega_datasets/_data/cars.json"))
    origin = {"USA": 1, "Europe": 2, "Japan": 3}
    rows = []
    for c in cars:
        if c["Miles_per_Gallon"] is None or c["Horsepower"] is None:
            continue
        year = int(c["Year"][:4]) - 1900
        feats = [c["Cylinders"], c["Displacement"], c["Horsepower"], c["Weight_in_lbs"],
                 c["Acceleration"], year, origin[c["Origin"]]]
        rows.append((c["Miles_per_Gallon"], feats))
    return rows


FALLBACKS = {"housing": housing_fallback, "mpg": mpg_fallback}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", help="datasets to fetch (default: all in the manifest)")
    ap.add_argument("--manifest", default=str(DATA / "manifest.json"))
    ap.add_argument("--timeout", type=float, default=15.0)
    ap.add_argument("--no-verify", action="store_true", help="skip checksum verification")
    args = ap.parse_args()

    manifest_path = Path(args.manifest)
    manifest = json.loads(manifest_path.read_text())["datasets"]
    names = args.names or [n for n, e in manifest.items() if e.get("format") == "libsvm"]
    status = 0
    for name in names:
        entry = manifest[name]
        dest = manifest_path.parent / entry["path"]
        rows = None
        try:
            rows = from_libsvm_host(name, entry["dim"], args.timeout)
            origin = "libsvm"
        except Exception as e:  # noqa: BLE001 - any network failure falls through
            if name in FALLBACKS:
                print(f"{name}: LIBSVM host unavailable ({e}); using wheel copy", file=sys.stderr)
                rows = FALLBACKS[name]()
                origin = "wheel"
            else:
                print(f"{name}: SKIPPED, unavailable ({e})", file=sys.stderr)
                status = 1
                continue
        text = to_libsvm(rows)
        digest = hashlib.sha256(text.encode()).hexdigest()
        pinned = entry.get("sha256", "")
        if pinned and digest != pinned and not args.no_verify:
            print(f"{name}: checksum mismatch ({digest} != {pinned}); not written", file=sys.stderr)
            status = 1
            continue
        dest.parent.mkdir(parents=True, exist_ok=True)
        tmp = dest.with_suffix(dest.suffix + ".tmp")
        tmp.write_text(text)
        tmp.replace(dest)
        print(f"{name}: {len(rows)} rows from {origin} -> {dest} sha256={digest}")
    return status


if __name__ == "__main__":
    sys.exit(main())
