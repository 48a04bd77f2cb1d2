"""Regenerate the bundled LIBSVM files in data/.

Sources: iris and wine come from scikit-learn's bundled UCI copies; glass comes
from the MASS `fgl` table (UCI glass identification, RI stored as
(RI - 1.518) * 1000, types given as names). Class ids are restored to the UCI
numbering, so glass keeps its gap at label 4.
"""
import argparse
import csv
import pathlib

import sklearn.datasets

GLASS_TYPES = {"WinF": 1, "WinNF": 2, "Veh": 3, "Con": 5, "Tabl": 6, "Head": 7}


def write_libsvm(path, rows):
    with open(path, "w") as out:
        for label, feats in rows:
            cells = " ".join(f"{i + 1}:{v!r}" for i, v in enumerate(feats) if v != 0.0)
            out.write(f"{label} {cells}".rstrip() + "\n")


def sklearn_rows(loader):
    bunch = loader()
    return [(int(t) + 1, [float(v) for v in x]) for x, t in zip(bunch.data, bunch.target)]


def glass_rows(fgl_csv):
    rows = []
    with open(fgl_csv) as f:
        for rec in csv.DictReader(f):
            ri = round(1.518 + float(rec["RI"]) / 1000.0, 5)
            feats = [ri] + [float(rec[c]) for c in ("Na", "Mg", "Al", "Si", "K", "Ca", "Ba", "Fe")]
            rows.append((GLASS_TYPES[rec["type"]], feats))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--fgl", required=True, help="path to MASS fgl.csv")
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_libsvm(out / "iris.libsvm", sklearn_rows(sklearn.datasets.load_iris))
    write_libsvm(out / "wine.libsvm", sklearn_rows(sklearn.datasets.load_wine))
    write_libsvm(out / "glass.libsvm", glass_rows(args.fgl))


if __name__ == "__main__":
    main()
