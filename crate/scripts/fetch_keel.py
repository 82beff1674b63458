#!/usr/bin/env python3
"""Rebuild the KEEL fixtures under crates/core/data from the `keel-ds` wheel.

The wheel ships header-less KEEL rows; this script restores the `@relation`,
`@attribute`, `@inputs`, `@outputs` and `@data` sections so the files follow
the regular KEEL `.dat` layout.

    pip download keel-ds==0.2.5 --no-deps -d /tmp/keel
    python3 scripts/fetch_keel.py /tmp/keel/keel_ds-0.2.5-py3-none-any.whl
"""
import sys
import zipfile
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "data"

ATTRS = {
    "haberman": ["Age", "Year", "Positive"],
    "pima": ["Preg", "Plas", "Pres", "Skin", "Insu", "Mass", "Pedi", "Age"],
    "wisconsin": ["ClumpThickness", "CellSize", "CellShape", "MarginalAdhesion",
                  "EpithelialSize", "BareNuclei", "BlandChromatin",
                  "NormalNucleoli", "Mitoses"],
    "yeast3": ["Mcg", "Gvh", "Alm", "Mit", "Erl", "Pox", "Vac", "Nuc"],
    "yeast4": ["Mcg", "Gvh", "Alm", "Mit", "Erl", "Pox", "Vac", "Nuc"],
    "vehicle0": ["Compactness", "Circularity", "Distance_circularity",
                 "Radius_ratio", "Praxis_aspect_ratio", "Max_length_aspect_ratio",
                 "Scatter_ratio", "Elongatedness", "Praxis_rectangular",
                 "Length_rectangular", "Major_variance", "Minor_variance",
                 "Gyration_radius", "Major_skewness", "Minor_skewness",
                 "Minor_kurtosis", "Major_kurtosis", "Hollows_ratio"],
    "abalone19": ["Sex", "Length", "Diameter", "Height", "Whole_weight",
                  "Shucked_weight", "Viscera_weight", "Shell_weight"],
}


def is_int(s):
    try:
        int(s)
        return True
    except ValueError:
        return False


def header(name, attrs, rows):
    lines = [f"@relation {name}"]
    for j, a in enumerate(attrs):
        col = [r[j] for r in rows]
        try:
            vals = [float(v) for v in col]
        except ValueError:
            cats = sorted(set(col))
            lines.append(f"@attribute {a} {{{', '.join(cats)}}}")
            continue
        kind = "integer" if all(is_int(v) for v in col) else "real"
        lo, hi = min(vals), max(vals)
        if kind == "integer":
            lines.append(f"@attribute {a} {kind} [{int(lo)}, {int(hi)}]")
        else:
            lines.append(f"@attribute {a} {kind} [{lo!r}, {hi!r}]")
    lines.append("@attribute Class {positive, negative}")
    lines.append(f"@inputs {', '.join(attrs)}")
    lines.append("@outputs Class")
    lines.append("@data")
    return lines


def main(wheel):
    OUT.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(wheel) as zf:
        for name, attrs in ATTRS.items():
            raw = zf.read(f"keel_ds/data/imbalanced/raw/{name}.dat").decode()
            rows = [[c.strip() for c in line.split(",")]
                    for line in raw.splitlines() if line.strip()]
            body = [", ".join(r) for r in rows]
            text = "\n".join(header(name, attrs, rows) + body) + "\n"
            (OUT / f"{name}.dat").write_text(text)
            if name == "haberman":
                csv = ["age,year,nodes,survival"]
                for r in rows:
                    label = "Died" if r[-1] == "positive" else "Survived"
                    csv.append(",".join(r[:-1] + [label]))
                (OUT / "haberman.csv").write_text("\n".join(csv) + "\n")
            if name == "abalone19":
                # numeric-only copy: the nominal Sex input is dropped
                csv = ["length,diameter,height,whole,shucked,viscera,shell,class"]
                for r in rows:
                    csv.append(",".join(r[1:]))
                (OUT / "abalone19.csv").write_text("\n".join(csv) + "\n")


if __name__ == "__main__":
    main(sys.argv[1])
