"""Regenerate the positive- and zero-curvature classification tables as CSV and JSON."""
import argparse
import json
from pathlib import Path

from orbitiles.classification import cases_to_csv, cases_to_json, enumerate_flat_cases, enumerate_positive_cases


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results/tables")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, cases in (("positive", enumerate_positive_cases()), ("flat", enumerate_flat_cases())):
        (out / f"{name}.csv").write_text(cases_to_csv(cases), encoding="utf-8")
        (out / f"{name}.json").write_text(json.dumps(cases_to_json(cases), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        print(f"{name}: {len(cases)} rows -> {out}/{name}.csv")


if __name__ == "__main__":
    main()
