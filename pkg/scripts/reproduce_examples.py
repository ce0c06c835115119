"""Run the three printed curves through the full pipeline and tabulate the bounds.

    python3 scripts/reproduce_examples.py [--n-max 5] [--json out.json]
"""

import argparse
import json
import time
from importlib.resources import files

from tatebound.cli import RunConfig, emit_json, load_corpus, run, run_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=5)
    ap.add_argument("--json", help="write all reports to this file")
    args = ap.parse_args()

    corpus = files("tatebound") / "data" / "corpus.jsonl"
    reports = {}
    for entry in load_corpus(corpus):
        t0 = time.perf_counter()
        rep = run(RunConfig(entry.curve, entry.generators, entry.p, 1, args.n_max))
        secs = time.perf_counter() - t0
        reports[entry.label] = json.loads(emit_json(rep))
        loc = rep["local"]
        print(f"== {entry.label}  p = {entry.p}  status {rep['status']}  ({secs:.2f}s)")
        print(f"   disc {loc['discriminant']}  conductor {loc['conductor']}  torsion {loc['torsion_order']}")
        for row in loc["primes"]:
            print(f"   ell = {row['prime']:>4}: {row['kodaira']:<5} {row['reduction']}")
        if loc.get("field_labels"):
            print(f"   field labels: {loc['field_labels']}")
        print("    n  nu_table            r2n  delta2  nu  raw  kappa>=  claim                 held-variant")
        for row in rep["theorem1"]:
            held = row["held_variant"]["raw_bound"] if row.get("held_variant") else "-"
            print(
                f"   {row['n']:>2}  {json.dumps(row['nu_table']):<18} {str(row['r2n']):>4} {str(row['delta2']):>7}"
                f" {str(row['nu']):>3} {row['raw_bound']:>4} {row['kappa_lower_bound']:>8}  {row['claim']:<21} {held}"
            )
        print(f"   image: {rep['galois_image']['verdict']}")
        print()
    print("regression corpus:")
    status = run_corpus(corpus)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(reports, fh, indent=2, sort_keys=True)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
