"""Dyadic convergence table for a scenario config.

For every sample point prints the stopping index, the last gap and the worst
ratio gaps[n] / (diam G(0) 2^-n); optionally writes the long-form table as CSV.

    python scripts/convergence_table.py configs/k9_scenario.json --csv table.csv
"""
import argparse
import csv
import json
from pathlib import Path

import numpy as np

from pexider.decomposition import compute_f0, normalize_at_zero, sample_points
from pexider.scenarios import ScenarioSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config", type=Path)
    ap.add_argument("--samples", type=int, default=9)
    ap.add_argument("--max-n", type=int, default=40)
    ap.add_argument("--tol", type=float, default=1e-6)
    ap.add_argument("--csv", type=Path)
    args = ap.parse_args()

    cfg = json.loads(args.config.read_text())
    spec = ScenarioSpec.from_dict(cfg.get("scenario", cfg))
    _, _, G, H = spec.build()
    G1 = normalize_at_zero(G, H)[0]
    diam0 = G(np.zeros(spec.core.m)).diameter()

    rows = []
    print(f"diam G(0) = {diam0:.6g}")
    print(f"{'x':>18} {'n*':>4} {'last gap':>12} {'max ratio':>10}")
    for x in sample_points(spec.mode, spec.core.m, args.samples):
        _, tr = compute_f0(G1, x, args.max_n, args.tol)
        bound = diam0 * 2.0 ** -np.arange(len(tr.gaps))
        ratio = max((g / b for g, b in zip(tr.gaps, bound) if b > 0), default=0.0)
        label = ",".join(f"{v:g}" for v in x)
        print(f"{label:>18} {tr.terminal_index:>4} {tr.gaps[-1]:>12.3e} {ratio:>10.4f}")
        rows += [(label, n, g, b) for n, (g, b) in enumerate(zip(tr.gaps, bound))]

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "n", "gap", "bound"])
            w.writerows(rows)
        print(f"wrote {len(rows)} rows to {args.csv}")


if __name__ == "__main__":
    main()
