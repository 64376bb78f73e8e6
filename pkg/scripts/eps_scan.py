"""Residuals of the decomposition pipeline as the perturbation size grows.

Exact identities hold at eps = 0 and should break roughly in proportion to eps.

    python scripts/eps_scan.py configs/k9_scenario.json --eps 0 1e-4 1e-3 1e-2 1e-1
"""
import argparse
import json
from pathlib import Path

from pexider.cli import RunConfig, run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config", type=Path)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.0, 1e-4, 1e-3, 1e-2, 1e-1])
    ap.add_argument("--samples", type=int, default=11)
    args = ap.parse_args()

    base = json.loads(args.config.read_text())
    print(f"{'eps':>8} {'verdict':>7} {'F':>10} {'G':>10} {'H':>10} {'additive':>10} {'scan':>10} {'ms':>8}")
    for eps in args.eps:
        cfg = dict(base, samples=args.samples)
        cfg["scenario"] = dict(base["scenario"], perturb_eps=eps)
        rep, _, _ = run(RunConfig.from_dict(cfg).validate())
        res = rep["decomposition"]["residuals"]
        scan = rep["checks"]["residual_scan"]["gap"]
        print(
            f"{eps:>8.0e} {rep['verdict']:>7} "
            + " ".join(f"{res[k]:>10.3e}" for k in ("F", "G", "H", "additive"))
            + f" {scan:>10.3e} {rep['wall_time_ms']:>8.0f}"
        )


if __name__ == "__main__":
    main()
