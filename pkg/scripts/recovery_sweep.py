"""Recover alpha, beta and K on many seeded random scenarios.

Reports, per (mode, m, d) bucket, the worst residual, the worst distance to the
ground truth and the mean time per scenario.

    python scripts/recovery_sweep.py --count 40 --depth 25
"""
import argparse
import time
from collections import defaultdict

import numpy as np

from pexider.convex import hausdorff
from pexider.decomposition import decompose, pair_samples, sample_points, verify_decomposition
from pexider.scenarios import random_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=40)
    ap.add_argument("--depth", type=int, default=25)
    ap.add_argument("--tol", type=float, default=1e-6)
    ap.add_argument("--samples", type=int, default=21)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    stats = defaultdict(lambda: [0, 0.0, 0.0, 0.0])
    for k in range(args.count):
        rng = np.random.default_rng([args.seed, k])
        cone = bool(k % 2)
        m, d = 1 + (k // 2) % 2, 1 + (k // 4) % 2
        spec = random_scenario(rng, m, d, cone, seed=k)
        t0 = time.perf_counter()
        _, F, G, H = spec.build()
        S = sample_points(spec.mode, m, args.samples)
        dec = decompose(G, H, spec.params, S, args.depth, args.tol)
        dec = verify_decomposition(F, G, H, dec, spec.params, S, pair_samples(S, spec.mode), args.tol)
        truth = max(
            hausdorff(dec.alpha, spec.alpha), hausdorff(dec.beta, spec.beta), hausdorff(dec.K, spec.expected_K())
        )
        s = stats[(spec.mode.value, m, d)]
        s[0] += 1
        s[1] = max(s[1], *dec.residuals.values())
        s[2] = max(s[2], truth)
        s[3] += time.perf_counter() - t0

    print(f"{'mode':>14} {'m':>2} {'d':>2} {'runs':>5} {'residual':>10} {'truth':>10} {'s/run':>7}")
    for (mode, m, d), (n, res, truth, secs) in sorted(stats.items()):
        flag = "" if max(res, truth) <= args.tol else "  <-- above tol"
        print(f"{mode:>14} {m:>2} {d:>2} {n:>5} {res:>10.2e} {truth:>10.2e} {secs / n:>7.3f}{flag}")


if __name__ == "__main__":
    main()
