"""Command-line driver: law corpora, scenario recovery and decomposition runs.

Exit codes: 0 when every executed check passes, 1 when any fails, 2 for an
unreadable or invalid configuration.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import laws, limits
from .convex import (
    TOL_EXACT,
    IntervalBox,
    InvalidInput,
    default_tol,
    from_literal,
    hausdorff,
    msum,
    scale,
    singleton,
    to_literal,
)
from .decomposition import (
    DomainMode,
    HalvingError,
    PexiderParams,
    SetValuedMap,
    check_halving,
    cross_consistency,
    decompose,
    normalize_at_zero,
    pair_samples,
    residual_scan,
    sample_points,
    verify_decomposition,
    verify_induction_identity,
)
from .scenarios import (
    ScenarioSpec,
    certify_well_defined,
    params_from_dict,
    random_convex,
    random_point_set,
)

log = logging.getLogger("pexider")

MODES = ("laws", "scenario", "decompose")
LAW_CASES = 500
GRID_SAMPLES = 21


@dataclass
class RunConfig:
    mode: str = "scenario"
    scenario: dict[str, Any] | None = None
    maps: dict[str, Any] | None = None
    params: dict[str, Any] | None = None
    depth_n: int = 25
    tol: float = 1e-6
    samples: int | None = None
    seed: int = 0
    output: str | None = None

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise InvalidInput(f"mode: expected one of {MODES}, got {self.mode!r}")
        if not isinstance(self.depth_n, int) or not 1 <= self.depth_n <= 64:
            raise InvalidInput(f"depth_n: must be an integer in [1, 64], got {self.depth_n!r}")
        if not (isinstance(self.tol, (int, float)) and self.tol > 0 and math.isfinite(self.tol)):
            raise InvalidInput(f"tol: must be a positive number, got {self.tol!r}")
        if self.samples is not None and (not isinstance(self.samples, int) or self.samples < 1):
            raise InvalidInput(f"samples: must be an integer >= 1, got {self.samples!r}")
        if not isinstance(self.seed, int):
            raise InvalidInput(f"seed: must be an integer, got {self.seed!r}")
        for key in ("scenario", "maps", "params"):
            if getattr(self, key) is not None and not isinstance(getattr(self, key), dict):
                raise InvalidInput(f"{key}: must be an object")
        if self.mode == "scenario" and self.scenario is None:
            raise InvalidInput("scenario: required in scenario mode")
        if self.mode == "decompose" and (self.maps is None or self.params is None):
            raise InvalidInput("maps/params: required in decompose mode")
        return self

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "RunConfig":
        if not isinstance(obj, dict):
            raise InvalidInput("config: top level must be a JSON object")
        known = set(cls.__dataclass_fields__)
        extra = set(obj) - known
        if extra:
            raise InvalidInput(f"config: unknown field(s) {sorted(extra)}")
        try:
            return cls(**obj)
        except TypeError as exc:
            raise InvalidInput(f"config: {exc}") from None


# checks ----------------------------------------------------------------------


@dataclass
class Check:
    """Aggregate of one named check over many cases; fails if any case failed."""

    gap: float
    tol: float
    detail: dict[str, Any] = field(default_factory=dict)
    count: int = 1
    failures: int = 0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def merge(self, gap: float, tol: float, detail: dict[str, Any] | None = None) -> None:
        self.count += 1
        self.failures += int(not gap <= tol)
        if gap > self.gap:
            self.gap, self.tol = gap, tol
            if detail is not None:
                self.detail = detail

    def as_dict(self) -> dict[str, Any]:
        out = {"gap": _num(self.gap), "tol": self.tol, "verdict": "pass" if self.passed else "fail"}
        if self.count > 1:
            out["cases"] = self.count
            out["failures"] = self.failures
        if self.detail:
            out["detail"] = self.detail
        return out


def _num(x: float):
    return x if math.isfinite(x) else str(x)


def _record(checks: dict[str, Check], name: str, gap: float, tol: float, detail=None) -> None:
    if name in checks:
        checks[name].merge(gap, tol, detail)
    else:
        checks[name] = Check(gap, tol, detail or {}, failures=int(not gap <= tol))


# laws mode -------------------------------------------------------------------


def _radstrom_triple(rng: np.random.Generator, holds: bool):
    d = int(rng.integers(1, 3))
    B = random_convex(rng, d, 2.0)
    C = random_convex(rng, d, 2.0)
    if holds:
        V = B.extreme_points()
        w = rng.dirichlet(np.ones(len(V)), size=int(rng.integers(1, 5)))
        pts = w @ V
        A = IntervalBox(pts.min(0), pts.max(0)) if d == 1 else from_literal({"type": "poly2", "vertices": pts.tolist()})
    else:
        t = rng.normal(size=d)
        A = B.translate(rng.uniform(0.1, 1.0) * t / np.linalg.norm(t))
    return A, B, C


def run_laws(cfg: RunConfig) -> tuple[dict[str, Any], dict[str, Any]]:
    n = LAW_CASES if cfg.samples is None else cfg.samples
    rng = np.random.default_rng(cfg.seed)
    checks: dict[str, Check] = {}
    counters = {"finite_equality_failures": 0, "finite_cases": 0}
    for _ in range(n):
        d = int(rng.integers(1, 3))
        A, B = random_convex(rng, d, 2.0), random_convex(rng, d, 2.0)
        lam = float(rng.uniform(-5, 5))
        r = laws.law_distribute_scalar(lam, A, B, TOL_EXACT)
        _record(checks, r.law_id.value, r.gap, r.tol, {"lam": lam})

        lam, mu = rng.uniform(0, 5, 2)
        incl, eq = laws.law_scalar_split(float(lam), float(mu), A, TOL_EXACT)
        _record(checks, incl.law_id.value, incl.gap, incl.tol)
        _record(checks, eq.law_id.value, eq.gap, eq.tol, {"lam": float(lam), "mu": float(mu)})
        lam, mu = rng.uniform(-5, 5, 2)
        incl, _ = laws.law_scalar_split(float(lam), float(mu), A, TOL_EXACT)
        _record(checks, incl.law_id.value, incl.gap, incl.tol)

        P = random_point_set(rng, d)
        incl, eq = laws.law_scalar_split(1.0, 1.0, P)
        _record(checks, "ScalarSplitInclusion(finite)", incl.gap, incl.tol)
        counters["finite_cases"] += 1
        counters["finite_equality_failures"] += int(not eq.passed)

        r = laws.radstrom_cancel(*_radstrom_triple(rng, True), tol=TOL_EXACT)
        _record(checks, "RadstromCancel(premise)", r.gap if r.branch == "premise" else math.inf, r.tol)
        r = laws.radstrom_cancel(*_radstrom_triple(rng, False), tol=TOL_EXACT)
        _record(checks, "RadstromCancel(contrapositive)", r.gap if r.branch == "contrapositive" else math.inf, r.tol)

    for _ in range(max(1, n // 5)):
        seq_a, seq_b = random_decreasing_pair(rng)
        r = limits.check_limit_sum(seq_a, seq_b, cfg.depth_n, cfg.tol)
        _record(checks, r.law_id.value, r.gap, r.tol)

    seq = limits.SetSequence(lambda k: IntervalBox([0.0], [1.0 + 2.0**-k]))
    lim, tr = limits.tail_limit(seq, cfg.depth_n, cfg.tol)
    _record(checks, "TailLimit", hausdorff(lim, IntervalBox([0.0], [1.0])) if tr.converged else math.inf,
            cfg.tol, {"terminal_index": tr.terminal_index})
    square = IntervalBox([0.0, 0.0], [1.0, 1.0])
    for r in limits.law_limit_arithmetic(square, square, lambda k: 1.0 - 2.0**-k, 1.0, cfg.depth_n, cfg.tol):
        _record(checks, r.law_id.value, r.gap, r.tol)
    return checks, counters


def random_decreasing_pair(rng: np.random.Generator):
    """Two sequences T + 2^-n U with 0 in U, hence decreasing, in a common dimension."""
    d = int(rng.integers(1, 3))

    def one():
        T, U = random_convex(rng, d, 2.0), random_convex(rng, d, 2.0)
        U = U.translate(-U.extreme_points().mean(axis=0))
        return limits.SetSequence(lambda k: T + scale(2.0**-k, U))

    return one(), one()


# map families for decompose mode ----------------------------------------------


def map_from_dict(obj: dict[str, Any], name: str) -> SetValuedMap:
    """Declarative families: ``affine`` {L x} + S, ``cone`` sum x_i K_i + S, ``square`` {x^2} + S."""
    try:
        return _map_from_dict(obj, name)
    except KeyError as exc:
        raise InvalidInput(f"maps.{name}: missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInput):
            raise
        raise InvalidInput(f"maps.{name}: {exc}") from None


def _map_from_dict(obj: dict[str, Any], name: str) -> SetValuedMap:
    if not isinstance(obj, dict):
        raise InvalidInput(f"maps.{name}: must be an object")
    family = obj.get("family")
    offset = from_literal(obj["offset"]) if "offset" in obj else None
    if family == "affine":
        L = np.atleast_2d(np.asarray(obj["linear"], dtype=float))
        off = offset if offset is not None else singleton(np.zeros(L.shape[0]))
        mode = DomainMode(obj.get("domain", "vector"))
        return SetValuedMap(lambda x: singleton(L @ x) + off, L.shape[1], L.shape[0], mode, name)
    if family == "cone":
        gens = [from_literal(g) for g in obj["generators"]]
        off = offset if offset is not None else singleton(np.zeros(gens[0].dim))
        return SetValuedMap(
            lambda x: msum([scale(xi, K) for xi, K in zip(x, gens)] + [off]),
            len(gens), gens[0].dim, DomainMode.POSITIVE_CONE, name,
        )
    if family == "square":
        m = int(obj.get("m", 1))
        off = offset if offset is not None else singleton(np.zeros(m))
        return SetValuedMap(lambda x: singleton(x**2) + off, m, off.dim, DomainMode(obj.get("domain", "vector")), name)
    raise InvalidInput(f"maps.{name}.family: expected 'affine', 'cone' or 'square', got {family!r}")


def synthesize_F(G: SetValuedMap, H: SetValuedMap, p: PexiderParams) -> SetValuedMap:
    """F on the image of the equation, through the split y = 0."""
    zero = np.zeros(G.m)
    return SetValuedMap(
        lambda z: msum([scale(p.A, G((z - p.c) / p.a)), scale(p.B, H(zero)), p.C]), G.m, G.d, DomainMode.VECTOR, "F"
    )


# scenario / decompose pipeline -------------------------------------------------


def run_pipeline(F, G, H, p: PexiderParams, cfg: RunConfig, truth: ScenarioSpec | None = None):
    count = GRID_SAMPLES if cfg.samples is None else cfg.samples
    S = sample_points(G.mode, G.m, count)
    pairs = pair_samples(S, G.mode)
    checks: dict[str, Check] = {}
    diagnostics: dict[str, Any] = {}

    G1, H1, g0, h0 = normalize_at_zero(G, H)
    halving = check_halving(G1, S)
    _record(checks, "halving", halving.gap, default_tol(G(S[0])),
            {"witness": halving.witness} if not halving else None)

    try:
        dec = decompose(G, H, p, S, cfg.depth_n, cfg.tol)
    except HalvingError as err:
        diagnostics["halving_error"] = str(err)
        _record(checks, "dyadic_decreasing", math.inf, 0.0, {"x": err.x, "n": err.index})
        dec = decompose(G, H, p, S, cfg.depth_n, cfg.tol, strict=False)
    dec = verify_decomposition(F, G, H, dec, p, S, pairs, cfg.tol)
    for key, gap in dec.residuals.items():
        _record(checks, f"identity_{key}", gap, cfg.tol)
    unconverged = [k for k, tr in dec.traces.items() if not tr.converged]
    _record(checks, "core_converged", float(len(unconverged)), 0.0, {"unconverged": unconverged[:5]} if unconverged else None)

    cross = cross_consistency(F, H, dec.core, p, S, cfg.depth_n, cfg.tol)
    _record(checks, "cross_consistency", cross.gap, cross.tol, cross.witness)

    for x in S:
        for n in range(1, 9):
            r = verify_induction_identity(F, G, p, x, n, tol=_induction_tol(F, G, p, x))
            _record(checks, "induction", r.gap, r.tol, r.witness)

    grid_pairs = [(x, y) for x in S for y in S]
    scan = residual_scan(F, G, H, p, grid_pairs)
    _record(checks, "residual_scan", scan, cfg.tol)
    wd = certify_well_defined(G, H, p, pairs)
    _record(checks, "F_well_defined", wd, cfg.tol)

    if truth is not None:
        _record(checks, "truth_alpha", hausdorff(dec.alpha, truth.alpha), cfg.tol)
        _record(checks, "truth_beta", hausdorff(dec.beta, truth.beta), cfg.tol)
        _record(checks, "truth_K", hausdorff(dec.K, truth.expected_K()), cfg.tol)

    summary = {
        "alpha": to_literal(dec.alpha),
        "beta": to_literal(dec.beta),
        "K": to_literal(dec.K),
        "anchors": {"g0": g0.tolist(), "h0": h0.tolist()},
        "residuals": {k: _num(v) for k, v in dec.residuals.items()},
        "traces": {k: list(tr.gaps) for k, tr in sorted(dec.traces.items())},
    }
    summary.update(diagnostics)
    return checks, summary, dec.traces


def _induction_tol(F, G, p, x) -> float:
    return default_tol(F(p.a * x + p.c), G(x))


# entry points --------------------------------------------------------------------


def run(cfg: RunConfig) -> tuple[dict[str, Any], int, dict]:
    """Execute a validated config; returns (report, exit code, traces)."""
    t0 = time.perf_counter()
    traces: dict = {}
    report: dict[str, Any] = {"config": asdict(cfg)}
    if cfg.mode == "laws":
        checks, counters = run_laws(cfg)
        report["counters"] = counters
    else:
        F, G, H, p, truth = _build_problem(cfg)
        checks, summary, traces = run_pipeline(F, G, H, p, cfg, truth)
        report["decomposition"] = summary
    passed = all(c.passed for c in checks.values())
    report["checks"] = {k: c.as_dict() for k, c in sorted(checks.items())}
    report["verdict"] = "pass" if passed else "fail"
    report["wall_time_ms"] = round((time.perf_counter() - t0) * 1000.0, 3)
    return report, 0 if passed else 1, traces


def _build_problem(cfg: RunConfig):
    try:
        if cfg.mode == "scenario":
            spec = ScenarioSpec.from_dict({"seed": cfg.seed, **cfg.scenario})
            _, F, G, H = spec.build()
            return F, G, H, spec.params, spec
        p = params_from_dict(cfg.params)
        G = map_from_dict(_require(cfg.maps, "G"), "G")
        H = map_from_dict(_require(cfg.maps, "H"), "H")
        F = map_from_dict(cfg.maps["F"], "F") if "F" in cfg.maps else synthesize_F(G, H, p)
    except InvalidInput:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"{cfg.mode}: malformed definition ({exc!r})") from None
    if not (G.m == H.m == p.m and G.d == H.d == p.d):
        raise InvalidInput("maps: G, H and params disagree on dimensions")
    return F, G, H, p, None


def _require(obj: dict, key: str):
    if key not in obj:
        raise InvalidInput(f"maps.{key}: required")
    return obj[key]


def write_traces(traces: dict, out: Path) -> Path | None:
    if not traces:
        return None
    folder = out.with_name(out.stem + "_traces")
    folder.mkdir(parents=True, exist_ok=True)
    for i, (label, tr) in enumerate(sorted(traces.items())):
        with open(folder / f"trace_{i:03d}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "gap"])
            w.writerows((n, repr(g)) for n, g in tr.to_rows())
    with open(folder / "index.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["file", "point", "terminal_index", "converged"])
        for i, (label, tr) in enumerate(sorted(traces.items())):
            w.writerow([f"trace_{i:03d}.csv", label, tr.terminal_index, tr.converged])
    return folder


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pexider", description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, help="JSON run configuration")
    ap.add_argument("--out", type=Path, help="report path (JSON); traces go to <stem>_traces/")
    ap.add_argument("--mode", choices=MODES)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--max-n", type=int, dest="depth_n")
    ap.add_argument("--tol", type=float)
    ap.add_argument("--samples", type=int)
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def load_config(args: argparse.Namespace) -> RunConfig:
    data: dict[str, Any] = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except OSError as exc:
            raise InvalidInput(f"config: cannot read {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"config: invalid JSON ({exc})") from None
    cfg = RunConfig.from_dict(data)
    for key in ("mode", "seed", "depth_n", "tol", "samples"):
        val = getattr(args, key)
        if val is not None:
            setattr(cfg, key, val)
    if args.out is not None:
        cfg.output = str(args.out)
    return cfg.validate()


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args)
        report, code, traces = run(cfg)
    except InvalidInput as exc:
        print(f"pexider: invalid configuration: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2, sort_keys=True)
    if cfg.output:
        out = Path(cfg.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n")
        folder = write_traces(traces, out)
        log.info("report written to %s%s", out, f", traces in {folder}" if folder else "")
    else:
        print(text)
    for name, chk in report["checks"].items():
        log.info("%-32s %-4s gap=%s tol=%s", name, chk["verdict"], chk["gap"], chk["tol"])
    log.info("verdict: %s", report["verdict"])
    return code


if __name__ == "__main__":
    sys.exit(main())
