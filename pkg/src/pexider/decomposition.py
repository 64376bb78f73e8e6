"""Recover the additive core and constant sets of a set-valued Pexider triple.

Given maps F, G, H into compact convex sets and parameters with

    F(a x + b y + c) = A G(x) + B H(y) + C,

the core is the dyadic limit ``core(x) = lim 2^-n G1(2^n x)`` of the map G
normalised so that its value at the origin contains 0.  With
``F0 = A * core`` the triple decomposes as

    F(x + c) = F0(x / a) + K,   A G(x) = F0(x) + A alpha,
    B H(x) = F0(b x / a) + B beta,   K = A alpha + B beta + F0(0) + C,

where ``alpha = G(0)`` and ``beta = H(0)``.  Every stage re-checks its own
precondition instead of trusting that the input solves the equation.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .convex import (
    ConvexSet,
    IntervalBox,
    InvalidInput,
    SupportGrid,
    as_point,
    contains,
    default_tol,
    excess,
    hausdorff,
    minkowski_sum,
    msum,
    scale,
    singleton,
)
from .laws import LawId, LawReport
from .limits import ConvergenceTrace, NotDecreasingError, SetSequence, tail_limit


class DomainMode(str, enum.Enum):
    VECTOR = "vector"
    POSITIVE_CONE = "cone"


class DomainError(InvalidInput):
    """A map was evaluated outside its declared domain."""


class HalvingError(ValueError):
    """The dyadic sequence 2^-n G(2^n x) failed to decrease."""

    def __init__(self, x: np.ndarray, index: int, excess: float | None = None):
        self.x = np.asarray(x).tolist()
        self.index = index
        self.excess = excess
        super().__init__(f"halving violated at x={self.x}, n={index} (excess {excess:.3g})")


@dataclass(frozen=True)
class SetValuedMap:
    """Pure map from points of R^m to convex sets in R^d."""

    fn: Callable[[np.ndarray], ConvexSet]
    m: int
    d: int
    mode: DomainMode = DomainMode.VECTOR
    name: str = "map"

    def __call__(self, x) -> ConvexSet:
        x = as_point(x, self.m)
        if self.mode is DomainMode.POSITIVE_CONE and np.any(x < -1e-12):
            raise DomainError(f"{self.name} is defined on the positive cone; got x={x.tolist()}")
        return self.fn(x)

    def translated(self, t, name: str | None = None) -> "SetValuedMap":
        t = as_point(t, self.d)
        return replace(self, fn=lambda x: self.fn(x).translate(t), name=name or self.name)

    def scaled(self, lam: float, name: str | None = None) -> "SetValuedMap":
        return replace(self, fn=lambda x: scale(lam, self.fn(x)), name=name or self.name)


@dataclass(frozen=True)
class PexiderParams:
    a: float
    b: float
    A: float
    B: float
    c: np.ndarray
    C: ConvexSet

    def __post_init__(self):
        for name in ("a", "b", "A", "B"):
            v = float(getattr(self, name))
            if not (v > 0 and math.isfinite(v)):
                raise InvalidInput(f"parameter {name} must be a positive real, got {v}")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "c", as_point(self.c))

    @property
    def m(self) -> int:
        return self.c.size

    @property
    def d(self) -> int:
        return self.C.dim


@dataclass(frozen=True)
class Decomposition:
    F0: SetValuedMap
    alpha: ConvexSet
    beta: ConvexSet
    K: ConvexSet
    core: SetValuedMap | None = None
    anchors: tuple[np.ndarray, np.ndarray] | None = None
    residuals: dict[str, float] = field(default_factory=dict)
    traces: dict[str, ConvergenceTrace] = field(default_factory=dict)
    tol: float | None = None

    @property
    def passed(self) -> bool:
        if self.tol is None or not self.residuals:
            return False
        return all(r <= self.tol for r in self.residuals.values())


@dataclass(frozen=True)
class HalvingResult:
    ok: bool
    witness: list[float] | None = None
    gap: float = 0.0

    def __bool__(self) -> bool:
        return self.ok


def anchor_point(S: ConvexSet) -> np.ndarray:
    """Deterministic point of ``S``: box centre, vertex mean, or Steiner point."""
    if isinstance(S, IntervalBox):
        return (S.lo + S.hi) / 2.0
    V = S.extreme_points()
    if not isinstance(S, SupportGrid) or len(V) <= 2:
        return V.mean(axis=0)
    # Steiner point of a polygon: vertices weighted by exterior angle / 2pi
    e_in = V - np.roll(V, 1, axis=0)
    e_out = np.roll(V, -1, axis=0) - V
    turn = np.arctan2(e_in[:, 0] * e_out[:, 1] - e_in[:, 1] * e_out[:, 0], (e_in * e_out).sum(1))
    return (turn[:, None] * V).sum(axis=0) / turn.sum()


def normalize_at_zero(
    G: SetValuedMap, H: SetValuedMap, g0=None, h0=None, tol: float = 1e-9
) -> tuple[SetValuedMap, SetValuedMap, np.ndarray, np.ndarray]:
    """Shift G and H so their values at the origin contain 0.

    Anchors default to :func:`anchor_point`; explicit anchors must lie in
    G(0) and H(0) respectively.
    """
    zero = np.zeros(G.m)
    G0, H0 = G(zero), H(zero)
    g0 = anchor_point(G0) if g0 is None else as_point(g0, G.d)
    h0 = anchor_point(H0) if h0 is None else as_point(h0, H.d)
    if not contains(G0, singleton(g0), tol) or not contains(H0, singleton(h0), tol):
        raise InvalidInput("anchors must lie in G(0) and H(0)")
    return G.translated(-g0, G.name + "1"), H.translated(-h0, H.name + "1"), g0, h0


def check_halving(G: SetValuedMap, samples: Iterable, tol: float | None = None) -> HalvingResult:
    """Test G(2x) inside 2 G(x) at every sample; report the first failure."""
    worst = 0.0
    for x in samples:
        x = as_point(x, G.m)
        outer, inner = scale(2.0, G(x)), G(2.0 * x)
        gap = excess(inner, outer)
        t = default_tol(outer, inner) if tol is None else tol
        if gap > t:
            return HalvingResult(False, x.tolist(), gap)
        worst = max(worst, gap)
    return HalvingResult(True, None, worst)


def dyadic_sequence(G: SetValuedMap, x) -> SetSequence:
    x = as_point(x, G.m)
    return SetSequence(lambda n: scale(2.0**-n, G(2.0**n * x)))


def compute_f0(
    G: SetValuedMap, x, depth: int = 40, tol: float = 1e-6, *, strict: bool = True
) -> tuple[ConvexSet, ConvergenceTrace]:
    """Dyadic limit of 2^-n G(2^n x); G should already be normalised."""
    seq = dyadic_sequence(G, x)
    incl = default_tol(seq.term(0))
    try:
        return tail_limit(seq, depth, tol, strict=strict, incl_tol=incl)
    except NotDecreasingError as err:
        raise HalvingError(as_point(x), err.index, err.excess) from None


class DyadicCore:
    """Memoised x -> compute_f0(G, x); keeps the convergence trace per point."""

    def __init__(self, G: SetValuedMap, depth: int, tol: float, strict: bool = True):
        self.G, self.depth, self.tol, self.strict = G, depth, tol, strict
        self._memo: dict[bytes, tuple[ConvexSet, ConvergenceTrace]] = {}

    def evaluate(self, x: np.ndarray) -> tuple[ConvexSet, ConvergenceTrace]:
        x = np.asarray(x, dtype=float) + 0.0
        key = x.tobytes()
        if key not in self._memo:
            self._memo[key] = compute_f0(self.G, x, self.depth, self.tol, strict=self.strict)
        return self._memo[key]

    def __call__(self, x: np.ndarray) -> ConvexSet:
        return self.evaluate(x)[0]

    def traces(self) -> dict[str, ConvergenceTrace]:
        return {_point_label(np.frombuffer(k)): tr for k, (_, tr) in self._memo.items()}

    def as_map(self, name: str = "core") -> SetValuedMap:
        return SetValuedMap(self, self.G.m, self.G.d, self.G.mode, name)


def _point_label(x) -> str:
    return "x=(" + ",".join(f"{v:g}" for v in np.asarray(x).reshape(-1)) + ")"


def cross_consistency(
    F: SetValuedMap,
    H: SetValuedMap,
    core: SetValuedMap,
    p: PexiderParams,
    samples: Iterable,
    depth: int = 40,
    tol: float = 1e-6,
) -> LawReport:
    """Compare A core(x) with the dyadic limits of 2^-n F(a 2^n x + c) and of
    B 2^-n H(2^n a x / b).

    Those two sequences need not be nested (their constant part may miss the
    origin), so they are only required to converge, not to decrease.
    """
    # the core itself is accurate to tol / 8 when built by decompose()
    tol_f, tol_h = tol / 2.0, tol / (2.0 * max(p.B, 1.0))
    worst, worst_x = 0.0, None
    for x in samples:
        x = as_point(x, core.m)
        target = scale(p.A, core(x))
        f_seq = SetSequence(lambda n: scale(2.0**-n, F(p.a * 2.0**n * x + p.c)), declared_decreasing=False)
        h_seq = SetSequence(lambda n: scale(2.0**-n, H(2.0**n * p.a * x / p.b)), declared_decreasing=False)
        f_lim, f_tr = tail_limit(f_seq, depth, tol_f)
        h_lim, h_tr = tail_limit(h_seq, depth, tol_h)
        gap = max(hausdorff(target, f_lim), hausdorff(target, scale(p.B, h_lim)))
        if not (f_tr.converged and h_tr.converged):
            gap = math.inf
        if gap > worst or worst_x is None:
            worst, worst_x = gap, x.tolist()
    return LawReport(LawId.CROSS_CONSISTENCY, worst, tol, {"x": worst_x})


def extract_constants(G: SetValuedMap, H: SetValuedMap, F0: SetValuedMap, p: PexiderParams) -> Decomposition:
    zero = np.zeros(G.m)
    alpha, beta = G(zero), H(zero)
    K = msum([scale(p.A, alpha), scale(p.B, beta), F0(zero), p.C])
    return Decomposition(F0=F0, alpha=alpha, beta=beta, K=K)


def verify_decomposition(
    F: SetValuedMap,
    G: SetValuedMap,
    H: SetValuedMap,
    dec: Decomposition,
    p: PexiderParams,
    samples: Sequence,
    pair_samples: Sequence[tuple],
    tol: float = 1e-6,
) -> Decomposition:
    """Fill ``residuals`` with the worst Hausdorff gap of each identity.

    ``"F"`` is tested at ``x = a s`` for each sample ``s`` so that ``x + c``
    stays in the image of the equation; ``"additive"`` runs over
    ``pair_samples``.
    """
    F0 = dec.F0
    res = {"F": 0.0, "G": 0.0, "H": 0.0, "additive": 0.0}
    for s in samples:
        s = as_point(s, G.m)
        res["F"] = max(res["F"], hausdorff(F(p.a * s + p.c), minkowski_sum(F0(s), dec.K)))
        res["G"] = max(res["G"], hausdorff(scale(p.A, G(s)), minkowski_sum(F0(s), scale(p.A, dec.alpha))))
        res["H"] = max(
            res["H"], hausdorff(scale(p.B, H(s)), minkowski_sum(F0(p.b * s / p.a), scale(p.B, dec.beta)))
        )
    for x1, x2 in pair_samples:
        x1, x2 = as_point(x1, G.m), as_point(x2, G.m)
        res["additive"] = max(res["additive"], hausdorff(F0(x1 + x2), minkowski_sum(F0(x1), F0(x2))))
    return replace(dec, residuals=res, tol=tol)


def verify_induction_identity(
    F: SetValuedMap, G: SetValuedMap, p: PexiderParams, x, n: int, tol: float = 1e-9
) -> LawReport:
    """F(n a x + c) + (n-1) A G(0) against F(a x + c) + (n-1) A G(x)."""
    if n < 1:
        raise InvalidInput("n must be a positive integer")
    x = as_point(x, G.m)
    k = (n - 1) * p.A
    lhs = minkowski_sum(F(n * p.a * x + p.c), scale(k, G(np.zeros_like(x))))
    rhs = minkowski_sum(F(p.a * x + p.c), scale(k, G(x)))
    return LawReport(LawId.INDUCTION_IDENTITY, hausdorff(lhs, rhs), tol, {"x": x.tolist(), "n": n})


def residual_scan(
    F: SetValuedMap, G: SetValuedMap, H: SetValuedMap, p: PexiderParams, pairs: Iterable[tuple]
) -> float:
    """Worst Hausdorff defect of the functional equation over (x, y) pairs."""
    worst = 0.0
    for x, y in pairs:
        x, y = as_point(x, G.m), as_point(y, H.m)
        lhs = F(p.a * x + p.b * y + p.c)
        rhs = msum([scale(p.A, G(x)), scale(p.B, H(y)), p.C])
        worst = max(worst, hausdorff(lhs, rhs))
    return worst


def decompose(
    G: SetValuedMap,
    H: SetValuedMap,
    p: PexiderParams,
    samples: Iterable = (),
    depth: int = 40,
    tol: float = 1e-6,
    *,
    strict: bool = True,
    anchors: tuple | None = None,
) -> Decomposition:
    """Normalise, build the dyadic core and extract the constant sets.

    The core is computed to ``tol / (8 max(A, 1))`` so that the identities
    assembled from it (up to three core evaluations scaled by ``A``) stay within
    ``tol``.  ``samples`` are evaluated eagerly so their traces are recorded.
    """
    g0, h0 = anchors if anchors is not None else (None, None)
    G1, _, g0, h0 = normalize_at_zero(G, H, g0, h0)
    core = DyadicCore(G1, depth, tol / (8.0 * max(p.A, 1.0)), strict=strict)
    for s in samples:
        core.evaluate(as_point(s, G.m))
    core_map = core.as_map("core")
    F0 = core_map.scaled(p.A, "F0")
    dec = extract_constants(G, H, F0, p)
    return replace(dec, core=core_map, anchors=(g0, h0), traces=core.traces())


def sample_points(mode: DomainMode, m: int, count: int, step: float = 0.25) -> list[np.ndarray]:
    """Dyadic lattice samples: symmetric for vector domains, nonnegative for cones.

    For ``m = 1`` there are ``count`` points; for ``m = 2`` a square lattice of
    side ``ceil(sqrt(count))``.
    """
    if count < 1:
        raise InvalidInput("need at least one sample")
    side = count if m == 1 else math.ceil(math.sqrt(count))
    if mode is DomainMode.VECTOR:
        half = side // 2
        ks = list(range(-half, -half + side))
    else:
        ks = list(range(side))
    if m == 1:
        return [np.array([k * step]) for k in ks]
    return [np.array([i * step, j * step]) for i in ks for j in ks]


def pair_samples(points: Sequence[np.ndarray], mode: DomainMode, limit: int | None = None) -> list[tuple]:
    """Deterministic pairs for the additivity check; vector mode adds (x, -x)."""
    n = len(points)
    limit = n if limit is None else limit
    pairs = [(points[i], points[(7 * i + 3) % n]) for i in range(min(n, limit))]
    if mode is DomainMode.VECTOR:
        pairs += [(x, -x) for x in points[: min(n, limit)]]
    return pairs
