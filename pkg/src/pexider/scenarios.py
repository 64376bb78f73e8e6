"""Ground-truth solution triples, perturbations and random corpora."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Any

import numpy as np

from .convex import (
    ConvexSet,
    FinitePointSet,
    GRID_M,
    IntervalBox,
    InvalidInput,
    SupportGrid,
    VPolytope2,
    _merge_directions,
    as_point,
    from_literal,
    hausdorff,
    msum,
    scale,
    singleton,
    to_literal,
    to_polygon,
    uniform_directions,
)
from .decomposition import DomainMode, PexiderParams, SetValuedMap


@dataclass(frozen=True)
class SingletonLinear:
    """Core x -> {L x}; additive on the whole space."""

    matrix: np.ndarray

    def __post_init__(self):
        L = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        if L.shape[0] not in (1, 2) or L.shape[1] not in (1, 2) or not np.all(np.isfinite(L)):
            raise InvalidInput(f"linear core must be a finite d x m matrix, got shape {L.shape}")
        object.__setattr__(self, "matrix", L)

    @property
    def m(self) -> int:
        return self.matrix.shape[1]

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    domain = DomainMode.VECTOR


@dataclass(frozen=True)
class ConeCombination:
    """Core x -> sum_i x_i K_i; additive only for x in the positive orthant."""

    generators: tuple[ConvexSet, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        if len(gens) not in (1, 2) or len({g.dim for g in gens}) != 1:
            raise InvalidInput("cone core needs 1 or 2 generators of equal dimension")
        object.__setattr__(self, "generators", gens)

    @property
    def m(self) -> int:
        return len(self.generators)

    @property
    def d(self) -> int:
        return self.generators[0].dim

    domain = DomainMode.POSITIVE_CONE


CoreSpec = SingletonLinear | ConeCombination


def gen_core(spec: CoreSpec, mode: DomainMode | None = None) -> SetValuedMap:
    mode = spec.domain if mode is None else DomainMode(mode)
    if isinstance(spec, ConeCombination):
        if mode is not DomainMode.POSITIVE_CONE:
            raise InvalidInput("a cone-combination core is additive only on the positive cone")
        gens = spec.generators
        return SetValuedMap(lambda x: msum(scale(xi, K) for xi, K in zip(x, gens)), spec.m, spec.d, mode, "F0")
    L = spec.matrix
    return SetValuedMap(lambda x: singleton(L @ x), spec.m, spec.d, mode, "F0")


def build_solution(
    F0: SetValuedMap, alpha: ConvexSet, beta: ConvexSet, p: PexiderParams
) -> tuple[SetValuedMap, SetValuedMap, SetValuedMap]:
    """Triple (F, G, H) solving the equation exactly for the given core.

    G(x) = F0(x)/A + alpha and H(y) = F0(b y / a)/B + beta.  F lives on the
    image of (x, y) -> a x + b y + c and is evaluated through the split y = 0,
    F(z) = A G((z - c)/a) + B H(0) + C; :func:`certify_well_defined` checks
    other splits agree.
    """
    if not (alpha.dim == beta.dim == p.C.dim == F0.d) or p.c.size != F0.m:
        raise InvalidInput("scenario dimensions are inconsistent")
    G = SetValuedMap(lambda x: scale(1.0 / p.A, F0(x)) + alpha, F0.m, F0.d, F0.mode, "G")
    H = SetValuedMap(lambda y: scale(1.0 / p.B, F0(p.b * y / p.a)) + beta, F0.m, F0.d, F0.mode, "H")
    zero = np.zeros(F0.m)

    def F_eval(z):
        x = (z - p.c) / p.a
        return msum([scale(p.A, G(x)), scale(p.B, H(zero)), p.C])

    F = SetValuedMap(F_eval, F0.m, F0.d, DomainMode.VECTOR, "F")
    return F, G, H


def certify_well_defined(G, H, p: PexiderParams, pairs, shift: float = 0.5) -> float:
    """Worst disagreement of A G(x) + B H(y) + C across splits of the same a x + b y + c.

    Each (x, y) is moved to (x + b t, y - a t) with ``t = shift * y / a``, which
    keeps both arguments in the positive cone when they started there.
    """
    worst = 0.0
    for x, y in pairs:
        x, y = as_point(x), as_point(y)
        t = shift * y / p.a
        x2, y2 = x + p.b * t, y - p.a * t
        lhs = msum([scale(p.A, G(x)), scale(p.B, H(y)), p.C])
        rhs = msum([scale(p.A, G(x2)), scale(p.B, H(y2)), p.C])
        worst = max(worst, hausdorff(lhs, rhs))
    return worst


def _noise_rng(seed: int, x: np.ndarray) -> np.random.Generator:
    digest = hashlib.sha256(np.asarray(x, dtype=float).tobytes()).digest()
    return np.random.default_rng([seed & (2**64 - 1), int.from_bytes(digest[:8], "little")])


def _facet_normals(S: ConvexSet) -> np.ndarray:
    if S.dim == 1:
        return np.zeros((0, 1))
    if isinstance(S, SupportGrid):
        return S.directions
    return to_polygon(S).edge_normals()


def perturb_set(S: ConvexSet, eps: float, rng: np.random.Generator, m: int = GRID_M) -> ConvexSet:
    """Outward support noise in [0, eps] on a grid, repaired by halfplane intersection.

    The grid is the uniform one plus the facet normals of ``S``, so with zero
    noise ``S`` is reproduced exactly.  In 2-d the noise is capped at
    ``eps cos(pi / m)``: the grid spacing can stretch the repaired set's reach
    by ``1 / cos(pi / m)``, and the cap keeps the Hausdorff bound at ``eps``.
    """
    if eps < 0:
        raise InvalidInput("eps must be nonnegative")
    if eps == 0:
        return S
    if S.dim == 1:
        dirs, cap = uniform_directions(2, 1), eps
    else:
        dirs, cap = _merge_directions(uniform_directions(m), _facet_normals(S)), eps * np.cos(np.pi / m)
    vals = S.support_many(dirs) + rng.uniform(0.0, cap, size=len(dirs))
    return SupportGrid(dirs, vals)


def perturb(M: SetValuedMap, eps: float, seed: int) -> SetValuedMap:
    """Deterministic per (point, seed) outward perturbation of every value of M."""
    if eps < 0:
        raise InvalidInput("eps must be nonnegative")
    if eps == 0:
        return M
    return SetValuedMap(
        lambda x: perturb_set(M.fn(x), eps, _noise_rng(seed, x)), M.m, M.d, M.mode, M.name + "~"
    )


# scenarios -------------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioSpec:
    core: CoreSpec
    alpha: ConvexSet
    beta: ConvexSet
    params: PexiderParams
    perturb_eps: float = 0.0
    seed: int = 0

    def __post_init__(self):
        d, m = self.core.d, self.core.m
        if not (self.alpha.dim == self.beta.dim == self.params.d == d) or self.params.m != m:
            raise InvalidInput("scenario dimensions are inconsistent across core, alpha, beta and params")
        if not self.perturb_eps >= 0:
            raise InvalidInput("perturb_eps must be nonnegative")

    @property
    def mode(self) -> DomainMode:
        return self.core.domain

    def build(self) -> tuple[SetValuedMap, SetValuedMap, SetValuedMap, SetValuedMap]:
        """(F0, F, G, H), perturbed when ``perturb_eps > 0``."""
        F0 = gen_core(self.core)
        F, G, H = build_solution(F0, self.alpha, self.beta, self.params)
        if self.perturb_eps > 0:
            F = perturb(F, self.perturb_eps, self.seed)
            G = perturb(G, self.perturb_eps, self.seed + 1)
            H = perturb(H, self.perturb_eps, self.seed + 2)
        return F0, F, G, H

    def expected_K(self) -> ConvexSet:
        p = self.params
        return msum([scale(p.A, self.alpha), scale(p.B, self.beta), p.C])

    def to_dict(self) -> dict[str, Any]:
        return {
            "core": core_to_dict(self.core),
            "alpha": to_literal(self.alpha),
            "beta": to_literal(self.beta),
            "params": params_to_dict(self.params),
            "perturb_eps": self.perturb_eps,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "ScenarioSpec":
        if not isinstance(obj, dict):
            raise InvalidInput("scenario: must be an object")

        def parsed(key, parse, default=None):
            if key not in obj and default is None:
                raise InvalidInput(f"scenario is missing field {key!r}")
            try:
                return parse(obj.get(key, default))
            except (InvalidInput, KeyError, TypeError, ValueError) as exc:
                raise InvalidInput(f"scenario.{key}: {exc}") from None

        return cls(
            core=parsed("core", core_from_dict),
            alpha=parsed("alpha", from_literal),
            beta=parsed("beta", from_literal),
            params=parsed("params", params_from_dict),
            perturb_eps=parsed("perturb_eps", float, 0.0),
            seed=parsed("seed", int, 0),
        )


def core_to_dict(core: CoreSpec) -> dict[str, Any]:
    if isinstance(core, SingletonLinear):
        return {"kind": "singleton_linear", "matrix": core.matrix.tolist()}
    return {"kind": "cone", "generators": [to_literal(g) for g in core.generators]}


def core_from_dict(obj: dict[str, Any]) -> CoreSpec:
    kind = obj.get("kind") if isinstance(obj, dict) else None
    if kind == "singleton_linear":
        return SingletonLinear(obj["matrix"])
    if kind == "cone":
        return ConeCombination(tuple(from_literal(g) for g in obj["generators"]))
    raise InvalidInput(f"core.kind must be 'singleton_linear' or 'cone', got {kind!r}")


def params_to_dict(p: PexiderParams) -> dict[str, Any]:
    return {"a": p.a, "b": p.b, "A": p.A, "B": p.B, "c": p.c.tolist(), "C": to_literal(p.C)}


def params_from_dict(obj: dict[str, Any]) -> PexiderParams:
    try:
        return PexiderParams(
            float(obj["a"]), float(obj["b"]), float(obj["A"]), float(obj["B"]), obj["c"], from_literal(obj["C"])
        )
    except KeyError as exc:
        raise InvalidInput(f"params is missing field {exc}") from None
    except TypeError as exc:
        raise InvalidInput(f"bad params: {exc}") from None


# random corpora --------------------------------------------------------------


def random_polygon(rng: np.random.Generator, k: int | None = None, radius: float = 1.0, center=None) -> VPolytope2:
    k = int(rng.integers(1, 7)) if k is None else k
    center = rng.uniform(-1, 1, 2) if center is None else as_point(center, 2)
    return VPolytope2(center + rng.uniform(-radius, radius, (k, 2)))


def random_box(rng: np.random.Generator, d: int, size: float = 1.0, center=None) -> IntervalBox:
    center = rng.uniform(-1, 1, d) if center is None else as_point(center, d)
    half = rng.uniform(0, size / 2, d)
    return IntervalBox(center - half, center + half)


def random_convex(rng: np.random.Generator, d: int, size: float = 1.0) -> ConvexSet:
    """Box or polygon (2-d) of diameter at most ``size * sqrt(2)``."""
    if d == 2 and rng.random() < 0.6:
        return random_polygon(rng, radius=size / 2)
    return random_box(rng, d, size)


def random_point_set(rng: np.random.Generator, d: int, k: int | None = None) -> FinitePointSet:
    """``k`` distinct points of the integer lattice {-3..3}^d."""
    k = int(rng.integers(2, 6)) if k is None else k
    idx = rng.choice(7**d, size=k, replace=False)
    return FinitePointSet(np.stack([(idx // 7**i) % 7 for i in range(d)], axis=1).astype(float) - 3.0)


def random_scenario(rng: np.random.Generator, m: int, d: int, cone: bool, seed: int = 0) -> ScenarioSpec:
    """Unit-scale scenario: A, B in [0.5, 2], constant sets of diameter <= 1."""
    if cone:
        core: CoreSpec = ConeCombination(tuple(random_convex(rng, d, 0.7) for _ in range(m)))
    else:
        core = SingletonLinear(rng.uniform(-2, 2, (d, m)))
    params = PexiderParams(
        a=float(rng.uniform(0.5, 2)),
        b=float(rng.uniform(0.5, 2)),
        A=float(rng.uniform(0.5, 2)),
        B=float(rng.uniform(0.5, 2)),
        c=rng.uniform(-1, 1, m) if not cone else rng.uniform(0, 1, m),
        C=random_convex(rng, d, 0.7),
    )
    return ScenarioSpec(core, random_convex(rng, d, 0.7), random_convex(rng, d, 0.7), params, 0.0, seed)


def example_scenario() -> ScenarioSpec:
    """a = b = 1, A = 2, B = 3, c = 0, C = [0, 1], core {x}, alpha [0, 1], beta [0, 2]."""
    p = PexiderParams(1.0, 1.0, 2.0, 3.0, [0.0], IntervalBox([0.0], [1.0]))
    return ScenarioSpec(SingletonLinear([[1.0]]), IntervalBox([0.0], [1.0]), IntervalBox([0.0], [2.0]), p)
