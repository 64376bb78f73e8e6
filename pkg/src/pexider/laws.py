"""Executable checks of the Minkowski algebra identities and Radstrom cancellation.

Each check returns a :class:`LawReport` whose ``gap`` is the largest observed
violation (a Hausdorff or directed distance); ``verdict`` is ``"pass"`` iff the
gap is within the configured tolerance.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

from .convex import (
    ConvexSet,
    FinitePointSet,
    InvalidInput,
    contains,
    default_tol,
    excess,
    finite_excess,
    finite_hausdorff,
    hausdorff,
    minkowski_sum,
    scale,
)


class LawId(str, enum.Enum):
    DISTRIBUTE_SCALAR = "DistributeScalar"
    SCALAR_SPLIT_INCLUSION = "ScalarSplitInclusion"
    SCALAR_SPLIT_EQUALITY = "ScalarSplitEquality"
    RADSTROM_CANCEL = "RadstromCancel"
    LIMIT_SUM = "LimitSum"
    LIMIT_SCALAR = "LimitScalar"
    LIMIT_SUM_CONVERGENCE = "LimitSumConvergence"
    LIMIT_UNIQUENESS = "LimitUniqueness"
    CROSS_CONSISTENCY = "CrossConsistency"
    INDUCTION_IDENTITY = "InductionIdentity"


@dataclass(frozen=True)
class LawReport:
    law_id: LawId
    gap: float
    tol: float
    witness: dict[str, Any] = field(default_factory=dict)
    branch: str | None = None

    def __post_init__(self):
        if not self.gap >= 0:
            raise ValueError(f"gap must be nonnegative, got {self.gap}")

    @property
    def verdict(self) -> str:
        return "pass" if self.gap <= self.tol else "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def law_distribute_scalar(lam: float, A: ConvexSet, B: ConvexSet, tol: float | None = None) -> LawReport:
    """lam(A + B) against lam A + lam B."""
    if A.dim != B.dim:
        raise InvalidInput("dimension mismatch")
    tol = default_tol(A, B) if tol is None else tol
    lhs = scale(lam, minkowski_sum(A, B))
    rhs = minkowski_sum(scale(lam, A), scale(lam, B))
    return LawReport(LawId.DISTRIBUTE_SCALAR, hausdorff(lhs, rhs), tol, {"lam": lam, "A": A, "B": B})


def law_scalar_split(
    lam: float, mu: float, A: ConvexSet | FinitePointSet, tol: float | None = None
) -> tuple[LawReport, LawReport | None]:
    """Check (lam + mu)A inside lam A + mu A, and equality where it is claimed.

    Equality is checked for convex ``A`` with ``lam, mu >= 0``.  For a finite
    point set both sides are enumerated and equality is always measured, so the
    strict-inclusion phenomenon of nonconvex sets is visible in the report.
    """
    witness = {"lam": lam, "mu": mu, "A": A}
    if isinstance(A, FinitePointSet):
        tol = 1e-12 if tol is None else tol
        lhs = A.scaled(lam + mu)
        rhs = A.scaled(lam) + A.scaled(mu)
        incl = LawReport(LawId.SCALAR_SPLIT_INCLUSION, finite_excess(lhs, rhs), tol, witness)
        eq = LawReport(LawId.SCALAR_SPLIT_EQUALITY, finite_hausdorff(lhs, rhs), tol, witness)
        return incl, eq
    tol = default_tol(A) if tol is None else tol
    lhs = scale(lam + mu, A)
    rhs = minkowski_sum(scale(lam, A), scale(mu, A))
    incl = LawReport(LawId.SCALAR_SPLIT_INCLUSION, excess(lhs, rhs), tol, witness)
    if lam >= 0 and mu >= 0:
        return incl, LawReport(LawId.SCALAR_SPLIT_EQUALITY, hausdorff(lhs, rhs), tol, witness)
    return incl, None


def radstrom_cancel(A: ConvexSet, B: ConvexSet, C: ConvexSet, tol: float = 0.0) -> LawReport:
    """Cancellation: A + C inside B + C forces A inside B.

    When the premise holds the conclusion is tested with a tolerance inflated by
    ``1 + diam(C) / max(diam(A), eps)``.  Otherwise the contrapositive branch
    runs: monotonicity of the sum means A cannot sit inside B, which is
    confirmed.
    """
    witness = {"A": A, "B": B, "C": C}
    if contains(minkowski_sum(B, C), minkowski_sum(A, C), tol):
        slack = tol * (1.0 + C.diameter() / max(A.diameter(), 1e-12))
        return LawReport(LawId.RADSTROM_CANCEL, excess(A, B), slack, witness, branch="premise")
    # A inside B would put A + C inside B + C; the gap is positive iff A sticks out
    gap = 0.0 if not contains(B, A, tol) else 1.0
    return LawReport(LawId.RADSTROM_CANCEL, gap, 0.0, witness, branch="contrapositive")
