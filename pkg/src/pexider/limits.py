"""Decreasing sequences of compact convex sets and their limits.

The intersection of a decreasing sequence is never formed explicitly: the
sequence is walked until two consecutive terms are within ``tol`` in the
Hausdorff metric, and the later of the two is taken as the limit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .convex import ConvexSet, contains, excess, hausdorff, minkowski_sum, scale
from .laws import LawId, LawReport

DEFAULT_DEPTH = 40
DEFAULT_TOL = 1e-6


class NotDecreasingError(ValueError):
    """A sequence declared decreasing grew between two probed terms."""

    def __init__(self, index: int, excess: float | None = None):
        self.index = index
        self.excess = excess
        msg = f"term({index + 1}) is not contained in term({index})"
        if excess is not None:
            msg += f" (excess {excess:.3g})"
        super().__init__(msg)


@dataclass
class SetSequence:
    """Index -> set generator; ``generator`` must be pure."""

    generator: Callable[[int], ConvexSet]
    declared_decreasing: bool = True
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def term(self, n: int) -> ConvexSet:
        if n not in self._cache:
            self._cache[n] = self.generator(n)
        return self._cache[n]

    def map(self, fn: Callable[[ConvexSet], ConvexSet]) -> "SetSequence":
        return SetSequence(lambda n: fn(self.term(n)), self.declared_decreasing)


@dataclass(frozen=True)
class ConvergenceTrace:
    gaps: tuple[float, ...]
    terminal_index: int
    converged: bool
    tol: float

    def to_rows(self) -> list[tuple[int, float]]:
        return list(enumerate(self.gaps))


def first_violation(seq: SetSequence, depth: int, tol: float) -> int | None:
    for n in range(depth):
        if not contains(seq.term(n), seq.term(n + 1), tol):
            return n
    return None


def decreasing_check(seq: SetSequence, depth: int, tol: float = 1e-9) -> bool:
    if depth < 1:
        raise ValueError("depth must be at least 1")
    return first_violation(seq, depth, tol) is None


def tail_limit(
    seq: SetSequence,
    depth: int = DEFAULT_DEPTH,
    tol: float = DEFAULT_TOL,
    *,
    strict: bool = True,
    incl_tol: float | None = None,
) -> tuple[ConvexSet, ConvergenceTrace]:
    """Approximate the intersection of a decreasing sequence.

    Walks ``gaps[n] = hausdorff(term(n), term(n+1))`` for ``n < depth``.  At the
    first ``n`` with ``gaps[n] <= tol`` it returns ``term(n+1)`` and a trace
    with ``terminal_index = n``; otherwise ``term(depth)`` unconverged.

    With ``strict`` set, each step also checks ``term(n+1)`` lies inside
    ``term(n)`` (up to ``incl_tol``, default ``tol``) and raises
    :class:`NotDecreasingError` on the first violation.
    """
    incl_tol = tol if incl_tol is None else incl_tol
    gaps: list[float] = []
    for n in range(depth):
        cur, nxt = seq.term(n), seq.term(n + 1)
        if strict and seq.declared_decreasing and not contains(cur, nxt, incl_tol):
            raise NotDecreasingError(n, excess(nxt, cur))
        gaps.append(hausdorff(cur, nxt))
        if gaps[-1] <= tol:
            return nxt, ConvergenceTrace(tuple(gaps), n, True, tol)
    return seq.term(depth), ConvergenceTrace(tuple(gaps), depth, False, tol)


def check_limit_sum(
    seq_a: SetSequence, seq_b: SetSequence, depth: int = DEFAULT_DEPTH, tol: float = DEFAULT_TOL
) -> LawReport:
    """Limit of (A_n + B_n) against lim A_n + lim B_n."""
    summed = SetSequence(lambda n: minkowski_sum(seq_a.term(n), seq_b.term(n)))
    # three approximate limits enter the comparison; split the budget
    inner = tol / 3.0
    lim_sum, tr = tail_limit(summed, depth, inner, incl_tol=tol)
    lim_a, tr_a = tail_limit(seq_a, depth, inner, incl_tol=tol)
    lim_b, tr_b = tail_limit(seq_b, depth, inner, incl_tol=tol)
    gap = hausdorff(lim_sum, minkowski_sum(lim_a, lim_b))
    witness = {"traces": (tr, tr_a, tr_b)}
    ok = tr.converged and tr_a.converged and tr_b.converged
    return LawReport(LawId.LIMIT_SUM, gap if ok else float("inf"), tol, witness)


def check_sum_convergence(
    seq_a: SetSequence,
    seq_b: SetSequence,
    lim_a: ConvexSet,
    lim_b: ConvexSet,
    depth: int = DEFAULT_DEPTH,
    tol: float = DEFAULT_TOL,
) -> LawReport:
    """A_n -> A and B_n -> B give A_n + B_n -> A + B; reports the gap at ``depth``.

    The witness records the per-index gaps so the monotone approach is visible.
    """
    target = minkowski_sum(lim_a, lim_b)
    gaps = [hausdorff(minkowski_sum(seq_a.term(n), seq_b.term(n)), target) for n in range(depth + 1)]
    return LawReport(LawId.LIMIT_SUM_CONVERGENCE, gaps[-1], tol, {"gaps": gaps})


def law_limit_arithmetic(
    A: ConvexSet,
    B: ConvexSet,
    s_seq: Callable[[int], float],
    s: float,
    depth: int = DEFAULT_DEPTH,
    tol: float = DEFAULT_TOL,
) -> list[LawReport]:
    """Scalar, sum and uniqueness laws for s_n A and s_n B with s_n -> s.

    Returns three reports: s_n A -> s A (gap at the first index below ``tol``,
    or at ``depth``); s_n A + s_n B -> s A + s B; and uniqueness, comparing the
    two candidate limits ``s A`` and the tail term, each within ``tol`` of the
    sequence, against the ``2 tol`` bound.
    """
    limit = scale(s, A)
    gaps = []
    hit = None
    for n in range(depth + 1):
        gaps.append(hausdorff(scale(s_seq(n), A), limit))
        if gaps[-1] <= tol:
            hit = n
            break
    scalar = LawReport(LawId.LIMIT_SCALAR, gaps[-1], tol, {"gaps": gaps, "index": hit})

    seq_a = SetSequence(lambda n: scale(s_seq(n), A), declared_decreasing=False)
    seq_b = SetSequence(lambda n: scale(s_seq(n), B), declared_decreasing=False)
    summed = check_sum_convergence(seq_a, seq_b, limit, scale(s, B), depth, tol)

    n_tail = depth if hit is None else hit
    tail = seq_a.term(n_tail)
    unique_gap = hausdorff(limit, tail)
    uniq = LawReport(LawId.LIMIT_UNIQUENESS, unique_gap, 2 * tol, {"index": n_tail})
    return [scalar, summed, uniq]
