"""Compact convex sets in R^1 and R^2.

Three representations are provided: :class:`IntervalBox`, :class:`VPolytope2`
(a convex polygon given by its extreme points) and :class:`SupportGrid`
(support values sampled on a finite list of unit directions, denoting the
polygon cut out by the induced halfplanes).  Every set is immutable.

Arithmetic stays exact whenever both operands are exact (box or polygon); a
``SupportGrid`` operand forces the other side onto its direction grid.
"""
from __future__ import annotations

from fractions import Fraction
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TOL_EXACT = 1e-9
TOL_GRID = 1e-6
GRID_M = 360

_UNIT_TOL = 1e-12


class InvalidInput(ValueError):
    """Raised for malformed sets, dimension mismatches and bad directions."""


def as_point(x, dim: int | None = None) -> np.ndarray:
    p = np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1)
    if not np.all(np.isfinite(p)):
        raise InvalidInput(f"non-finite coordinates {p!r}")
    if dim is not None and p.size != dim:
        raise InvalidInput(f"expected a {dim}-d point, got {p.size}-d")
    return p


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


# Shewchuk's static bound for the float orientation determinant
_CCW_ERRBOUND = (3.0 + 16.0 * 2.0**-53) * 2.0**-53
_TINY = 1e-280


def orient(o, a, b) -> float:
    """Sign-exact orientation of (o, a, b): > 0 for a left turn.

    The magnitude is the float determinant when that is trustworthy; otherwise
    only the sign (-1, 0, 1) is returned, since the exact value may underflow."""
    left = (a[0] - o[0]) * (b[1] - o[1])
    right = (a[1] - o[1]) * (b[0] - o[0])
    det = left - right
    # the relative bound does not hold once the products underflow
    if abs(det) > _CCW_ERRBOUND * (abs(left) + abs(right)) and abs(det) > _TINY:
        return det
    o, a, b = ([Fraction(c) for c in p] for p in (o, a, b))
    exact = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    return float((exact > 0) - (exact < 0))


def _certified_cycle(V: list) -> list | None:
    """``V`` rolled to its lexicographic minimum if it is already a strictly
    convex CCW cycle, as certified by the float filter; else None."""
    n = len(V)
    if n < 3:
        return None
    i = min(range(n), key=V.__getitem__)
    V = V[i:] + V[:i]
    switches, prev = 0, 1.0
    for k in range(n):
        (ox, oy), (ax, ay), (bx, by) = V[k], V[(k + 1) % n], V[(k + 2) % n]
        left = (ax - ox) * (by - oy)
        right = (ay - oy) * (bx - ox)
        det = left - right
        if not (det > _CCW_ERRBOUND * (abs(left) + abs(right)) and det > _TINY):
            return None
        # left turns alone allow multiply wound cycles: x must rise, then fall
        dx = ax - ox
        if dx and (dx > 0) != (prev > 0):
            switches += 1
            prev = dx
    return V if switches <= 1 else None


def _hull_points(points) -> np.ndarray:
    """Monotone-chain hull; CCW, extreme points only, lexicographic start."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise InvalidInput("hull of an empty point list")
    if not np.all(np.isfinite(pts)):
        raise InvalidInput("non-finite vertex")
    pts = (pts + 0.0).tolist()  # no -0.0
    fast = _certified_cycle(pts)
    if fast is not None:
        return np.array(fast)
    uniq = sorted(set(map(tuple, pts)))
    if len(uniq) == 1:
        return np.array(uniq, dtype=float)

    def chain(seq):
        out: list = []
        for p in seq:
            while len(out) >= 2 and orient(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = chain(uniq)
    upper = chain(reversed(uniq))
    hull = lower[:-1] + upper[:-1]
    return np.array(hull, dtype=float)


class ConvexSet(ABC):
    """A nonempty compact convex subset of R^d, d in {1, 2}."""

    dim: int

    @abstractmethod
    def extreme_points(self) -> np.ndarray:
        """Array of shape (k, d) holding the extreme points."""

    @property
    def exact(self) -> bool:
        return True

    def support(self, u) -> float:
        return support_value(self, u)

    def support_many(self, dirs: np.ndarray) -> np.ndarray:
        """Support values at the rows of ``dirs`` (not required to be unit)."""
        return (self.extreme_points() @ np.asarray(dirs, dtype=float).T).max(axis=0)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.extreme_points()
        return v.min(axis=0), v.max(axis=0)

    def diameter(self) -> float:
        v = self.extreme_points()
        if len(v) == 1:
            return 0.0
        diff = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((diff**2).sum(axis=-1)).max())

    def translate(self, t) -> "ConvexSet":
        return minkowski_sum(self, singleton(as_point(t, self.dim)))

    def __add__(self, other):
        if isinstance(other, ConvexSet):
            return minkowski_sum(self, other)
        return NotImplemented

    def __rmul__(self, lam):
        return scale(float(lam), self)

    def __neg__(self):
        return scale(-1.0, self)

    def __repr__(self) -> str:
        pts = np.round(self.extreme_points(), 12).tolist()
        return f"{type(self).__name__}({pts})"


@dataclass(frozen=True, eq=False, repr=False)
class IntervalBox(ConvexSet):
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo, hi = as_point(self.lo), as_point(self.hi)
        if lo.size != hi.size or lo.size not in (1, 2):
            raise InvalidInput(f"box endpoints must both be 1-d or 2-d, got {lo.size}, {hi.size}")
        if np.any(lo > hi):
            raise InvalidInput(f"empty box: lo={lo.tolist()} hi={hi.tolist()}")
        object.__setattr__(self, "lo", _frozen(lo))
        object.__setattr__(self, "hi", _frozen(hi))

    @property
    def dim(self) -> int:
        return self.lo.size

    def extreme_points(self) -> np.ndarray:
        if self.dim == 1:
            if self.lo[0] == self.hi[0]:
                return self.lo.reshape(1, 1)
            return np.array([self.lo, self.hi])
        (x0, y0), (x1, y1) = self.lo, self.hi
        return _hull_points([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])

    def support_many(self, dirs):
        dirs = np.asarray(dirs, dtype=float)
        return np.maximum(dirs * self.lo, dirs * self.hi).sum(axis=1)

    def bounds(self):
        return self.lo.copy(), self.hi.copy()


@dataclass(frozen=True, eq=False, repr=False)
class VPolytope2(ConvexSet):
    """Convex polygon; the constructor reduces any point list to its hull."""

    vertices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vertices", _frozen(_hull_points(self.vertices)))

    dim = 2

    def extreme_points(self) -> np.ndarray:
        return self.vertices

    def edge_normals(self) -> np.ndarray:
        """Outward unit normals of the edges (both sides for a segment)."""
        v = self.vertices
        if len(v) == 1:
            return np.zeros((0, 2))
        e = np.roll(v, -1, axis=0) - v
        if len(v) == 2:
            e = e[:1]
            n = np.array([[e[0, 1], -e[0, 0]], [-e[0, 1], e[0, 0]]])
        else:
            n = np.stack([e[:, 1], -e[:, 0]], axis=1)
        return n / np.linalg.norm(n, axis=1, keepdims=True)


def uniform_directions(m: int, dim: int = 2) -> np.ndarray:
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    theta = 2.0 * np.pi * np.arange(m) / m
    return np.stack([np.cos(theta), np.sin(theta)], axis=1)


def _merge_directions(*dir_lists: np.ndarray) -> np.ndarray:
    dirs = np.concatenate([np.asarray(d, dtype=float) for d in dir_lists], axis=0)
    if dirs.shape[1] == 1:
        return np.array([[1.0], [-1.0]])
    ang = np.arctan2(dirs[:, 1], dirs[:, 0])
    order = np.argsort(ang, kind="stable")
    dirs, ang = dirs[order], ang[order]
    keep = np.ones(len(ang), dtype=bool)
    keep[1:] = np.diff(ang) > 1e-12
    if keep.sum() > 1 and ang[keep][-1] - ang[keep][0] > 2 * np.pi - 1e-12:
        keep[np.flatnonzero(keep)[-1]] = False
    return dirs[keep]


def _halfplane_polygon(dirs: np.ndarray, vals: np.ndarray) -> np.ndarray:
    """Vertices of {y : <dirs[k], y> <= vals[k]} for angularly sorted unit dirs."""
    tol = 1e-12 * (1.0 + float(np.abs(vals).max()))

    def meet(i, j):
        (a1, b1), (a2, b2) = dirs[i], dirs[j]
        det = a1 * b2 - b1 * a2
        return np.array([(vals[i] * b2 - b1 * vals[j]) / det, (a1 * vals[j] - vals[i] * a2) / det])

    def outside(k, p):
        return dirs[k] @ p > vals[k] + tol

    dq: list[int] = []
    for k in range(len(dirs)):
        while len(dq) >= 2 and outside(k, meet(dq[-1], dq[-2])):
            dq.pop()
        while len(dq) >= 2 and outside(k, meet(dq[0], dq[1])):
            dq.pop(0)
        if dq and abs(dirs[dq[-1], 0] * dirs[k, 1] - dirs[dq[-1], 1] * dirs[k, 0]) < 1e-14:
            if dirs[dq[-1]] @ dirs[k] < 0:
                raise InvalidInput("halfplanes are empty or unbounded")
            if vals[k] < vals[dq[-1]]:
                dq[-1] = k
            continue
        dq.append(k)
    while len(dq) >= 3 and outside(dq[0], meet(dq[-1], dq[-2])):
        dq.pop()
    while len(dq) >= 3 and outside(dq[-1], meet(dq[0], dq[1])):
        dq.pop(0)
    if len(dq) < 3:
        raise InvalidInput("halfplanes are empty or unbounded")
    pts = [meet(dq[i], dq[(i + 1) % len(dq)]) for i in range(len(dq))]
    poly = _hull_points(pts)
    slack = (dirs @ poly.T).max(axis=1) - vals
    if slack.max() > 1e-9 * (1.0 + float(np.abs(vals).max())):
        raise InvalidInput("halfplanes are empty")
    return poly


@dataclass(frozen=True, eq=False, repr=False)
class SupportGrid(ConvexSet):
    """Set cut out by ``<u_k, y> <= values[k]``; values are tightened on build.

    After construction ``values`` holds the support function of the polyhedron
    at every grid direction, so redundant (loose) data is repaired.
    """

    directions: np.ndarray
    values: np.ndarray
    _verts: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        dirs = np.atleast_2d(np.asarray(self.directions, dtype=float)) + 0.0  # no -0.0
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if dirs.shape[0] != vals.size:
            raise InvalidInput("directions and values differ in length")
        if not (np.all(np.isfinite(dirs)) and np.all(np.isfinite(vals))):
            raise InvalidInput("non-finite support data")
        if np.any(np.abs(np.linalg.norm(dirs, axis=1) - 1.0) > _UNIT_TOL):
            raise InvalidInput("support grid directions must be unit vectors")
        d = dirs.shape[1]
        if d == 1:
            up = vals[dirs[:, 0] > 0]
            down = vals[dirs[:, 0] < 0]
            if up.size == 0 or down.size == 0:
                raise InvalidInput("1-d support grid needs both +1 and -1")
            lo, hi = -down.min(), up.min()
            if lo > hi + 1e-12 * (1 + abs(lo) + abs(hi)):
                raise InvalidInput("empty 1-d support grid")
            hi = max(hi, lo)
            verts = np.array([[lo]]) if lo == hi else np.array([[lo], [hi]])
            dirs = np.array([[1.0], [-1.0]])
        elif d == 2:
            order = np.argsort(np.arctan2(dirs[:, 1], dirs[:, 0]), kind="stable")
            dirs, vals = dirs[order], vals[order]
            ang = np.arctan2(dirs[:, 1], dirs[:, 0])
            gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
            if len(dirs) < 3 or gaps.max() >= np.pi:
                raise InvalidInput("support grid directions do not bound a compact set")
            verts = _halfplane_polygon(dirs, vals)
        else:
            raise InvalidInput(f"unsupported dimension {d}")
        object.__setattr__(self, "directions", _frozen(dirs))
        object.__setattr__(self, "_verts", _frozen(verts))
        object.__setattr__(self, "values", _frozen((dirs @ verts.T).max(axis=1)))

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    @property
    def exact(self) -> bool:
        return False

    def extreme_points(self) -> np.ndarray:
        return self._verts


@dataclass(frozen=True, eq=False)
class FinitePointSet:
    """A finite (generally nonconvex) set of distinct points."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.shape[0] == 0 or not np.all(np.isfinite(pts)):
            raise InvalidInput("finite point set must be nonempty and finite")
        uniq = np.unique(pts, axis=0)
        if len(uniq) != len(pts):
            raise InvalidInput("finite point set has repeated points")
        object.__setattr__(self, "points", _frozen(uniq))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def scaled(self, lam: float) -> "FinitePointSet":
        return FinitePointSet(np.unique(lam * self.points + 0.0, axis=0))

    def __add__(self, other: "FinitePointSet") -> "FinitePointSet":
        if other.dim != self.dim:
            raise InvalidInput("dimension mismatch")
        sums = self.points[:, None, :] + other.points[None, :, :]
        return FinitePointSet(np.unique(sums.reshape(-1, self.dim), axis=0))


def singleton(p) -> IntervalBox:
    p = as_point(p)
    return IntervalBox(p, p)


def hull2(points) -> VPolytope2:
    return VPolytope2(np.asarray(points, dtype=float).reshape(-1, 2))


def _check_same_dim(*sets) -> int:
    dims = {s.dim for s in sets}
    if len(dims) != 1:
        raise InvalidInput(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def support_value(S: ConvexSet, u) -> float:
    u = as_point(u, S.dim)
    if abs(np.linalg.norm(u) - 1.0) > _UNIT_TOL:
        raise InvalidInput(f"direction {u.tolist()} is not a unit vector")
    return float(S.support_many(u.reshape(1, -1))[0])


def to_polygon(S: ConvexSet) -> VPolytope2:
    if S.dim != 2:
        raise InvalidInput("polygon coercion needs a 2-d set")
    return S if isinstance(S, VPolytope2) else VPolytope2(S.extreme_points())


def to_support_grid(S: ConvexSet, directions: np.ndarray | None = None) -> SupportGrid:
    """Outer approximation of ``S`` on a direction grid (default uniform)."""
    if directions is None:
        directions = uniform_directions(GRID_M, S.dim)
    directions = np.asarray(directions, dtype=float)
    return SupportGrid(directions, S.support_many(directions))


def scale(lam: float, S):
    lam = float(lam)
    if isinstance(S, FinitePointSet):
        return S.scaled(lam)
    if isinstance(S, IntervalBox):
        a, b = lam * S.lo, lam * S.hi
        return IntervalBox(np.minimum(a, b), np.maximum(a, b))
    if isinstance(S, VPolytope2):
        return VPolytope2(lam * S.vertices)
    if isinstance(S, SupportGrid):
        if lam >= 0:
            return SupportGrid(S.directions, lam * S.values)
        return SupportGrid(-S.directions, -lam * S.values)
    raise InvalidInput(f"cannot scale {type(S).__name__}")


def _edge_cross_sign(e1, e2) -> int:
    """Sign of cross(b1 - a1, b2 - a2) for edges given as endpoint pairs."""
    (a1, b1), (a2, b2) = e1, e2
    u0, u1, v0, v1 = b1[0] - a1[0], b1[1] - a1[1], b2[0] - a2[0], b2[1] - a2[1]
    left, right = u0 * v1, u1 * v0
    det = left - right
    # differences carry one rounding each, products one more
    if abs(det) > 8.0 * 2.0**-53 * (abs(left) + abs(right)) and abs(det) > 1e-290:
        return 1 if det > 0 else -1
    F = Fraction
    det = (F(b1[0]) - F(a1[0])) * (F(b2[1]) - F(a2[1])) - (F(b1[1]) - F(a1[1])) * (F(b2[0]) - F(a2[0]))
    return (det > 0) - (det < 0)


def _edge_half(e) -> int:
    # float subtraction gets the sign right, so this class is exact
    a, b = e
    dy, dx = b[1] - a[1], b[0] - a[0]
    return 0 if dy > 0 or (dy == 0 and dx > 0) else 1


def _polygon_sum(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Edge-merge Minkowski sum of two CCW convex polygons (any vertex count).

    Both edge cycles start at the lowest (then leftmost) vertex, so they are
    already sorted by angle from 0; they are merged with an exact angular
    comparison.  Each output vertex is formed as ``P[i] + Q[j]`` directly so
    it carries a single rounding.
    """

    def start(V):
        V = V.tolist()
        i = min(range(len(V)), key=lambda k: (V[k][1], V[k][0]))
        return V[i:] + V[:i]

    def edges(V):
        return [] if len(V) == 1 else [(V[k], V[(k + 1) % len(V)]) for k in range(len(V))]

    def before(e, f):
        # e strictly precedes f in angle; ties go to P
        he, hf = _edge_half(e), _edge_half(f)
        return he < hf if he != hf else _edge_cross_sign(e, f) >= 0

    P, Q = start(P), start(Q)
    eP, eQ = edges(P), edges(Q)
    order = []
    a = b = 0
    while a < len(eP) or b < len(eQ):
        if b == len(eQ) or (a < len(eP) and before(eP[a], eQ[b])):
            order.append((0, eP[a]))
            a += 1
        else:
            order.append((1, eQ[b]))
            b += 1
    i = j = 0
    pts = [[P[0][0] + Q[0][0], P[0][1] + Q[0][1]]]
    for t in range(len(order) - 1):
        if order[t][0] == 0:
            i += 1
        else:
            j += 1
        e, f = order[t][1], order[t + 1][1]
        if _edge_half(e) == _edge_half(f) and _edge_cross_sign(e, f) == 0:
            continue  # parallel edges merge into one
        p, q = P[i % len(P)], Q[j % len(Q)]
        pts.append([p[0] + q[0], p[1] + q[1]])
    return _hull_points(np.array(pts))


def minkowski_sum(S1: ConvexSet, S2: ConvexSet) -> ConvexSet:
    _check_same_dim(S1, S2)
    if isinstance(S1, SupportGrid) or isinstance(S2, SupportGrid):
        grids = [S.directions for S in (S1, S2) if isinstance(S, SupportGrid)]
        dirs = _merge_directions(*grids)
        return SupportGrid(dirs, S1.support_many(dirs) + S2.support_many(dirs))
    if isinstance(S1, IntervalBox) and isinstance(S2, IntervalBox):
        return IntervalBox(S1.lo + S2.lo, S1.hi + S2.hi)
    return VPolytope2(_polygon_sum(to_polygon(S1).vertices, to_polygon(S2).vertices))


def msum(sets: Iterable[ConvexSet]) -> ConvexSet:
    sets = list(sets)
    out = sets[0]
    for s in sets[1:]:
        out = minkowski_sum(out, s)
    return out


def _dist_to_polygon(P: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Euclidean distance from each row of P to the convex polygon hull(V)."""
    if len(V) == 1:
        return np.linalg.norm(P - V[0], axis=1)
    A = V
    AB = np.roll(V, -1, axis=0) - V
    AP = P[:, None, :] - A[None, :, :]
    den = (AB * AB).sum(-1)
    # an edge can be so short its squared length underflows; project onto A then
    t = np.clip((AP * AB).sum(-1) / np.where(den > 0, den, 1.0), 0.0, 1.0) * (den > 0)
    d = np.linalg.norm(AP - t[..., None] * AB, axis=-1).min(axis=1)
    if len(V) >= 3:
        cr = AB[None, :, 0] * AP[..., 1] - AB[None, :, 1] * AP[..., 0]
        d = np.where((cr >= 0).all(axis=1), 0.0, d)
    return d


def excess(B: ConvexSet, A: ConvexSet) -> float:
    """Directed distance sup_{b in B} d(b, A); zero iff B is inside A."""
    _check_same_dim(A, B)
    if A.dim == 1:
        (alo,), (ahi,) = A.bounds()
        (blo,), (bhi,) = B.bounds()
        return float(max(alo - blo, bhi - ahi, 0.0))
    return float(_dist_to_polygon(B.extreme_points(), A.extreme_points()).max())


def contains(A: ConvexSet, B: ConvexSet, tol: float = 0.0) -> bool:
    """True iff B is a subset of A up to ``tol``."""
    if tol < 0:
        raise InvalidInput("tol must be nonnegative")
    return excess(B, A) <= tol


def hausdorff(A: ConvexSet, B: ConvexSet) -> float:
    return max(excess(A, B), excess(B, A))


def finite_excess(B: FinitePointSet, A: FinitePointSet) -> float:
    diff = B.points[:, None, :] - A.points[None, :, :]
    return float(np.sqrt((diff**2).sum(-1)).min(axis=1).max())


def finite_hausdorff(A: FinitePointSet, B: FinitePointSet) -> float:
    return max(finite_excess(A, B), finite_excess(B, A))


def default_tol(*sets: ConvexSet) -> float:
    return TOL_EXACT if all(s.exact for s in sets) else TOL_GRID


# set literals ---------------------------------------------------------------


def from_literal(obj) -> ConvexSet:
    """Parse ``{"type": "box"|"poly2"|"point"|"grid", ...}``."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise InvalidInput(f"set literal must be an object with a 'type' key, got {obj!r}")
    kind = obj["type"]
    try:
        if kind == "box":
            return IntervalBox(obj["lo"], obj["hi"])
        if kind == "point":
            return singleton(obj["coords"])
        if kind == "poly2":
            verts = np.asarray(obj["vertices"], dtype=float)
            if verts.ndim != 2 or verts.shape[1] != 2 or len(verts) == 0:
                raise InvalidInput("poly2 vertices must be a nonempty list of [x, y]")
            return VPolytope2(verts)
        if kind == "grid":
            return SupportGrid(obj["directions"], obj["values"])
    except KeyError as exc:
        raise InvalidInput(f"set literal of type {kind!r} is missing {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInput):
            raise
        raise InvalidInput(f"bad {kind!r} literal: {exc}") from None
    raise InvalidInput(f"unknown set literal type {kind!r}")


def to_literal(S: ConvexSet) -> dict:
    if isinstance(S, IntervalBox):
        if np.array_equal(S.lo, S.hi):
            return {"type": "point", "coords": S.lo.tolist()}
        return {"type": "box", "lo": S.lo.tolist(), "hi": S.hi.tolist()}
    if isinstance(S, VPolytope2):
        return {"type": "poly2", "vertices": S.vertices.tolist()}
    if isinstance(S, SupportGrid):
        return {"type": "grid", "directions": S.directions.tolist(), "values": S.values.tolist()}
    raise InvalidInput(f"no literal form for {type(S).__name__}")


def box(lo: Sequence[float] | float, hi: Sequence[float] | float) -> IntervalBox:
    return IntervalBox(lo, hi)
