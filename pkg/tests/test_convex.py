from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from pexider.convex import (
    GRID_M,
    FinitePointSet,
    IntervalBox,
    InvalidInput,
    SupportGrid,
    VPolytope2,
    box,
    contains,
    excess,
    from_literal,
    hausdorff,
    hull2,
    minkowski_sum,
    msum,
    orient,
    scale,
    singleton,
    support_value,
    to_literal,
    to_polygon,
    to_support_grid,
    uniform_directions,
)

from conftest import boxes, exact_sets, polygons, same_dim_sets

TRI = hull2([[0, 0], [1, 0], [0, 1]])


# -- independent oracles -------------------------------------------------------


def exact_hull(points):
    """Monotone chain in rational arithmetic; strictly convex CCW output."""
    pts = sorted({(Fraction(x), Fraction(y)) for x, y in points})
    if len(pts) <= 1:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def pairwise_sum_hull(P, Q):
    return exact_hull([tuple(p + q) for p in P.extreme_points() for q in Q.extreme_points()])


def vertex_set(S):
    return {tuple(map(float, v)) for v in S.extreme_points()}


def dense_support_hausdorff(A, B, k=200_000):
    t = np.linspace(0, 2 * np.pi, k, endpoint=False)
    U = np.stack([np.cos(t), np.sin(t)], 1)
    hA = (U @ A.extreme_points().T).max(1)
    hB = (U @ B.extreme_points().T).max(1)
    return np.abs(hA - hB).max()


def lp_support(grid: SupportGrid, u):
    res = linprog(-np.asarray(u), A_ub=grid.directions, b_ub=grid.values, bounds=[(None, None)] * 2, method="highs")
    assert res.status == 0
    return -res.fun


# -- support ------------------------------------------------------------------


def test_support_examples():
    assert support_value(box([0, 0], [1, 1]), [1, 0]) == 1.0
    u = np.array([1, 1]) / np.sqrt(2)
    assert support_value(TRI, u) == pytest.approx(1 / np.sqrt(2), abs=1e-15)
    p = singleton([5, -3])
    for t in np.linspace(0, 6, 13):
        u = np.array([np.cos(t), np.sin(t)])
        assert support_value(p, u) == pytest.approx(5 * u[0] - 3 * u[1], abs=1e-14)


def test_support_rejects_non_unit():
    with pytest.raises(InvalidInput):
        support_value(TRI, [1.0, 1.0])
    with pytest.raises(InvalidInput):
        support_value(TRI, [1.0 + 1e-9, 0.0])


def test_grid_support_matches_lp(rng):
    V = rng.normal(size=(9, 2))
    G = to_support_grid(hull2(V), uniform_directions(12))
    for t in rng.uniform(0, 2 * np.pi, 40):
        u = np.array([np.cos(t), np.sin(t)])
        assert support_value(G, u) == pytest.approx(lp_support(G, u), abs=1e-9)


def test_grid_tightens_loose_values():
    dirs = uniform_directions(4)
    G = SupportGrid(dirs, [1.0, 1.0, 1.0, 5.0])
    assert np.allclose(G.support_many(dirs), [1.0, 1.0, 1.0, 5.0])
    dirs = uniform_directions(8)
    G = SupportGrid(dirs, [1.0] * 7 + [100.0])
    h = G.support_many(dirs)
    assert h[-1] < 100.0
    assert h[-1] == pytest.approx(lp_support(G, dirs[-1]), abs=1e-12)


def test_grid_rejects_unbounded():
    with pytest.raises(InvalidInput):
        SupportGrid([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]], [1, 1, 1])
    with pytest.raises(InvalidInput):
        SupportGrid([[1.0]], [1.0])


# -- scale, sum -----------------------------------------------------------------


def test_scale_examples():
    assert hausdorff(scale(1, TRI), TRI) == 0
    assert hausdorff(scale(0, box(3, 7)), singleton([0])) == 0
    assert hausdorff(scale(-1, box(0, 2)), box(-2, 0)) == 0


def test_sum_examples():
    A = hull2([[0, 0], [2, 1], [1, 3]])
    assert hausdorff(A + singleton([0, 0]), A) == 0
    assert hausdorff(box(0, 1) + box(2, 5), box(2, 6)) == 0
    S = minkowski_sum(TRI, hull2([[0, 0], [0, 2]]))
    assert vertex_set(S) == {(0.0, 0.0), (1.0, 0.0), (1.0, 2.0), (0.0, 3.0)}


def test_sum_dimension_mismatch():
    with pytest.raises(InvalidInput):
        minkowski_sum(box(0, 1), TRI)


def test_box_sum_stays_box():
    assert isinstance(box([0, 0], [1, 1]) + box([1, 1], [2, 3]), IntervalBox)
    assert isinstance(box([0, 0], [1, 1]) + TRI, VPolytope2)
    assert isinstance(to_support_grid(TRI) + TRI, SupportGrid)


@given(polygons(), polygons())
def test_edge_merge_matches_pairwise_hull(P, Q):
    S = minkowski_sum(P, Q)
    sums = {tuple(p + q) for p in P.extreme_points() for q in Q.extreme_points()}
    assert all(tuple(v) in sums for v in S.extreme_points())
    # rounding of p + q can nudge a non-extreme sum outward by an ulp or so
    W = hull2(np.array([[float(x), float(y)] for x, y in pairwise_sum_hull(P, Q)]))
    scale_ = 1 + np.abs(W.extreme_points()).max()
    assert hausdorff(S, W) <= 4 * np.finfo(float).eps * scale_


def test_edge_merge_many_random(rng):
    for _ in range(300):
        P = VPolytope2(rng.normal(size=(rng.integers(1, 9), 2)))
        Q = VPolytope2(rng.integers(-3, 4, size=(rng.integers(1, 6), 2)).astype(float))
        S = minkowski_sum(P, Q)
        assert len(S.extreme_points()) == len(pairwise_sum_hull(P, Q))


@given(same_dim_sets(2))
def test_support_additivity(AB):
    A, B = AB
    dirs = uniform_directions(GRID_M, A.dim)
    gap = np.abs((A + B).support_many(dirs) - A.support_many(dirs) - B.support_many(dirs)).max()
    assert gap <= 1e-9


@given(exact_sets(2), st.floats(-4, 4), st.floats(-4, 4))
def test_scale_composition(A, lam, mu):
    assert hausdorff(scale(lam, scale(mu, A)), scale(lam * mu, A)) <= 1e-9


# -- hull -----------------------------------------------------------------------


def test_hull_examples():
    assert vertex_set(hull2([[0, 0]])) == {(0.0, 0.0)}
    assert vertex_set(hull2([[0, 0], [2, 0], [1, 0]])) == {(0.0, 0.0), (2.0, 0.0)}
    pts = [np.add(p, q) for p in TRI.extreme_points() for q in [[0, 0], [0, 2]]]
    assert vertex_set(hull2(pts)) == {(0.0, 0.0), (1.0, 0.0), (1.0, 2.0), (0.0, 3.0)}


def test_hull_keeps_corner_with_ulp_offsets():
    # three nearly vertical points whose x differ by one ulp: a float cross
    # product with an absolute threshold used to call this collinear
    x = 0.3
    pts = [[x, 0.0], [np.nextafter(x, 1), 0.5], [x, 1.0], [x - 1, 0.5]]
    assert len(hull2(pts).extreme_points()) == len(exact_hull(pts)) == 4


wide = st.floats(-1e3, 1e3)


@given(st.lists(st.tuples(wide, wide), min_size=1, max_size=12))
def test_hull_matches_rational_hull(pts):
    assert len(hull2(pts).extreme_points()) == len(exact_hull(pts))


def test_orient_sign_is_exact():
    a = [0.5, 0.5]
    b = [12.0, 12.0]
    for k in range(1, 50):
        c = [24.0, np.nextafter(24.0, 25.0 if k % 2 else 23.0)]
        exact = (Fraction(b[0]) - Fraction(a[0])) * (Fraction(c[1]) - Fraction(a[1])) - (
            Fraction(b[1]) - Fraction(a[1])
        ) * (Fraction(c[0]) - Fraction(a[0]))
        assert np.sign(orient(a, b, c)) == np.sign(float(exact))


def test_orient_sign_survives_underflow():
    t = 3.1733642187454693e-177
    assert orient([0.0, 0.0], [t, 0.0], [0.0, t]) > 0
    assert len(hull2([[0.0, 0.0], [0.0, t], [t, 0.0]]).extreme_points()) == 3


# -- contains, hausdorff ----------------------------------------------------------


def test_contains_examples():
    assert contains(TRI, TRI, 0)
    assert contains(box(0, 2), box(0, 1), 0)
    assert not contains(box(0, 1), box(0, 2), 0)
    assert contains(box([0, 0], [2, 2]), hull2([[1, 1], [2, 0]]), 0)
    with pytest.raises(InvalidInput):
        contains(TRI, TRI, -1.0)


def test_hausdorff_examples():
    assert hausdorff(TRI, TRI) == 0
    assert hausdorff(box(0, 1), box(2, 5)) == 4.0
    A, B = box([0, 0], [1, 1]), box([0, 0], [2, 2])
    assert hausdorff(A, B) == pytest.approx(np.sqrt(2), abs=1e-12)
    assert dense_support_hausdorff(A, B) == pytest.approx(np.sqrt(2), abs=1e-9)


@given(exact_sets(2), exact_sets(2))
def test_hausdorff_matches_support_oracle(A, B):
    # sup-norm of the support difference; sampling can only under-estimate it,
    # by at most (reach of A and B) times the angular step
    k = 200_000
    reach = np.abs(A.extreme_points()).max() + np.abs(B.extreme_points()).max()
    oracle = dense_support_hausdorff(A, B, k)
    got = hausdorff(A, B)
    assert oracle <= got + 1e-12
    assert got <= oracle + 2 * reach * 2 * np.pi / k + 1e-12


@given(same_dim_sets(2))
def test_mutual_containment_iff_zero_distance(AB):
    A, B = AB
    for tol in (0.0, 1e-9):
        both = contains(A, B, tol) and contains(B, A, tol)
        assert both == (hausdorff(A, B) <= tol)
    assert contains(A, A, 0) and hausdorff(A, A + singleton(np.zeros(A.dim))) <= 1e-9


@given(same_dim_sets(3))
def test_triangle_inequality(ABC):
    A, B, C = ABC
    assert hausdorff(A, C) <= hausdorff(A, B) + hausdorff(B, C) + 1e-9


def test_excess_is_directed():
    assert excess(box(0, 1), box(0, 2)) == 0
    assert excess(box(0, 2), box(0, 1)) == 1


# -- grid coercion ------------------------------------------------------------


def coercion_bound(S, m=GRID_M):
    return S.diameter() / 2 * np.tan(np.pi / m)


@given(st.one_of(boxes(2), polygons()))
def test_coercion_within_tangent_bound(S):
    back = to_polygon(to_support_grid(S))
    assert contains(back, S, 1e-12 * (1 + S.diameter()))
    assert hausdorff(back, S) <= coercion_bound(S) + 1e-12 * (1 + np.abs(S.extreme_points()).max())


def test_coercion_exceeds_cosine_bound_for_off_grid_edges():
    # a segment whose normals bisect two grid directions: the outer polygon
    # grows a cap of height (L/2) tan(pi/M), first order in 1/M
    t = np.pi / GRID_M
    S = hull2([[0, 0], [np.cos(t), np.sin(t)]])
    err = hausdorff(S, to_polygon(to_support_grid(S)))
    assert err == pytest.approx(coercion_bound(S), rel=1e-9)
    assert err > 100 * S.diameter() * (1 - np.cos(t))


def test_on_grid_polygons_coerce_exactly():
    S = box([0, 0], [2, 1])
    assert hausdorff(S, to_polygon(to_support_grid(S))) <= 1e-12


def test_grid_sum_uses_union_of_directions():
    G1 = to_support_grid(TRI, uniform_directions(8))
    G2 = to_support_grid(TRI, uniform_directions(6))
    S = G1 + G2
    assert len(S.directions) == len({tuple(np.round(d, 12)) for d in np.vstack([G1.directions, G2.directions])})
    assert hausdorff(S, scale(2, G1) + scale(0, TRI)) > 0
    assert contains(S, scale(2, TRI), 1e-12)


# -- finite point sets, literals ----------------------------------------------------


def test_finite_point_set():
    P = FinitePointSet([[0.0], [1.0]])
    assert sorted((P + P).points[:, 0]) == [0, 1, 2]
    with pytest.raises(InvalidInput):
        FinitePointSet([[0.0], [0.0]])


@pytest.mark.parametrize(
    "S", [box(0, 1), box([0, 1], [2, 3]), singleton([1, 2]), TRI, to_support_grid(TRI, uniform_directions(5))]
)
def test_literal_roundtrip(S):
    assert hausdorff(from_literal(to_literal(S)), S) == 0


@pytest.mark.parametrize(
    "lit",
    [
        None,
        {"lo": [0]},
        {"type": "box", "lo": [1], "hi": [0]},
        {"type": "box", "lo": [0]},
        {"type": "poly2", "vertices": [[0, 0, 0]]},
        {"type": "poly2", "vertices": []},
        {"type": "point", "coords": ["x"]},
        {"type": "disc"},
    ],
)
def test_malformed_literals(lit):
    with pytest.raises(InvalidInput):
        from_literal(lit)


def test_msum_folds():
    assert hausdorff(msum([box(0, 1)] * 3), box(0, 3)) == 0
