import itertools
import math
import warnings
from collections import Counter

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpqi.data import DistanceProvider
from warpqi.errors import (
    AllPointsCollinear,
    FewerThanThreePoints,
    NegativeSideLength,
    TriangleInequalityViolated,
)
from warpqi.geometry import (
    delaunay_triangulate,
    hd_triangle_areas,
    incircle,
    triangle_area_2d,
    triangle_area_from_sides,
    triangle_areas_2d,
)

from oracles import cayley_menger_area, empty_circle_violations, hull, qhull_triangles


def test_unit_square_splits_in_two():
    tri = delaunay_triangulate([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert len(tri) == 2
    assert triangle_areas_2d([(0, 0), (1, 0), (1, 1), (0, 1)], tri).sum() == pytest.approx(1.0)


def test_three_points_one_triangle():
    tri = delaunay_triangulate([(0, 0), (2, 0), (0, 1)])
    assert tri.triangles.tolist() == [[0, 1, 2]]


def test_fifty_random_points_are_delaunay():
    pts = np.random.default_rng(3).random((50, 2))
    tri = delaunay_triangulate(pts)
    assert empty_circle_violations(pts, tri.triangles.tolist()) == []


def test_matches_qhull_on_random_points():
    pts = np.random.default_rng(11).random((400, 2))
    assert list(delaunay_triangulate(pts)) == qhull_triangles(pts)


def test_too_few_points():
    with pytest.raises(FewerThanThreePoints):
        delaunay_triangulate([(0, 0), (1, 1)])


def test_collinear_input():
    with pytest.raises(AllPointsCollinear):
        delaunay_triangulate([(0, 0), (1, 1), (2, 2), (-3, -3)])


def test_partially_collinear_input():
    pts = [(0, 0), (1, 1), (2, 2), (3, 3), (0, 1)]
    tri = delaunay_triangulate(pts)
    assert len(tri) == 3
    assert triangle_areas_2d(pts, tri).sum() == pytest.approx(hull(pts)[1])


def test_duplicates_are_coalesced():
    pts = [(0, 0), (1, 0), (0, 1), (1, 0), (1, 1)]
    with pytest.warns(UserWarning, match="duplicate"):
        tri = delaunay_triangulate(pts)
    assert tri.coalesced == {3: 1}
    assert 3 not in tri.triangles
    assert len(tri) == 2


def test_duplicates_leaving_two_points():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(FewerThanThreePoints):
            delaunay_triangulate([(0, 0), (1, 1), (0, 0)])


@pytest.mark.parametrize("shape", [(6, 5), (9, 9)])
def test_grid_cocircular_ties(shape):
    pts = np.array(list(itertools.product(range(shape[0]), range(shape[1]))), dtype=float)
    tri = delaunay_triangulate(pts)
    n, h = len(pts), 2 * (shape[0] + shape[1]) - 4
    assert len(tri) == 2 * n - 2 - h
    assert triangle_areas_2d(pts, tri).min() > 0
    assert triangle_areas_2d(pts, tri).sum() == pytest.approx((shape[0] - 1) * (shape[1] - 1))
    assert empty_circle_violations(pts, tri.triangles.tolist()) == []


def test_deterministic():
    pts = np.random.default_rng(0).random((300, 2))
    assert np.array_equal(delaunay_triangulate(pts).triangles, delaunay_triangulate(pts).triangles)


def test_permutation_invariance():
    rng = np.random.default_rng(5)
    pts = rng.random((200, 2))
    perm = rng.permutation(200)
    base = delaunay_triangulate(pts)
    moved = delaunay_triangulate(pts[perm])
    relabelled = np.sort(perm[moved.triangles], axis=1)
    relabelled = relabelled[np.lexsort(relabelled.T[::-1])]
    assert np.array_equal(relabelled, base.triangles)


@pytest.mark.parametrize(
    "d, expected",
    [((0.25, 0.25), 1), ((2, 2), -1), ((1, 1), 0)],
)
def test_incircle_signs(d, expected):
    assert incircle((0, 0), (1, 0), (0, 1), d) == expected


@pytest.mark.parametrize(
    "p, q, r, area",
    [((0, 0), (1, 0), (0, 1), 0.5), ((0, 0), (2, 0), (1, 0), 0.0), ((0, 0), (4, 0), (0, 3), 6.0)],
)
def test_shoelace_area(p, q, r, area):
    assert triangle_area_2d(p, q, r) == area


@pytest.mark.parametrize("sides, area", [((3, 4, 5), 6.0), ((1, 1, 2), 0.0), ((5, 3, 4), 6.0)])
def test_heron(sides, area):
    assert triangle_area_from_sides(*sides) == pytest.approx(area, abs=1e-15)


def test_heron_needle_keeps_precision():
    # Kahan's needle: the textbook Heron formula is off by ~75% here
    a, b, c = 100000.0, 99999.99979, 0.00029
    mpmath.mp.dps = 60
    A, B, C = (mpmath.mpf(x) for x in (a, b, c))
    s = (A + B + C) / 2
    exact = float(mpmath.sqrt(s * (s - A) * (s - B) * (s - C)))
    assert triangle_area_from_sides(a, b, c) == pytest.approx(exact, rel=1e-9)


def test_heron_negative_side():
    with pytest.raises(NegativeSideLength):
        triangle_area_from_sides(-1, 1, 1)


def test_heron_non_metric_counted_or_raised():
    diag = Counter()
    assert triangle_area_from_sides(1, 1, 3, diagnostics=diag) == 0.0
    assert diag["triangle_inequality"] == 1
    with pytest.raises(TriangleInequalityViolated):
        triangle_area_from_sides(1, 1, 3, strict=True)
    # within slack: rounding noise on a degenerate triple is not a violation
    assert triangle_area_from_sides(1, 1, 2 + 1e-12, strict=True) == 0.0


def test_heron_matches_shoelace_on_square_footprint():
    rng = np.random.default_rng(8)
    pts3 = np.c_[rng.random((30, 2)), np.zeros(30)]
    tri = delaunay_triangulate(pts3[:, :2])
    hd = hd_triangle_areas(tri, DistanceProvider.from_points(pts3))
    np.testing.assert_allclose(hd, triangle_areas_2d(pts3[:, :2], tri), rtol=1e-9)


def test_hd_areas_identity_projection():
    pts = np.random.default_rng(1).random((80, 2))
    tri = delaunay_triangulate(pts)
    np.testing.assert_allclose(
        hd_triangle_areas(tri, DistanceProvider.from_points(pts)), triangle_areas_2d(pts, tri), rtol=1e-9
    )


def test_hd_areas_from_345_distances():
    dist = DistanceProvider.from_matrix([[0, 3, 4], [3, 0, 5], [4, 5, 0]])
    assert hd_triangle_areas(np.array([[0, 1, 2]]), dist) == pytest.approx([6.0])


def test_hd_areas_match_cayley_menger():
    rng = np.random.default_rng(2)
    pts = rng.normal(size=(10, 5))
    tris = np.array(list(itertools.combinations(range(10), 3)))
    got = hd_triangle_areas(tris, DistanceProvider.from_points(pts))
    want = [
        cayley_menger_area(
            np.linalg.norm(pts[a] - pts[b]), np.linalg.norm(pts[a] - pts[c]), np.linalg.norm(pts[b] - pts[c])
        )
        for a, b, c in tris
    ]
    np.testing.assert_allclose(got, want, rtol=1e-9)


coord = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=300, deadline=None)
@given(st.tuples(coord, coord), st.tuples(coord, coord), st.tuples(coord, coord))
def test_heron_shoelace_agreement(p, q, r):
    area = triangle_area_2d(p, q, r)
    sides = math.dist(p, q), math.dist(q, r), math.dist(r, p)
    L = max(sides)
    # rounding the sides to doubles perturbs the area by about eps * L^4 / area,
    # and by at most about sqrt(eps) * L^2 for a flat triangle
    eps = np.finfo(float).eps
    noise = 4 * min(eps * L**4 / area if area > 0 else math.inf, math.sqrt(eps) * L**2)
    assert triangle_area_from_sides(*sides) == pytest.approx(area, rel=1e-9, abs=noise)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 60))
def test_tiling_and_euler(seed, n):
    pts = np.random.default_rng(seed).random((n, 2))
    tri = delaunay_triangulate(pts)
    h, area = hull(pts)
    assert len(tri) == 2 * n - 2 - h
    assert triangle_areas_2d(pts, tri).sum() == pytest.approx(area, rel=1e-9)


@pytest.mark.parametrize("scale", [1e-160, 1e-100, 1.0, 1e100, 1e150])
def test_heron_extreme_scales(scale):
    assert triangle_area_from_sides(3 * scale, 4 * scale, 5 * scale) == pytest.approx(6 * scale**2, rel=1e-15)


def test_heron_exact_for_its_inputs_on_slivers():
    # error against shoelace on slivers comes from rounding the sides, not
    # from the formula: for the given double sides the result is near exact
    mpmath.mp.dps = 60
    rng = np.random.default_rng(12)
    for _ in range(200):
        p, q = rng.normal(size=(2, 2))
        r = p + (q - p) * rng.random() + rng.normal(size=2) * 1e-6
        sides = [float(np.linalg.norm(u - v)) for u, v in ((p, q), (q, r), (r, p))]
        A, B, C = (mpmath.mpf(x) for x in sides)
        s = (A + B + C) / 2
        exact = mpmath.sqrt(s * (s - A) * (s - B) * (s - C))
        assert triangle_area_from_sides(*sides) == pytest.approx(float(exact), rel=1e-13)
