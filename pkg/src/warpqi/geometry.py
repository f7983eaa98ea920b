"""Delaunay triangulation of a 2D layout and triangle areas in both spaces.

The triangulation is an incremental Bowyer-Watson construction. Instead of
a finite super-triangle it uses a single vertex at infinity ("ghost"), so
hull triangles are never lost to a super-triangle that is not big enough.
Points are inserted in index order, which is also the cocircular tie-break:
a point only enters a circumcircle it is strictly inside of.
"""
from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AllPointsCollinear,
    FewerThanThreePoints,
    NegativeSideLength,
    NonFinite,
    TriangleInequalityViolated,
)

GHOST = -1
INCIRCLE_EPS = 1e-12
# relative slack before a side triple counts as breaking the triangle inequality
METRIC_SLACK = 1e-9


@dataclass(frozen=True)
class Triangulation:
    """Triangles of a layout as rows of point indices.

    Each row is sorted ascending and the rows are in lexicographic order, so
    two triangulations of the same point set compare equal row by row.
    ``coalesced`` maps every dropped duplicate point to the index it was
    merged into.
    """

    triangles: np.ndarray
    n_points: int
    coalesced: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.triangles)

    def __iter__(self):
        return iter(map(tuple, self.triangles.tolist()))

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)


def as_points2(layout) -> np.ndarray:
    coords = getattr(layout, "coords", layout)
    arr = np.asarray(coords, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) array of points, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("layout contains NaN or infinite coordinates")
    return arr


def orient2d(a, b, c) -> float:
    """Twice the signed area of abc; positive when abc turns counter-clockwise."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _incircle_det(ax, ay, bx, by, cx, cy, dx, dy):
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    bc = bdx * cdy - cdx * bdy
    ca = cdx * ady - adx * cdy
    ab = adx * bdy - bdx * ady
    det = alift * bc + blift * ca + clift * ab
    permanent = (
        alift * (abs(bdx * cdy) + abs(cdx * bdy))
        + blift * (abs(cdx * ady) + abs(adx * cdy))
        + clift * (abs(adx * bdy) + abs(bdx * ady))
    )
    return det, permanent


def incircle(a, b, c, d) -> int:
    """Sign of the lifted incircle determinant for a counter-clockwise abc.

    Returns +1 when ``d`` lies strictly inside the circumcircle of abc, -1
    when outside and 0 when the determinant is within ``INCIRCLE_EPS`` of
    its magnitude bound (cocircular up to rounding).
    """
    det, permanent = _incircle_det(a[0], a[1], b[0], b[1], c[0], c[1], d[0], d[1])
    if abs(det) <= INCIRCLE_EPS * permanent:
        return 0
    return 1 if det > 0 else -1


def triangle_area_2d(p, q, r) -> float:
    return abs(orient2d(p, q, r)) / 2.0


def triangle_areas_2d(coords, triangles) -> np.ndarray:
    """Shoelace areas of many triangles at once."""
    coords = np.asarray(coords, dtype=float)
    tri = np.asarray(getattr(triangles, "triangles", triangles), dtype=np.intp)
    p, q, r = coords[tri[:, 0]], coords[tri[:, 1]], coords[tri[:, 2]]
    cross = (q[:, 0] - p[:, 0]) * (r[:, 1] - p[:, 1]) - (q[:, 1] - p[:, 1]) * (r[:, 0] - p[:, 0])
    return np.abs(cross) / 2.0


def heron_areas(a, b, c, *, strict=False):
    """Vectorised, cancellation-safe Heron formula.

    Sides are sorted so that ``a >= b >= c`` and the area is evaluated as
    ``sqrt((a+(b+c)) (c-(a-b)) (c+(a-b)) (a+(b-c))) / 4``; the parentheses
    matter, they keep needle-shaped triangles accurate.

    Returns
    -------
    areas : ndarray
    violations : int
        Number of side triples with ``a > b + c`` beyond a relative slack of
        ``METRIC_SLACK``. Their radicand is clamped to zero.
    """
    sides = np.stack(np.broadcast_arrays(*(np.asarray(s, dtype=float) for s in (a, b, c))), axis=-1)
    if np.any(sides < 0):
        raise NegativeSideLength("side lengths must be non-negative")
    sides = -np.sort(-sides, axis=-1)
    a, b, c = sides[..., 0], sides[..., 1], sides[..., 2]
    gap = c - (a - b)
    broken = gap < -METRIC_SLACK * a
    n_broken = int(np.count_nonzero(broken))
    if strict and n_broken:
        first = np.flatnonzero(broken.ravel())[0]
        raise TriangleInequalityViolated(
            "sides %s break the triangle inequality" % ", ".join("%.17g" % x for x in sides.reshape(-1, 3)[first])
        )
    # power-of-two rescale: exact, and keeps the fourth-degree product
    # clear of underflow and overflow at extreme scales
    _, e = np.frexp(a)
    a, b, c, gap = (np.ldexp(x, -e) for x in (a, b, c, gap))
    radicand = (a + (b + c)) * gap * (c + (a - b)) * (a + (b - c))
    return np.ldexp(0.25 * np.sqrt(np.maximum(radicand, 0.0)), 2 * e), n_broken


def triangle_area_from_sides(a, b, c, *, strict=False, diagnostics: Counter | None = None) -> float:
    """Area of a triangle given only its three side lengths.

    Non-metric triples (one side longer than the other two combined) give 0.
    They are counted under ``diagnostics["triangle_inequality"]`` or, with
    ``strict=True``, raise :class:`TriangleInequalityViolated`.
    """
    areas, broken = heron_areas([a], [b], [c], strict=strict)
    if diagnostics is not None and broken:
        diagnostics["triangle_inequality"] += broken
    return float(areas[0])


def hd_triangle_areas(triangulation, dist, *, strict=False, diagnostics: Counter | None = None) -> np.ndarray:
    """Area of every triangle measured with the high-dimensional distances.

    ``dist`` needs a vectorised ``pairs(i, j)`` method, e.g.
    :class:`warpqi.data.DistanceProvider`. Output rows follow
    ``triangulation.triangles``.
    """
    tri = np.asarray(getattr(triangulation, "triangles", triangulation), dtype=np.intp)
    if len(tri) == 0:
        return np.zeros(0)
    a = dist.pairs(tri[:, 0], tri[:, 1])
    b = dist.pairs(tri[:, 1], tri[:, 2])
    c = dist.pairs(tri[:, 2], tri[:, 0])
    areas, broken = heron_areas(a, b, c, strict=strict)
    if diagnostics is not None and broken:
        diagnostics["triangle_inequality"] += broken
    return areas


def _coalesce(coords):
    first = {}
    keep = []
    merged = {}
    for i, xy in enumerate(map(tuple, coords.tolist())):
        j = first.setdefault(xy, i)
        if j == i:
            keep.append(i)
        else:
            merged[i] = j
    return keep, merged


class _Mesh:
    """Mutable triangle soup with adjacency; ghost vertex always at slot 2."""

    def __init__(self, xs, ys):
        self.x = xs
        self.y = ys
        self.verts = []
        self.nbrs = []
        self.alive = []
        self.free = []
        self.last = 0
        self._turn = 0

    def orient(self, i, j, k):
        x, y = self.x, self.y
        return (x[j] - x[i]) * (y[k] - y[i]) - (y[j] - y[i]) * (x[k] - x[i])

    def add(self, a, b, c):
        if a == GHOST:
            a, b, c = b, c, a
        elif b == GHOST:
            a, b, c = c, a, b
        if self.free:
            t = self.free.pop()
            self.verts[t] = [a, b, c]
            self.nbrs[t] = [-1, -1, -1]
            self.alive[t] = True
        else:
            t = len(self.verts)
            self.verts.append([a, b, c])
            self.nbrs.append([-1, -1, -1])
            self.alive.append(True)
        return t

    def link(self, tris, apex=None):
        """Connect the given triangles along shared edges not facing ``apex``."""
        edges = {}
        for t in tris:
            v = self.verts[t]
            for i in range(3):
                if v[i] == apex:
                    continue
                edges[(v[(i + 1) % 3], v[(i + 2) % 3])] = (t, i)
        for (u, w), (t, i) in edges.items():
            other = edges.get((w, u))
            if other is not None:
                self.nbrs[t][i] = other[0]

    def start(self, order):
        i0, i1 = order[0], order[1]
        for pos in range(2, len(order)):
            k = order[pos]
            o = self.orient(i0, i1, k)
            if o != 0:
                break
        else:
            raise AllPointsCollinear("all layout points are collinear; no triangle exists")
        a, b = (i0, i1) if o > 0 else (i1, i0)
        tris = [
            self.add(a, b, k),
            self.add(b, a, GHOST),
            self.add(k, b, GHOST),
            self.add(a, k, GHOST),
        ]
        self.link(tris)
        self.last = tris[0]
        return [p for j, p in enumerate(order) if j not in (0, 1, pos)]

    def in_circle(self, t, p):
        a, b, c = self.verts[t]
        if c == GHOST:
            o = self.orient(a, b, p)
            if o != 0:
                return o > 0
            x, y = self.x, self.y
            dot = (x[p] - x[a]) * (x[b] - x[a]) + (y[p] - y[a]) * (y[b] - y[a])
            length2 = (x[b] - x[a]) ** 2 + (y[b] - y[a]) ** 2
            return 0 < dot < length2
        x, y = self.x, self.y
        det, permanent = _incircle_det(x[a], y[a], x[b], y[b], x[c], y[c], x[p], y[p])
        return det > INCIRCLE_EPS * permanent

    def locate(self, p):
        t = self.last
        verts, nbrs = self.verts, self.nbrs
        while True:
            v = verts[t]
            if v[2] == GHOST:
                return t
            self._turn = (self._turn + 1) % 3
            for step in range(3):
                i = (self._turn + step) % 3
                if self.orient(v[(i + 1) % 3], v[(i + 2) % 3], p) < 0:
                    t = nbrs[t][i]
                    break
            else:
                return t

    def insert(self, p):
        seed = self.locate(p)
        bad = {seed}
        stack = [seed]
        while stack:
            t = stack.pop()
            for nt in self.nbrs[t]:
                if nt not in bad and self.in_circle(nt, p):
                    bad.add(nt)
                    stack.append(nt)

        while True:
            boundary = []
            grow = []
            for t in bad:
                v = self.verts[t]
                for i in range(3):
                    nt = self.nbrs[t][i]
                    if nt in bad:
                        continue
                    u, w = v[(i + 1) % 3], v[(i + 2) % 3]
                    if u != GHOST and w != GHOST and self.orient(u, w, p) <= 0:
                        grow.append(nt)
                    boundary.append((u, w, nt))
            if not grow:
                break
            bad.update(grow)

        new = []
        for u, w, outer in boundary:
            t = self.add(u, w, p)
            v = self.verts[t]
            self.nbrs[t][v.index(p)] = outer
            ov = self.verts[outer]
            for j in range(3):
                if ov[j] != u and ov[j] != w:
                    self.nbrs[outer][j] = t
                    break
            new.append(t)
        self.link(new, apex=p)

        for t in bad:
            self.alive[t] = False
            self.free.append(t)
        for t in new:
            if self.verts[t][2] != GHOST:
                self.last = t
                break

    def real_triangles(self):
        return [v for v, ok in zip(self.verts, self.alive) if ok and v[2] != GHOST]


def delaunay_triangulate(layout) -> Triangulation:
    """Delaunay triangulation of a 2D point layout.

    Exact duplicate coordinates are merged (the lowest index is kept and the
    rest are listed in ``Triangulation.coalesced``) with a warning, since the
    zero-area slivers they would create break area normalisation.

    Raises
    ------
    FewerThanThreePoints
        Fewer than three distinct points.
    AllPointsCollinear
        No triangle can be formed.
    """
    coords = as_points2(layout)
    n = len(coords)
    if n < 3:
        raise FewerThanThreePoints(f"need at least 3 points, got {n}")
    order, merged = _coalesce(coords)
    if merged:
        warnings.warn(
            f"{len(merged)} duplicate layout point(s) coalesced before triangulation",
            stacklevel=2,
        )
    if len(order) < 3:
        raise FewerThanThreePoints(f"need at least 3 distinct points, got {len(order)}")

    mesh = _Mesh(coords[:, 0].tolist(), coords[:, 1].tolist())
    for p in mesh.start(order):
        mesh.insert(p)

    tris = np.sort(np.array(mesh.real_triangles(), dtype=np.int64).reshape(-1, 3), axis=1)
    tris = tris[np.lexsort((tris[:, 2], tris[:, 1], tris[:, 0]))]
    return Triangulation(triangles=tris, n_points=n, coalesced=merged)
