"""Projection quality metrics: per-triangle quality, Warping Index, stress, trustworthiness.

The Warping Index compares every Delaunay triangle of the layout with the
triangle its three points span in the original space. Areas are normalised
per space by that space's largest triangle, so neither the layout's nor the
data's absolute scale matters. Per triangle::

    q = (a_2d - a_hd) / max(a_2d, a_hd)          in [-1, 1]

negative for compressed regions, positive for stretched ones. The index is
the 2D-area-weighted mean of ``|q|``.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .data import as_distance_provider, check_aligned
from .errors import AllAreasZero, AllDistancesZero, KTooLarge
from .geometry import Triangulation, as_points2, delaunay_triangulate, hd_triangle_areas, triangle_areas_2d

DEGENERATE_EPS = 1e-12
DEFAULT_K = 5
_ROW_BLOCK = 256


@dataclass(frozen=True)
class QualityMap:
    q_values: np.ndarray
    areas_2d_norm: np.ndarray
    areas_hd_norm: np.ndarray
    degenerate_flags: np.ndarray

    def __len__(self):
        return len(self.q_values)

    def to_dict(self) -> dict:
        return {
            "q_values": self.q_values.tolist(),
            "areas_2d_norm": self.areas_2d_norm.tolist(),
            "areas_hd_norm": self.areas_hd_norm.tolist(),
            "degenerate_flags": self.degenerate_flags.tolist(),
        }


class WarpingResult(NamedTuple):
    index: float
    quality: QualityMap
    triangulation: Triangulation
    metric_violations: int


@dataclass
class MetricsReport:
    warping_index: float
    stress: float
    trustworthiness: float
    k_neighbors: int
    n_points: int
    n_triangles: int
    degenerate_triangle_count: int
    triangle_inequality_violations: int = 0
    duplicate_points: int = 0
    quality: QualityMap | None = field(default=None, repr=False)
    triangles: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self, per_triangle=False) -> dict:
        out = {k: v for k, v in asdict(self).items() if k not in ("quality", "triangles")}
        if per_triangle and self.quality is not None:
            out["triangles"] = self.triangles.tolist()
            out["quality"] = self.quality.to_dict()
        return out

    def to_json(self, per_triangle=False) -> str:
        return json.dumps(self.to_dict(per_triangle), indent=2, sort_keys=False) + "\n"


def normalize_areas(areas) -> np.ndarray:
    """Divide by the largest area so the biggest triangle gets 1."""
    areas = np.asarray(areas, dtype=float)
    top = areas.max() if areas.size else 0.0
    if not top > 0:
        raise AllAreasZero("every triangle has zero area")
    return areas / top


def quality_values(a2d, ahd):
    """Vectorised triangle quality with degenerate handling.

    A triangle whose normalised area is below ``DEGENERATE_EPS`` in one space
    only gets ``q = -1`` (vanished in 2D) or ``+1`` (vanished in the data);
    below it in both spaces gets ``q = 0``. Both cases are flagged.
    """
    a2d = np.asarray(a2d, dtype=float)
    ahd = np.asarray(ahd, dtype=float)
    tiny2, tinyh = a2d < DEGENERATE_EPS, ahd < DEGENERATE_EPS
    big = np.maximum(a2d, ahd)
    with np.errstate(invalid="ignore", divide="ignore"):
        q = (a2d - ahd) / big
    q = np.where(tiny2 & tinyh, 0.0, q)
    q = np.where(tiny2 & ~tinyh, -1.0, q)
    q = np.where(tinyh & ~tiny2, 1.0, q)
    return q, tiny2 | tinyh


def triangle_quality(a2d: float, ahd: float) -> float:
    q, _ = quality_values([a2d], [ahd])
    return float(q[0])


def warping_index(layout, dist, *, strict=False) -> WarpingResult:
    """Warping Index of a 2D layout against the original distances.

    Parameters
    ----------
    layout : (n, 2) array_like or Layout
    dist : DistanceProvider, PointSet or (n, d) array
        Distances in the original space. Only the three sides of each layout
        triangle are queried, so a metric distance matrix is enough.
    strict : bool
        Raise :class:`TriangleInequalityViolated` on non-metric side triples
        instead of counting them and using zero area.

    Returns
    -------
    WarpingResult
        ``(index, quality, triangulation, metric_violations)``.
    """
    coords = as_points2(layout)
    dist = as_distance_provider(dist)
    check_aligned(dist.n, len(coords))
    tri = delaunay_triangulate(coords)
    diag = Counter()
    a2d = normalize_areas(triangle_areas_2d(coords, tri))
    ahd = normalize_areas(hd_triangle_areas(tri, dist, strict=strict, diagnostics=diag))
    q, flags = quality_values(a2d, ahd)
    wi = float(np.sum(a2d * np.abs(q)) / np.sum(a2d))
    quality = QualityMap(q_values=q, areas_2d_norm=a2d, areas_hd_norm=ahd, degenerate_flags=flags)
    return WarpingResult(min(max(wi, 0.0), 1.0), quality, tri, diag["triangle_inequality"])


def normalized_stress(dist_hd, layout) -> float:
    """Kruskal stress-1 after the best uniform rescaling of the layout.

    With ``d`` the original and ``e`` the layout distances over all pairs,
    the scale ``s = sum(d e) / sum(e^2)`` minimises the residual and the
    result is ``sqrt(sum((d - s e)^2) / sum(d^2))``.
    """
    coords = as_points2(layout)
    dist_hd = as_distance_provider(dist_hd)
    check_aligned(dist_hd.n, len(coords))
    if len(coords) < 2:
        raise ValueError("stress needs at least 2 points")
    d = dist_hd.condensed()
    e = pdist(coords)
    dd = float(d @ d)
    ee = float(e @ e)
    if dd == 0 or ee == 0:
        raise AllDistancesZero("all pairwise distances are zero")
    scale = float(d @ e) / ee
    resid = d - scale * e
    return float(np.sqrt((resid @ resid) / dd))


def trustworthiness(dist_hd, layout, k: int = DEFAULT_K) -> float:
    """Venna-Kaski trustworthiness of the layout's k-neighbourhoods.

    Every layout neighbour of ``i`` that is not among its ``k`` nearest in
    the original space costs ``rank - k``, where rank counts from 1 in the
    original space. Ties in distance are broken by ascending point index.
    """
    coords = as_points2(layout)
    dist_hd = as_distance_provider(dist_hd)
    n = len(coords)
    check_aligned(dist_hd.n, n)
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if not k < n / 2:
        raise KTooLarge(f"k={k} must be below n/2={n / 2}")

    penalty = 0
    cols = np.arange(n)
    for start in range(0, n, _ROW_BLOCK):
        idx = np.arange(start, min(start + _ROW_BLOCK, n))
        local = np.arange(len(idx))
        dh = np.array(dist_hd.rows(idx), dtype=float)
        dl = cdist(coords[idx], coords)
        # self sorts first regardless of duplicates
        dh[local, idx] = -1.0
        dl[local, idx] = -1.0
        order = np.argsort(dh, axis=1, kind="stable")
        rank = np.empty_like(order)
        np.put_along_axis(rank, order, np.broadcast_to(cols, order.shape), axis=1)
        nbrs = np.argsort(dl, axis=1, kind="stable")[:, 1 : k + 1]
        r = np.take_along_axis(rank, nbrs, axis=1)
        penalty += int(np.sum(np.maximum(r - k, 0)))
    return 1.0 - 2.0 * penalty / (n * k * (2 * n - 3 * k - 1))


def evaluate(points_or_dist, layout, k: int = DEFAULT_K, *, strict=False) -> MetricsReport:
    """Warping Index, stress and trustworthiness for one data/layout pair."""
    coords = as_points2(layout)
    dist = as_distance_provider(points_or_dist)
    check_aligned(dist.n, len(coords))
    wi = warping_index(coords, dist, strict=strict)
    return MetricsReport(
        warping_index=wi.index,
        stress=normalized_stress(dist, coords),
        trustworthiness=trustworthiness(dist, coords, k),
        k_neighbors=k,
        n_points=len(coords),
        n_triangles=len(wi.triangulation),
        degenerate_triangle_count=int(np.count_nonzero(wi.quality.degenerate_flags)),
        triangle_inequality_violations=wi.metric_violations,
        duplicate_points=len(wi.triangulation.coalesced),
        quality=wi.quality,
        triangles=wi.triangulation.triangles,
    )
