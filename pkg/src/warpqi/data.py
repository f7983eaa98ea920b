"""Point sets, layouts, distance providers, CSV I/O and the synthetic square data.

Row order is the only link between a high-dimensional point and its 2D
position, so every loader preserves it and every consumer of both sides
checks that the counts agree.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from .errors import (
    NegativeEntry,
    NonFinite,
    NonZeroDiagonal,
    NotSquare,
    NotSymmetric,
    ParseError,
    RaggedRows,
    SizeMismatch,
    WrongColumnCount,
)

RNG_FAMILY = "numpy.random.PCG64"
SYMMETRY_RTOL = 1e-9


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray
    ids: tuple | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise ValueError(f"points must be an (n, d) array, got shape {pts.shape}")
        if len(pts) < 3:
            raise ValueError(f"a point set needs at least 3 points, got {len(pts)}")
        if not np.all(np.isfinite(pts)):
            raise NonFinite("point set contains NaN or infinite values")
        if self.ids is not None and len(self.ids) != len(pts):
            raise SizeMismatch(f"{len(self.ids)} ids for {len(pts)} points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class Layout:
    coords: np.ndarray

    def __post_init__(self):
        xy = np.array(self.coords, dtype=float)
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise ValueError(f"layout must be an (n, 2) array, got shape {xy.shape}")
        if not np.all(np.isfinite(xy)):
            raise NonFinite("layout contains NaN or infinite values")
        xy.setflags(write=False)
        object.__setattr__(self, "coords", xy)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    def __len__(self):
        return self.n


class DistanceProvider:
    """Pairwise distances between the high-dimensional points.

    Backed either by a point matrix (Euclidean metric, computed on demand) or
    by an explicit dense distance matrix. Build one with
    :meth:`from_points` or :meth:`from_matrix`.
    """

    def __init__(self, *, points=None, matrix=None):
        if (points is None) == (matrix is None):
            raise ValueError("give exactly one of points or matrix")
        self._points = None if points is None else np.asarray(getattr(points, "points", points), dtype=float)
        self._matrix = None if matrix is None else np.asarray(matrix, dtype=float)
        self.metric = "euclidean" if matrix is None else "precomputed"

    @classmethod
    def from_points(cls, points) -> "DistanceProvider":
        return cls(points=points)

    @classmethod
    def from_matrix(cls, matrix, *, validate=True) -> "DistanceProvider":
        m = np.array(matrix, dtype=float)
        if validate:
            m = validate_distance_matrix(m)
        return cls(matrix=m)

    @property
    def n(self) -> int:
        src = self._points if self._points is not None else self._matrix
        return src.shape[0]

    def __len__(self):
        return self.n

    def __call__(self, i, j) -> float:
        return float(self.pairs(np.array([i]), np.array([j]))[0])

    def pairs(self, i, j) -> np.ndarray:
        i = np.asarray(i, dtype=np.intp)
        j = np.asarray(j, dtype=np.intp)
        if self._matrix is not None:
            return self._matrix[i, j]
        diff = self._points[i] - self._points[j]
        return np.sqrt(np.einsum("...k,...k->...", diff, diff))

    def rows(self, idx) -> np.ndarray:
        """Distances from the points in ``idx`` to every point, shape (len(idx), n)."""
        idx = np.asarray(idx, dtype=np.intp)
        if self._matrix is not None:
            return self._matrix[idx]
        return cdist(self._points[idx], self._points)

    def matrix(self) -> np.ndarray:
        """Dense n x n distance matrix (computed, not cached, for point data)."""
        if self._matrix is not None:
            return self._matrix
        return squareform(pdist(self._points))

    def condensed(self) -> np.ndarray:
        """Upper-triangle distances in ``scipy.spatial.distance.pdist`` order."""
        if self._matrix is not None:
            return squareform(self._matrix, checks=False)
        return pdist(self._points)


def as_distance_provider(obj) -> DistanceProvider:
    """Accept a provider, a PointSet, or an (n, d) point array."""
    if isinstance(obj, DistanceProvider):
        return obj
    return DistanceProvider.from_points(obj)


def check_aligned(n_hd: int, n_layout: int):
    if n_hd != n_layout:
        raise SizeMismatch(
            f"high-dimensional data has {n_hd} points but the layout has {n_layout}"
        )


def euclidean_distance(ps, i: int, j: int) -> float:
    pts = getattr(ps, "points", ps)
    n = len(pts)
    for k in (i, j):
        if not 0 <= k < n:
            raise IndexError(f"point index {k} out of range for {n} points")
    return float(np.linalg.norm(pts[i] - pts[j]))


def validate_distance_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"distance matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite("distance matrix contains NaN or infinite values")
    if np.any(m < 0):
        i, j = np.argwhere(m < 0)[0]
        raise NegativeEntry(f"negative distance at ({i}, {j})")
    if np.any(np.diag(m) != 0):
        i = int(np.flatnonzero(np.diag(m))[0])
        raise NonZeroDiagonal(f"diagonal entry {i} is {m[i, i]!r}, expected 0")
    asym = np.abs(m - m.T) > SYMMETRY_RTOL * np.maximum(m, m.T)
    if np.any(asym):
        i, j = np.argwhere(asym)[0]
        raise NotSymmetric(f"d[{i},{j}]={m[i, j]!r} differs from d[{j},{i}]={m[j, i]!r}")
    return 0.5 * (m + m.T)


def _parse_float(text):
    try:
        return float(text)
    except ValueError:
        return None


def read_numeric_csv(path, has_header: bool | None = None) -> np.ndarray:
    """Parse a comma-separated numeric table.

    With ``has_header=None`` the first row is taken as a header when none of
    its fields is a number. Errors report 1-based file row and column.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh), start=1) if row and any(f.strip() for f in row)]
    if rows and has_header is None:
        has_header = all(_parse_float(f) is None for f in rows[0][1])
    if has_header:
        rows = rows[1:]
    if not rows:
        raise ParseError(f"{path}: no data rows")
    width = len(rows[0][1])
    for lineno, row in rows:
        if len(row) != width:
            raise RaggedRows(
                f"{path}: row {lineno} has {len(row)} columns, expected {width}", row=lineno
            )
    try:
        out = np.array([row for _, row in rows], dtype=float)
    except ValueError:
        for lineno, row in rows:
            for c, field in enumerate(row):
                if _parse_float(field) is None:
                    raise ParseError(
                        f"{path}: row {lineno} col {c + 1}: cannot parse {field!r} as a number",
                        row=lineno,
                        col=c + 1,
                    ) from None
        raise
    if not np.all(np.isfinite(out)):
        r, c = np.argwhere(~np.isfinite(out))[0]
        raise NonFinite(f"{path}: row {rows[r][0]} col {c + 1}: non-finite value")
    return out


def write_numeric_csv(path, array, header=None):
    array = np.asarray(array, dtype=float)
    with Path(path).open("w", newline="") as fh:
        if header:
            fh.write(",".join(header) + "\n")
        for row in array:
            fh.write(",".join("%.17g" % v for v in row) + "\n")


def load_points_csv(path, has_header: bool | None = None) -> PointSet:
    return PointSet(read_numeric_csv(path, has_header))


def save_points_csv(ps, path):
    pts = getattr(ps, "points", ps)
    write_numeric_csv(path, pts, header=[f"x{k}" for k in range(np.shape(pts)[1])])


def load_distance_matrix(path) -> DistanceProvider:
    return DistanceProvider.from_matrix(read_numeric_csv(path))


def save_distance_matrix(dist, path):
    m = dist.matrix() if isinstance(dist, DistanceProvider) else dist
    write_numeric_csv(path, m)


def save_layout_csv(layout, path):
    write_numeric_csv(path, getattr(layout, "coords", layout), header=["x", "y"])


def load_layout_csv(path) -> Layout:
    xy = read_numeric_csv(path)
    if xy.shape[1] != 2:
        raise WrongColumnCount(f"{path}: layout needs 2 columns, found {xy.shape[1]}")
    return Layout(xy)


def generate_square(n: int = 3000, noise: float = 0.001, seed=None) -> PointSet:
    """Uniform points in ``[0,1] x [0,1] x [0, noise]``.

    A plane with a thin layer of noise along the third axis. Drawn from
    ``numpy.random.Generator(PCG64(seed))``, which gives the same stream on
    every platform.
    """
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    if not noise >= 0:
        raise ValueError(f"noise must be non-negative, got {noise}")
    rng = np.random.Generator(np.random.PCG64(seed))
    pts = rng.random((n, 3)) * np.array([1.0, 1.0, noise])
    return PointSet(pts)
