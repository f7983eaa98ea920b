"""
Working from a distance matrix
==============================

Triangle areas only need side lengths, so the Warping Index works without
coordinates. Here the data are points on a sphere and the distance is the
great-circle (geodesic) one; the layout is a plain latitude/longitude map of
one hemisphere.

Geodesic distance is a metric, so no triangle is flagged. A hand-made
non-metric matrix shows what happens otherwise.
"""
import numpy as np

from warpqi import DistanceProvider, evaluate
from warpqi.errors import TriangleInequalityViolated
from warpqi.metrics import warping_index

rng = np.random.default_rng(3)
n = 400
lat = np.arcsin(rng.uniform(0, 1, n))  # uniform on the northern hemisphere
lon = rng.uniform(-np.pi, np.pi, n)
xyz = np.c_[np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)]
geodesic = np.arccos(np.clip(xyz @ xyz.T, -1, 1))
np.fill_diagonal(geodesic, 0)
dist = DistanceProvider.from_matrix(geodesic)

# equirectangular map: the pole is smeared along the top edge
plate = np.c_[lon, lat]
# azimuthal equidistant map: geodesic distance from the pole is kept
polar = np.c_[(np.pi / 2 - lat) * np.cos(lon), (np.pi / 2 - lat) * np.sin(lon)]

for name, layout in (("lat/lon", plate), ("azimuthal", polar)):
    rep = evaluate(dist, layout)
    print(f"{name:>10}: WI {rep.warping_index:.3f}  stress {rep.stress:.3f}  trust {rep.trustworthiness:.3f}")

# a 4-point matrix where one triple breaks the triangle inequality (1 + 1 < 3)
# (a bare array would be read as four points in 4-D, hence from_matrix)
bad = DistanceProvider.from_matrix([[0, 1, 3, 2], [1, 0, 1, 2.5], [3, 1, 0, 2], [2, 2.5, 2, 0]])
square = [(0, 0), (1, 0), (1, 1), (0, 1)]
res = warping_index(square, bad)
print("non-metric triples clamped to zero area:", res.metric_violations)
try:
    warping_index(square, bad, strict=True)
except TriangleInequalityViolated as exc:
    print("strict mode:", exc)
