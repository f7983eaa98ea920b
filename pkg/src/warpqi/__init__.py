"""Warping Index: area-based distortion of 2D projections of high-dimensional data."""

__version__ = "0.1.0"

from .data import (
    DistanceProvider,
    Layout,
    PointSet,
    generate_square,
    load_distance_matrix,
    load_layout_csv,
    load_points_csv,
    save_layout_csv,
)
from .geometry import Triangulation, delaunay_triangulate
from .metrics import MetricsReport, QualityMap, evaluate, normalized_stress, trustworthiness, warping_index
from .projectors import TsneConfig, pca_project, tsne_project
from .render import RenderSpec, render_quality_svg

__all__ = [
    "DistanceProvider",
    "Layout",
    "MetricsReport",
    "PointSet",
    "QualityMap",
    "RenderSpec",
    "Triangulation",
    "TsneConfig",
    "delaunay_triangulate",
    "evaluate",
    "generate_square",
    "load_distance_matrix",
    "load_layout_csv",
    "load_points_csv",
    "normalized_stress",
    "pca_project",
    "render_quality_svg",
    "save_layout_csv",
    "trustworthiness",
    "tsne_project",
    "warping_index",
]
