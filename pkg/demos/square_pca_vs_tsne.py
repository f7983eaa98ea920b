"""
Flat square: PCA versus t-SNE
=============================

Three thousand points fill the unit square, with a hair of noise along a
third axis. PCA drops that axis and loses nothing. t-SNE keeps the local
neighbourhoods but tears the square into clusters with empty gaps between
them. Trustworthiness barely notices; the Warping Index does.

Takes about a minute, almost all of it in t-SNE.
"""
from pathlib import Path

import numpy as np

from warpqi import (
    TsneConfig,
    evaluate,
    generate_square,
    pca_project,
    render_quality_svg,
    tsne_project,
    warping_index,
)
from warpqi.cli import format_table

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)

# the data: uniform on [0,1] x [0,1] x [0,0.001]
square = generate_square(3000, noise=0.001, seed=7)
print("points", square.points.shape, "z range", np.ptp(square.points[:, 2]))

# both projections of the same points
pca = pca_project(square)
tsne = tsne_project(square, TsneConfig(perplexity=30, seed=7))

rows = [("PCA", evaluate(square, pca)), ("t-SNE", evaluate(square, tsne))]
print(format_table(rows))

# where the distortion lives: red triangles are stretched, blue compressed.
# Areas are relative to the largest triangle in each space, and in the t-SNE
# map the largest ones bridge the gaps, so the clusters read as compressed
for name, layout in (("pca", pca), ("tsne", tsne)):
    res = warping_index(layout, square)
    (out / f"square_{name}.svg").write_text(render_quality_svg(layout, res.triangulation, res.quality))
    q = res.quality.q_values
    print(f"{name}: |q| > 0.5 on {np.mean(q < -0.5):.1%} (compressed) and {np.mean(q > 0.5):.1%} (stretched) of triangles")
print("SVGs in", out)
