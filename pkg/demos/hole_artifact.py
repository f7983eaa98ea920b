"""
A hole that stress and trustworthiness miss
===========================================

Start from a perfect layout (the data itself) and punch a hole in it by
pushing every point near the centre outward. Nothing crosses anything, so
neighbourhood ranks hardly move and distances change only locally. The
triangles spanning the hole, though, are hugely stretched.
"""
from pathlib import Path

import numpy as np

from warpqi import evaluate, render_quality_svg, warping_index

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)

rng = np.random.default_rng(0)
data = rng.random((1000, 2))


def evacuate_disk(coords, r, centre=(0.5, 0.5)):
    # points within 2r move out to the annulus r..2r; the rest stay put
    R = 2 * r
    v = coords - centre
    rho = np.hypot(v[:, 0], v[:, 1])
    near = rho < R
    new = np.sqrt(r * r + rho[near] ** 2 * (1 - r * r / (R * R)))
    moved = coords.copy()
    moved[near] = centre + v[near] * (new / rho[near])[:, None]
    return moved


print(f"{'radius':>8}{'WI':>10}{'stress':>10}{'trust':>10}")
for r in (0.0, 0.05, 0.1, 0.2):
    layout = data if r == 0 else evacuate_disk(data, r)
    rep = evaluate(data, layout)
    print(f"{r:>8.2f}{rep.warping_index:>10.4f}{rep.stress:>10.4f}{rep.trustworthiness:>10.4f}")

res = warping_index(layout, data)
(out / "hole.svg").write_text(render_quality_svg(layout, res.triangulation, res.quality))
print("quality map of the r=0.2 layout in", out / "hole.svg")
