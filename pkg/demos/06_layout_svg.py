"""Drawing the packing: unroll faces across a spanning tree.

Place a seed face, then walk face to face, each time planting the next
triangle on the shared edge it has in common with an already-placed one.
Tree edges match exactly by construction; the leftover cut edges are
where the surface's topology shows (a torus will not lie flat without
seams). Flat packings render in the plane, hyperbolic ones in the unit
disk.
"""

import os

import numpy as np

import circleflow as cf
from circleflow import files, meshes

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "out")
os.makedirs(OUT, exist_ok=True)

# flow the 7-vertex torus flat first, so circles across each face kiss
t7 = meshes.torus_7()
rng = np.random.default_rng(4)
_, report = cf.run_flow(t7, cf.PackingMetric(geometry=cf.Geometry.EUCLIDEAN, radii=rng.uniform(0.5, 2.0, 7)))
flat = cf.PackingMetric(geometry=cf.Geometry.EUCLIDEAN, radii=np.asarray(report.limit_radii))

plan = cf.develop_layout(t7, flat)
print("flat torus: %d faces, %d tree edges, %d cut edges" % (len(t7.faces), len(plan.tree_edges), len(plan.cut_edges)))
svg = cf.render_svg(t7, plan)
path = os.path.join(OUT, "torus_flat.svg")
with open(path, "w") as fh:
    fh.write(svg)
print("wrote", path)

# tangency audit: in the flat limit every in-face circle pair is tangent
fv = t7.face_vertices
worst = 0.0
for f in range(len(fv)):
    coords = plan.face_coords[f]
    r = np.asarray(flat.radii)[fv[f]]
    for a, b in ((0, 1), (1, 2), (2, 0)):
        d = float(np.linalg.norm(coords[a] - coords[b]))
        worst = max(worst, abs(d - (r[a] + r[b])))
print("worst tangency defect: %.2e" % worst)

# hyperbolic case: genus-2 fixture into the unit disk
mesh, metric, _ = files.parse_mesh(os.path.join(HERE, "..", "fixtures", "genus2.json"))
plan2 = cf.develop_layout(mesh, metric)
arr = plan2.circles.reshape(-1, 3)
reach = np.hypot(arr[:, 0], arr[:, 1]) + arr[:, 2]
print("\ngenus-2 disk layout: %d tree edges, %d cut edges" % (len(plan2.tree_edges), len(plan2.cut_edges)))
print("outermost circle reaches %.10f of the disk radius (strictly inside)" % reach.max())
path2 = os.path.join(OUT, "genus2_disk.svg")
with open(path2, "w") as fh:
    fh.write(cf.render_svg(mesh, plan2))
print("wrote", path2)
