"""The spherical case keeps its own counsel.

With positive background curvature the energy is no longer convex and the
flow direction need not improve matters; this solver therefore integrates
spherical packings under guard rails but refuses to promise convergence.
Face radius sums are pinned below pi at every accepted step, and runs end
in 'stopped' or 'constraint_hit' rather than 'converged'.
"""

import math

import numpy as np

import circleflow as cf
from circleflow import meshes

tet = meshes.tetrahedron()
fv = tet.face_vertices

for label, radii in (
    ("small equal radii  ", np.full(4, math.pi / 8)),
    ("uneven start       ", np.array([0.15, 0.3, 0.22, 0.4])),
):
    metric = cf.PackingMetric(geometry=cf.Geometry.SPHERICAL, radii=radii)
    trace, report = cf.run_flow(tet, metric)
    sums = np.asarray([np.asarray(s.radii)[fv].sum(axis=1).max() for s in trace.samples])
    print("%s-> %-14s %3d samples, report: %s" % (label, trace.termination.value, len(trace.samples), report))
    print("                      max face radius sum seen: %.6f (< pi = %.6f)" % (sums.max(), math.pi))

print("\nnewton refuses the spherical case outright:")
try:
    cf.newton_solve(tet, cf.PackingMetric(geometry=cf.Geometry.SPHERICAL, radii=np.full(4, 0.3)))
except ValueError as err:
    print("  ValueError:", err)

print("\nthe equal-radii spherical fixed point exists but repels:")
# all cone angles hit 2 pi (K = 0, the round sphere) at r* = arccos(-1/3)/2;
# nudge the common radius and watch the flow direction -K amplify it
r_star = math.acos(-1.0 / 3.0) / 2.0
print("  r* = %.6f" % r_star)
for eps in (-0.01, 0.01):
    metric = cf.PackingMetric(geometry=cf.Geometry.SPHERICAL, radii=np.full(4, r_star + eps))
    K = cf.curvature_state(tet, metric).curvatures
    print(
        "  r = r* %+0.2f: K = %+.4f, so dr/dt ~ -K is %s: the nudge grows"
        % (eps, K[0], "negative" if K[0] > 0 else "positive")
    )
