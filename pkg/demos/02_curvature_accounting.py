"""Cone angles, vertex curvature, and the global count that cannot move.

Assign a radius to every vertex of a closed triangulated surface and each
face becomes a triangle; the angles around a vertex add up to its cone
angle, and 2 pi minus that is the vertex curvature K_i. However the radii
are chosen, the K_i always add up to 2 pi chi minus the curvature-weighted
total area: individual vertices trade curvature, the sum is bookkeeping.
"""

import numpy as np

import circleflow as cf
from circleflow import meshes

rng = np.random.default_rng(3)

tet = meshes.tetrahedron()
print("tetrahedron (chi = 2), Euclidean, random radii:")
for trial in range(3):
    radii = rng.uniform(0.4, 2.5, 4)
    metric = cf.PackingMetric(geometry=cf.Geometry.EUCLIDEAN, radii=radii)
    st = cf.curvature_state(tet, metric)
    print(
        "  radii %s  K %s  sum(K)/pi = %.12f  residual %.1e"
        % (np.round(radii, 3), np.round(st.curvatures, 3), st.curvatures.sum() / np.pi, st.gb_residual)
    )
print("  every draw lands on sum(K) = 4 pi exactly\n")

g2 = meshes.genus_2()
print("genus-2 surface (chi = -2), hyperbolic, random radii:")
for trial in range(3):
    radii = rng.uniform(0.5, 3.0, 11)
    metric = cf.PackingMetric(geometry=cf.Geometry.HYPERBOLIC, radii=radii)
    st = cf.curvature_state(g2, metric)
    print(
        "  sum(K) = %+.6f  area = %.6f  sum(K) - area = %.12f  (= -4 pi)"
        % (st.curvatures.sum(), st.total_area, st.curvatures.sum() - st.total_area)
    )
print()

t7 = meshes.torus_7()
print("7-vertex torus (chi = 0), equal radii are already flat:")
st = cf.curvature_state(t7, cf.PackingMetric(geometry=cf.Geometry.EUCLIDEAN, radii=np.ones(7)))
print("  max |K_i| =", np.abs(st.curvatures).max())
print("  average curvature target:", st.avg_curvature)
