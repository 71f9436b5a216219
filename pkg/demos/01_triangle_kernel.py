"""Three mutually intersecting circles pin down one triangle.

Pick three radii and three crossing angles, and each background geometry
gives a triangle whose side lengths come from the two adjacent radii and the
crossing weight on that side. The inner angles then respond to radius
changes with a fixed sign pattern: growing your own circle always shrinks
your angle, growing a neighbor always widens it.
"""

import math

import numpy as np

import circleflow as cf

radii = np.array([1.0, 1.4, 0.8])
weights = np.array([0.3, 0.5, 0.2])

for geometry in (cf.Geometry.EUCLIDEAN, cf.Geometry.HYPERBOLIC, cf.Geometry.SPHERICAL):
    r = radii * 0.25 if geometry is cf.Geometry.SPHERICAL else radii
    tc = cf.TriangleConfig(geometry=geometry, radii=r, weights=weights)
    ang = cf.tri_angles(tc)
    print(f"--- {geometry.tag}")
    print("  radii          ", np.round(r, 4))
    print("  side lengths   ", np.round(ang.lengths, 4))
    print("  angles         ", np.round(ang.angles, 4))
    print("  angle sum - pi  %+.6f" % ang.area_term)

    J = cf.dtheta_dr(tc)
    print("  dtheta/dr diag ", np.round(np.diag(J), 4), "(all negative)")
    off = J[~np.eye(3, dtype=bool)]
    print("  off-diag range  [%.4f, %.4f] (all positive)" % (off.min(), off.max()))

    # the s-weighted Jacobian is symmetric: s(r_j) dtheta_i/dr_j = s(r_i) dtheta_j/dr_i
    s = cf.s_func(geometry, r)
    M = s[None, :] * J
    print("  symmetry defect %.2e" % np.abs(M - M.T).max())

# tangent circles (zero weights) meet at distance r_a + r_b in every geometry
print("\ntangent-circle edge lengths, radii 0.3 and 0.45:")
for geometry in (cf.Geometry.EUCLIDEAN, cf.Geometry.HYPERBOLIC, cf.Geometry.SPHERICAL):
    d = cf.edge_length(geometry, 0.3, 0.45, 0.0)
    print("  %-11s %.12f" % (geometry.tag, d))
print("  (all equal 0.75: tangency is additive regardless of curvature)")
