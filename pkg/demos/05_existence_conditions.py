"""Which targets are reachable at all: counting angles before solving.

A packing with prescribed curvature targets exists iff every proper vertex
subset keeps its target sum above a bound read off the triangulation alone.
When the bound is violated the solver cannot save you: the offending
subset's circles shrink away instead, and their curvature sum piles up
against the bound from above.
"""

import math

import numpy as np

import circleflow as cf
from circleflow import meshes

tet = meshes.tetrahedron()
print("tetrahedron subset bounds (zero weights):")
for subset in ({0}, {0, 1}, {0, 1, 2}):
    b = cf.subset_bound(tet, subset)
    print("  %-12s -> %+0.4f  (%+.3f pi)" % (sorted(subset), b, b / math.pi))

verdict = cf.check_subset_inequalities(tet)
print("full scan: %s over %d subsets, min margin %.4f" % (verdict.status, verdict.subsets_checked, verdict.min_margin))

print("\na sphere with one overloaded center vertex:")
vs = meshes.violating_sphere()
bad = cf.check_subset_inequalities(vs)
print("  verdict: %s, witness %s, margin %.6f" % (bad.status, bad.witness, bad.min_margin))
try:
    cf.newton_solve(vs, cf.PackingMetric(geometry=cf.Geometry.EUCLIDEAN, radii=np.ones(9)), cf.FlowConfig(max_steps=50))
except cf.NewtonNonConvergenceError as err:
    print("  newton gives up: residual %.4f after %d iterations" % (err.residual, err.iterations))

print("\ndriving the witness vertex toward the bound by shrinking it:")
base = np.where(np.arange(4) == 0, 0.01, 100.0)
metric = cf.PackingMetric(geometry=cf.Geometry.EUCLIDEAN, radii=base)
rows = cf.degeneration_probe(tet, metric, {0}, shrink_factors=(1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5))
print("  tetrahedron, subset {0}, bound %.6f:" % rows[0].bound)
for row in rows:
    print("  factor %7.0e   sum K_I %+0.9f   gap %.3e" % (row.factor, row.curvature_sum, row.gap))
print("  the gap stays positive and closes like sqrt(factor)")

print("\nhigher genus uses short-loop screens instead of subset scans:")
g2good, g2bad = meshes.genus_2(), meshes.violating_genus_2()
for name, mesh in (("genus-2", g2good), ("genus-2 with a hot rim", g2bad)):
    report = cf.full_report(mesh, cf.Geometry.HYPERBOLIC)
    line = "  %-22s -> %s" % (name, report.overall)
    if report.overall == "fails":
        witnesses = [w.vertices for w in report.loops[0].witnesses]
        line += "  (3-loop witness %s)" % witnesses[0:1]
    print(line)
