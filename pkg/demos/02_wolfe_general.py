"""Minimum-norm point over an arbitrary vertex set.

When a polytope is only known through its vertices, the projection runs
Wolfe's algorithm.  It starts from the nearest vertex, adds one violating
vertex per major cycle and shrinks the corral in minor cycles.
"""

import numpy as np

from dualproj import VertexListOracle, wolfe_project
from dualproj.reference import reference_qp_project
from dualproj import hull

rng = np.random.default_rng(3)
V = rng.integers(0, 3, size=(12, 5)).astype(float)
oracle = VertexListOracle(V)

for trial in range(5):
    xhat = 2.0 * rng.standard_normal(5) + 1.0
    res = wolfe_project(oracle, xhat)
    ref = reference_qp_project(hull(V), xhat)
    print(f"trial {trial}: corral {res.support}  weights {np.round(res.weights, 4)}  "
          f"major {res.stats['major']}  minor {res.stats['minor']}  "
          f"|x - reference| = {np.linalg.norm(res.x - ref):.1e}")

# A point inside the hull is its own projection; Wolfe certifies it by
# reaching zero distance.
inside = V[:4].mean(axis=0)
print("interior point distance:", np.linalg.norm(wolfe_project(oracle, inside).x - inside))
