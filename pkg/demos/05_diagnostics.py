"""Infeasibility, duality gaps and a greedy baseline.

If the budgets cannot be met, the dual is unbounded; once a dual value
exceeds an easy upper bound on any feasible objective, infeasibility is
proven.  For feasible problems a repaired primal point gives a weak-duality
gap and the greedy baseline shows what the dual buys.
"""

from dualproj import (diagnose_infeasibility, gap_report, generate_infeasible,
                      generate_marketplace, maximize_dual)
from dualproj.reference import reference_lp_solve

bad = generate_infeasible(I=50, K=5, m=3, seed=1)
verdict = diagnose_infeasibility(bad)
print("infeasible instance:", verdict.to_dict())

ok = generate_marketplace(I=50, K=5, m=3, seed=1, polytope="simplex_iq")
print("feasible instance:  ", diagnose_infeasibility(ok).status.value)

lam, tr = maximize_dual(ok, 0.001)
rep = gap_report(ok, lam)
_, f_star, _ = reference_lp_solve(ok)
print(f"\nrepaired primal {rep.primal:.6f}  dual bound {rep.dual:.6f}  gap {rep.gap:.2e}")
print(f"greedy baseline {rep.greedy:.6f}   exact optimum {f_star:.6f}")
