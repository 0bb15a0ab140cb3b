"""Letting the solver pick gamma.

Large gamma makes the dual easy but biased, small gamma is accurate but
slow.  The stage-wise schedule starts large and shrinks gamma only when
the current stage has stopped paying off.
"""

from dualproj import OptimizerConfig, StageConfig, generate_marketplace, solve_fixed, stagewise_solve

p = generate_marketplace(I=100, K=10, m=5, seed=4)
res = stagewise_solve(p)
print("stage  eps      gamma       g_drop      psi_a     repeats  g0")
for s in res.stages:
    print(f"{s.stage:5d}  {s.eps:.0e}  {s.gamma:.3e}  {s.g_drop:.4e}  {s.psi_a:8.4f}  "
          f"{s.repeats:7d}  {s.g0:.8f}")

long = stagewise_solve(p, StageConfig(R=200))

# For comparison, fixed gammas with the same number of iterations: too large
# loses quality, too small needs more iterations to get anywhere.
fixed = {gamma: solve_fixed(p, gamma, OptimizerConfig(max_iters=len(res.rows)))
         for gamma in (1e-1, 1e-3, 1e-5)}
best = max([long.best_g0, res.best_g0] + [fx.best_g0 for fx in fixed.values()])
print(f"\nQ after the schedule: {res.quality(best):.8f}  ({len(res.rows)} trace rows)")
for gamma, fx in fixed.items():
    q = (fx.g0 - fx.g0_zero) / (best - fx.g0_zero)
    print(f"fixed gamma {gamma:.0e}: Q = {q:.8f} after {len(fx.rows)} rows")
