"""Dual decomposition for block-structured LPs with fast polytope projections.

The problem ``min c.x  s.t.  A x <= b,  x_i in C_i`` is attacked through the
smoothed Lagrangian dual, whose gradient needs one Euclidean projection per
block.  The package provides the projections (closed form or vertex-based),
the dual oracle, three first-order maximizers, a stage-wise schedule for the
smoothing parameter and a few diagnostics.
"""

__version__ = "0.1.0"

from .diagnostics import (GapReport, InfeasibilityVerdict, Status, check_infeasible,
                          diagnose_infeasibility, gap_report, greedy_baseline,
                          infeasibility_bound, penalized_objective, relax, relaxation_reference,
                          repair_to_feasible, weak_duality_gap)
from .dual import (CorralStats, DualEvaluation, block_argmin, corral_stats, eval_dual, eval_g0,
                   g0, project_all)
from .errors import *  # noqa: F401,F403
from .generators import MarketSpec, generate_infeasible, generate_marketplace
from .io import dumps_problem, loads_problem, parse_problem, read_trace, write_problem, write_trace
from .optimizers import (IterateHistory, OptimizerConfig, OptimizerTrace, estimate_L,
                         initial_step, maximize, maximize_dual, pga_step, weak_wolfe_bisection)
from .polytope import Kind, PolytopeSpec, ProjectionResult, box, boxcut, hull, parity, simplex
from .problem import (Block, Problem, ValidationReport, is_feasible, make_problem, objective,
                      residual, validate_problem)
from .projections import (boxcut_vertex_oracle, linear_minimize, parity_nearest_vertex,
                          parity_vertex_oracle, project, project_box, project_boxcut_eq,
                          project_boxcut_iq, project_general, project_parity,
                          project_simplex_eq, project_simplex_iq)
from .smoothing import (StageConfig, StageResult, check_lemma1, psi_gamma, psi_tilde,
                        quality_score, solve_fixed, stagewise_solve, sufficient_convergence)
from .wolfe import VertexListOracle, affine_minimizer, minor_cycle_step, optimality_check, wolfe_project
