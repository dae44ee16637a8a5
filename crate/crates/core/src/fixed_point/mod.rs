//! Block partitions, regression instances and the fixed-point solver.

mod instance;
mod partition;
mod solver;

pub use instance::{
    orthonormalize_blocks, rescale_design, PilotRule, ProblemInstance, RescaledDesign, PILOT_CONDITION_LIMIT,
    PILOT_RIDGE_FACTOR,
};
pub use partition::BlockPartition;
pub(crate) use solver::block_factor;
pub use solver::{
    activation_margin, block_gradient_norms, block_mle_update, fixed_point_residual, fixed_point_residual_with,
    penalized_objective, solve, solve_group_sbite, solve_sbite, BlockOrder, FixedPointSolution, SolverOptions,
    UpdateRule, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
