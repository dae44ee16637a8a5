//! Stein unbiased risk estimation for fixed-point fits and hyperparameter search.

mod gradient;
mod search;
mod sure;

pub use gradient::{beta_gradient, GradientSystem};
pub use search::{
    criterion_surface, evaluate_point, lambda_max, log_grid, search_hyperparameters, search_hyperparameters_with,
    two_stage_search, Criterion, RegressionFit, SearchGrids, SearchOutcome, Smoothness, SurfacePoint,
    DEFAULT_LAMBDA_MIN, DEFAULT_LAMBDA_POINTS, DEFAULT_NUS, DEFAULT_REFINE_POINTS,
};
pub use sure::{degrees_of_freedom, gsure, gsure_value, sure, sure_value, RiskReport};

#[cfg(test)]
mod tests;
