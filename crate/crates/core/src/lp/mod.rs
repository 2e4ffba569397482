//! Robustness linear programs.

pub mod robustness;
pub mod solver;
pub mod state;

pub use robustness::{
    approx_robustness, bracket, measurement_robustness, solve_visibility_lp, BoundKind, Certificate, LpOptions,
    RobustnessResult,
};
pub use solver::{SolveStatus, SolverOptions};
pub use state::{measurement_shrinking_factor, state_lower_bound, state_upper_bound, NoiseKind, NoiseModel};
