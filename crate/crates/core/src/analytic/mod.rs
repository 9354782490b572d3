//! Generating-function analysis of node removal and cascade stages.

mod critical;
mod distribution;
mod percolation;
mod recursion;

use thiserror::Error;

pub use critical::{
    critical_attack_size, predict, predict_with, AnalyticModel, CriticalMethod, TargetedProfile,
    CRITICAL_MU,
};
pub use distribution::{DegreeDistribution, GenFnSet};
pub use percolation::{
    giant_random_removal, linear_targeted_profile, random_profile, smallest_fixed_point, solve_u,
    successive_sampling_profile, support_fail_fraction, targeted_stage1, FixedPoint, Stage1,
    FIXED_POINT_MAX_ITERATIONS, FIXED_POINT_TOLERANCE,
};
pub use recursion::{
    stage_recursion, stage_recursion_with, CascadePrediction, Coupling, PredictedStage,
    RECURSION_MAX_STAGES, RECURSION_TOLERANCE,
};

#[derive(Debug, Error)]
pub enum NumericalError {
    #[error("{what} did not converge after {iterations} iterations (last = {last}, residual = {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        last: f64,
        residual: f64,
    },
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid survival profile: {0}")]
    InvalidProfile(String),
    #[error("no analytic model for {0} attacks")]
    UnsupportedAttack(crate::attacks::AttackKind),
    #[error("simulation failed: {0}")]
    Simulation(String),
}
