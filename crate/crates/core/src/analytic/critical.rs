use serde::{Deserialize, Serialize};

use super::percolation::{linear_targeted_profile, random_profile, successive_sampling_profile};
use super::recursion::{stage_recursion_with, CascadePrediction, Coupling};
use super::{GenFnSet, NumericalError};
use crate::attacks::{sample_attack, AttackKind, AttackSpec};
use crate::cascade::{run_cascade, CascadeOptions};
use crate::netgen::InterdependentGrid;

/// Steady comm fraction below which the grid counts as disintegrated.
pub const CRITICAL_MU: f64 = 0.01;

/// Survival profile used for targeted attacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetedProfile {
    /// `φ_k = 1 - x k / (2m)`, clipped.
    #[default]
    Linear,
    /// `φ_k = exp(-k t)`, matching the sampler's draw without replacement.
    SuccessiveSampling,
}

/// Choices made when turning a grid and an attack into stage equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyticModel {
    pub coupling: Coupling,
    pub profile: TargetedProfile,
}

impl AnalyticModel {
    /// Conditional coupling with the successive-sampling profile.
    pub fn refined() -> Self {
        AnalyticModel {
            coupling: Coupling::Conditional,
            profile: TargetedProfile::SuccessiveSampling,
        }
    }
}

/// Steady-state prediction for attacking `x` comm nodes of `grid`, using the
/// grid's empirical degree and support distributions and the default
/// [`AnalyticModel`].
pub fn predict(
    grid: &InterdependentGrid,
    kind: AttackKind,
    x: usize,
) -> Result<CascadePrediction, NumericalError> {
    predict_with(grid, kind, x, AnalyticModel::default())
}

pub fn predict_with(
    grid: &InterdependentGrid,
    kind: AttackKind,
    x: usize,
    model: AnalyticModel,
) -> Result<CascadePrediction, NumericalError> {
    let comm_dist = grid
        .comm()
        .degree_distribution()
        .map_err(|e| NumericalError::InvalidDistribution(e.to_string()))?;
    let power_dist = grid
        .power()
        .degree_distribution()
        .map_err(|e| NumericalError::InvalidDistribution(e.to_string()))?;
    let n_a = grid.comm().node_count();
    let profile = match (kind, model.profile) {
        (AttackKind::Random, _) => random_profile(x, n_a),
        (AttackKind::Targeted, TargetedProfile::Linear) => {
            linear_targeted_profile(comm_dist.max_degree(), x, grid.comm().edge_count())
        }
        (AttackKind::Targeted, TargetedProfile::SuccessiveSampling) => {
            successive_sampling_profile(&comm_dist, n_a, x)?
        }
        (AttackKind::Mixed, _) => return Err(NumericalError::UnsupportedAttack(kind)),
    };
    let comm = GenFnSet::new(&comm_dist).with_survival(profile)?;
    let power = GenFnSet::new(&power_dist);
    stage_recursion_with(
        &comm,
        &power,
        &grid.support_degree_distribution(),
        model.coupling,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalMethod {
    /// Bisection over the stage recursion.
    Recursion(AnalyticModel),
    /// Bisection over the mean of simulated cascades.
    Simulation { replications: usize, seed: u64 },
}

/// Smallest attack size `x` in `0..=n_A` whose steady comm fraction falls
/// below [`CRITICAL_MU`]. Assumes the steady fraction is non-increasing in
/// `x`; attacking every node always qualifies.
pub fn critical_attack_size(
    grid: &InterdependentGrid,
    kind: AttackKind,
    method: CriticalMethod,
) -> Result<usize, NumericalError> {
    let n_a = grid.comm().node_count();
    let steady_mu = |x: usize| -> Result<f64, NumericalError> {
        match method {
            CriticalMethod::Recursion(model) => Ok(predict_with(grid, kind, x, model)?.steady_mu_a),
            CriticalMethod::Simulation { replications, seed } => {
                let mut total = 0.0;
                for rep in 0..replications {
                    let mut run = grid.clone();
                    let spec = AttackSpec::new(kind, x, seed.wrapping_add(rep as u64));
                    let attack = sample_attack(run.comm(), &spec)
                        .map_err(|e| NumericalError::Simulation(e.to_string()))?;
                    let trace = run_cascade(&mut run, &attack.attacked, CascadeOptions::default())
                        .map_err(|e| NumericalError::Simulation(e.to_string()))?;
                    total += trace.final_mu_a;
                }
                Ok(total / replications.max(1) as f64)
            }
        }
    };
    if steady_mu(0)? < CRITICAL_MU {
        return Ok(0);
    }
    // Invariant: mu(lo) >= threshold, mu(hi) < threshold.
    let (mut lo, mut hi) = (0, n_a);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if steady_mu(mid)? < CRITICAL_MU {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
