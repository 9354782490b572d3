//! Mean-field stage recursion for the coupled comm/power cascade.
//!
//! Odd stages act on the communication network, even stages on the power
//! network. Every stage is evaluated against the original networks: the
//! comm side at stage `2n-1` keeps a node with probability
//! `φ_k (1 - r_A)` (attack survival times "supporter still functional"),
//! the power side at stage `2n` keeps a node with probability `1 - r_B`.

use serde::Serialize;

use super::distribution::{horner, DegreeDistribution, GenFnSet};
use super::percolation::{smallest_fixed_point, solve_u, support_fail_fraction};
use super::NumericalError;
use crate::Side;

pub const RECURSION_TOLERANCE: f64 = 1e-10;
pub const RECURSION_MAX_STAGES: usize = 10_000;

/// One evaluated stage of the recursion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictedStage {
    pub stage: usize,
    pub side: Side,
    /// Functional (giant) fraction of the side, relative to its original size.
    pub mu: f64,
    /// Fraction removed for lack of support at this stage.
    pub removed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadePrediction {
    pub stages: Vec<PredictedStage>,
    pub steady_mu_a: f64,
    pub steady_mu_b: f64,
    pub iterations: usize,
}

/// How power-side losses feed back into the comm side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    /// `r_A = 1 - μ_B`: every power node outside the giant, including those
    /// that failed only because all their supporters were already dead, is
    /// charged again to the comm side as a fresh random removal.
    #[default]
    Literal,
    /// Only supported power nodes outside the power giant remove comm
    /// nodes; a power node that lost all its supporters removes nothing new
    /// on the comm side. Power-side support failure is computed from the
    /// comm giant fraction among nodes whose supporter is still in place.
    Conditional,
}

/// Iterates the stage equations to steady state with [`Coupling::Literal`].
///
/// * `comm` carries the attack survival profile `φ_k` (none = no attack).
/// * `power` is the power network's degree distribution.
/// * `power_support` is the distribution of supporters per power node.
///
/// Each comm node has exactly one supporter, so `r_A = 1 - μ_B`.
pub fn stage_recursion(
    comm: &GenFnSet,
    power: &GenFnSet,
    power_support: &DegreeDistribution,
) -> Result<CascadePrediction, NumericalError> {
    stage_recursion_with(comm, power, power_support, Coupling::Literal)
}

pub fn stage_recursion_with(
    comm: &GenFnSet,
    power: &GenFnSet,
    power_support: &DegreeDistribution,
    coupling: Coupling,
) -> Result<CascadePrediction, NumericalError> {
    let f0 = comm.f0_coefficients();
    let f1 = comm.f1_coefficients();
    let f0_at_one: f64 = f0.iter().sum();
    let f1_at_one: f64 = f1.iter().sum();

    let mut stages = Vec::new();
    let mut removed_a = 0.0_f64;
    let mut previous: Option<(f64, f64)> = None;
    let mut mu_a = 0.0;

    for round in 1..=RECURSION_MAX_STAGES / 2 {
        let keep = 1.0 - removed_a;
        let mut coefficients: Vec<f64> = f1.iter().map(|c| keep * c).collect();
        coefficients[0] += 1.0 - keep * f1_at_one;
        let u = smallest_fixed_point(&coefficients)?.u;
        mu_a = (keep * (f0_at_one - horner(&f0, u))).clamp(0.0, 1.0);
        stages.push(PredictedStage {
            stage: 2 * round - 1,
            side: Side::Comm,
            mu: mu_a,
            removed: removed_a,
        });

        let removed_b = match coupling {
            Coupling::Literal => support_fail_fraction(power_support, mu_a)?,
            Coupling::Conditional => {
                // A comm node whose supporter was not pruned is in the comm
                // giant with probability mu_a / keep.
                let alive = if keep > 0.0 {
                    (mu_a / keep).min(1.0)
                } else {
                    0.0
                };
                support_fail_fraction(power_support, alive)?
            }
        };
        let removed_b = removed_b.clamp(0.0, 1.0);
        let phi_b = 1.0 - removed_b;
        let u = solve_u(power, phi_b)?;
        let mu_b = (phi_b * (1.0 - power.g0(u))).clamp(0.0, 1.0);
        stages.push(PredictedStage {
            stage: 2 * round,
            side: Side::Power,
            mu: mu_b,
            removed: removed_b,
        });

        if let Some((prev_a, prev_b)) = previous {
            if (prev_a - mu_a).abs() < RECURSION_TOLERANCE
                && (prev_b - mu_b).abs() < RECURSION_TOLERANCE
            {
                return Ok(CascadePrediction {
                    iterations: stages.len(),
                    stages,
                    steady_mu_a: mu_a,
                    steady_mu_b: mu_b,
                });
            }
        }
        previous = Some((mu_a, mu_b));
        removed_a = match coupling {
            Coupling::Literal => 1.0 - mu_b,
            // Supported power nodes outside the power giant.
            Coupling::Conditional if phi_b > 0.0 => (1.0 - mu_b / phi_b).clamp(0.0, 1.0),
            Coupling::Conditional => 1.0,
        };
    }
    Err(NumericalError::NonConvergence {
        what: "stage recursion",
        iterations: stages.len(),
        last: mu_a,
        residual: previous.map_or(f64::NAN, |(a, _)| (a - mu_a).abs()),
    })
}
