//! Generating-function percolation: giant components under random and
//! degree-dependent node removal.

use super::distribution::{horner, horner_derivative, DegreeDistribution, GenFnSet};
use super::NumericalError;

pub const FIXED_POINT_TOLERANCE: f64 = 1e-12;
pub const FIXED_POINT_MAX_ITERATIONS: usize = 1_000_000;

/// Result of a fixed-point solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub u: f64,
    pub iterations: usize,
}

/// Smallest fixed point in `[0, 1]` of `h(u) = Σ c_k u^k`, where the
/// coefficients are non-negative and sum to 1 (so `h(1) = 1`).
///
/// `h` is convex and increasing, so a fixed point below 1 exists only when
/// `h'(1) > 1`; otherwise 1 is returned directly. Above threshold the
/// iteration starts at 0 and climbs monotonically. Each step takes the larger
/// of the plain update `h(u)` and a Newton step on `h(u) - u`; by convexity
/// neither overshoots the smallest root.
pub fn smallest_fixed_point(coefficients: &[f64]) -> Result<FixedPoint, NumericalError> {
    // Slack absorbs rounding in pmf normalisation at exactly critical inputs.
    if horner_derivative(coefficients, 1.0) <= 1.0 + 1e-12 {
        return Ok(FixedPoint {
            u: 1.0,
            iterations: 0,
        });
    }
    let mut u = 0.0_f64;
    for iteration in 1..=FIXED_POINT_MAX_ITERATIONS {
        let hu = horner(coefficients, u);
        let slope = horner_derivative(coefficients, u) - 1.0;
        let mut next = hu;
        if slope < 0.0 {
            next = next.max(u - (hu - u) / slope);
        }
        let next = next.min(1.0);
        if (next - u).abs() < FIXED_POINT_TOLERANCE {
            return Ok(FixedPoint {
                u: next,
                iterations: iteration,
            });
        }
        u = next;
    }
    Err(NumericalError::NonConvergence {
        what: "fixed point u = h(u)",
        iterations: FIXED_POINT_MAX_ITERATIONS,
        last: u,
        residual: (horner(coefficients, u) - u).abs(),
    })
}

fn check_fraction(name: &'static str, value: f64) -> Result<(), NumericalError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(NumericalError::OutOfRange { name, value })
    }
}

/// Probability `u` that an edge does not lead to the giant component when
/// each node is kept independently with probability `phi`:
/// the smallest root of `u = 1 - phi + phi g1(u)`.
pub fn solve_u(genfns: &GenFnSet, phi: f64) -> Result<f64, NumericalError> {
    check_fraction("phi", phi)?;
    let mut coefficients: Vec<f64> = genfns
        .excess_probabilities()
        .iter()
        .map(|q| phi * q)
        .collect();
    coefficients[0] += 1.0 - phi;
    Ok(smallest_fixed_point(&coefficients)?.u)
}

/// Giant-component fraction (relative to the original network) after
/// keeping each node with probability `phi`: `phi (1 - g0(u))`.
pub fn giant_random_removal(genfns: &GenFnSet, phi: f64) -> Result<f64, NumericalError> {
    let u = solve_u(genfns, phi)?;
    if u >= 1.0 {
        return Ok(0.0);
    }
    Ok((phi * (1.0 - genfns.g0(u))).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage1 {
    /// Giant fraction of the attacked network.
    pub mu: f64,
    pub u: f64,
}

/// Giant component after degree-dependent removal, using the survival
/// profile attached to `genfns` (no profile means nothing is removed):
/// `u = 1 - f1(1) + f1(u)` and `mu = f0(1) - f0(u)`.
pub fn targeted_stage1(genfns: &GenFnSet) -> Result<Stage1, NumericalError> {
    let mut coefficients = genfns.f1_coefficients();
    let f1_at_one: f64 = coefficients.iter().sum();
    coefficients[0] += 1.0 - f1_at_one;
    let u = smallest_fixed_point(&coefficients)?.u;
    let f0 = genfns.f0_coefficients();
    let mu = if u >= 1.0 {
        0.0
    } else {
        (horner(&f0, 1.0) - horner(&f0, u)).clamp(0.0, 1.0)
    };
    Ok(Stage1 { mu, u })
}

/// Fraction of nodes that lose every supporter when each supporter on the
/// other side is functional with probability `mu_other`:
/// `Σ P̃(k) (1 - mu_other)^k`.
pub fn support_fail_fraction(
    support: &DegreeDistribution,
    mu_other: f64,
) -> Result<f64, NumericalError> {
    check_fraction("mu_other", mu_other)?;
    Ok(horner(support.pmf(), 1.0 - mu_other))
}

/// Survival profile of a degree-proportional attack on `attacked` nodes,
/// `φ_k = 1 - x k / (2m)` clipped to `[0, 1]`, for degrees `0..=max_degree`.
pub fn linear_targeted_profile(max_degree: usize, attacked: usize, edge_count: usize) -> Vec<f64> {
    if edge_count == 0 {
        return vec![1.0; max_degree + 1];
    }
    let rate = attacked as f64 / (2.0 * edge_count as f64);
    (0..=max_degree)
        .map(|k| (1.0 - rate * k as f64).clamp(0.0, 1.0))
        .collect()
}

/// Survival profile of sequential degree-weighted sampling without
/// replacement, `φ_k = exp(-k t)`, with `t` chosen so that the expected
/// number removed from `node_count` nodes is `attacked`.
///
/// Degree-zero nodes are never hit by this profile; if the attack exceeds
/// the number of nodes with positive degree, those all go (`φ_k = 0` for
/// `k ≥ 1`) and the remainder is taken uniformly from degree zero.
pub fn successive_sampling_profile(
    dist: &DegreeDistribution,
    node_count: usize,
    attacked: usize,
) -> Result<Vec<f64>, NumericalError> {
    let len = dist.max_degree() + 1;
    if node_count == 0 || attacked == 0 {
        return Ok(vec![1.0; len]);
    }
    let target = (attacked as f64 / node_count as f64).min(1.0);
    let isolated = dist.probability(0);
    if target >= 1.0 - isolated {
        let mut profile = vec![0.0; len];
        profile[0] = if isolated > 0.0 {
            (1.0 - (target - (1.0 - isolated)) / isolated).clamp(0.0, 1.0)
        } else {
            0.0
        };
        return Ok(profile);
    }
    let removed = |t: f64| -> f64 {
        dist.pmf()
            .iter()
            .enumerate()
            .map(|(k, p)| p * -(-(k as f64) * t).exp_m1())
            .sum()
    };
    let mut hi = 1.0;
    while removed(hi) < target {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(NumericalError::NonConvergence {
                what: "successive sampling rate",
                iterations: 0,
                last: hi,
                residual: target - removed(hi),
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if removed(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let t = 0.5 * (lo + hi);
    Ok((0..len).map(|k| (-(k as f64) * t).exp()).collect())
}

/// Constant profile for `attacked` of `node_count` nodes removed uniformly.
pub fn random_profile(attacked: usize, node_count: usize) -> Vec<f64> {
    vec![(1.0 - attacked as f64 / node_count as f64).clamp(0.0, 1.0)]
}
