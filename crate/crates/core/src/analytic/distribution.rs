use std::io::Read;

use serde::{Deserialize, Serialize};

use super::NumericalError;

/// Probability mass function over non-negative integer degrees.
///
/// Stored densely, `pmf[k] = P(k)`, with trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    pmf: Vec<f64>,
    mean: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct PmfRow {
    k: usize,
    probability: f64,
}

impl DegreeDistribution {
    /// Builds from a probability vector. Entries must be finite and
    /// non-negative and sum to 1 within `1e-9`; the vector is then
    /// renormalised exactly.
    pub fn from_pmf(mut pmf: Vec<f64>) -> Result<Self, NumericalError> {
        if let Some((k, &p)) = pmf
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(NumericalError::InvalidDistribution(format!(
                "P({k}) = {p} is not a probability"
            )));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(NumericalError::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        pmf.iter_mut().for_each(|p| *p /= total);
        Ok(Self::from_normalized(pmf))
    }

    fn from_normalized(mut pmf: Vec<f64>) -> Self {
        while pmf.len() > 1 && pmf.last() == Some(&0.0) {
            pmf.pop();
        }
        let mean = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        DegreeDistribution { pmf, mean }
    }

    /// `counts[k]` nodes of degree `k`. Panics if every count is zero.
    pub fn from_counts(counts: &[usize]) -> Self {
        let total: usize = counts.iter().sum();
        assert!(total > 0, "degree counts must not all be zero");
        let pmf = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Self::from_normalized(pmf)
    }

    /// Empirical distribution of a degree sample. Panics on an empty sample.
    pub fn from_degrees<I: IntoIterator<Item = usize>>(degrees: I) -> Self {
        let mut counts: Vec<usize> = Vec::new();
        for k in degrees {
            if k >= counts.len() {
                counts.resize(k + 1, 0);
            }
            counts[k] += 1;
        }
        Self::from_counts(&counts)
    }

    pub fn point_mass(k: usize) -> Self {
        let mut pmf = vec![0.0; k + 1];
        pmf[k] = 1.0;
        Self::from_normalized(pmf)
    }

    /// Poisson(mean) truncated where the remaining tail drops below 1e-16,
    /// then renormalised.
    pub fn poisson(mean: f64) -> Self {
        assert!(mean >= 0.0 && mean.is_finite());
        let mut pmf = vec![(-mean).exp()];
        let mut k = 0usize;
        let mut acc = pmf[0];
        while 1.0 - acc > 1e-16 && (k as f64) < mean + 50.0 + 20.0 * mean.sqrt() {
            k += 1;
            let next = pmf[k - 1] * mean / k as f64;
            pmf.push(next);
            acc += next;
        }
        let total: f64 = pmf.iter().sum();
        pmf.iter_mut().for_each(|p| *p /= total);
        Self::from_normalized(pmf)
    }

    /// Binomial(trials, p), computed by the ratio recurrence in log space so
    /// large trial counts do not underflow the leading terms.
    pub fn binomial(trials: usize, p: f64) -> Self {
        assert!((0.0..=1.0).contains(&p));
        if p == 0.0 {
            return Self::point_mass(0);
        }
        if p == 1.0 {
            return Self::point_mass(trials);
        }
        let ln_ratio = (p / (1.0 - p)).ln();
        let mut ln_term = trials as f64 * (1.0 - p).ln();
        let mut pmf = Vec::with_capacity(trials + 1);
        pmf.push(ln_term.exp());
        for k in 0..trials {
            ln_term += ((trials - k) as f64 / (k + 1) as f64).ln() + ln_ratio;
            pmf.push(ln_term.exp());
        }
        let total: f64 = pmf.iter().sum();
        pmf.iter_mut().for_each(|p| *p /= total);
        Self::from_normalized(pmf)
    }

    /// Truncated power law `P(k) ∝ k^(-alpha)` on `min_degree..=max_degree`.
    pub fn power_law(alpha: f64, min_degree: usize, max_degree: usize) -> Self {
        assert!(min_degree >= 1 && min_degree <= max_degree);
        let mut pmf = vec![0.0; max_degree + 1];
        for (k, p) in pmf.iter_mut().enumerate().skip(min_degree) {
            *p = (k as f64).powf(-alpha);
        }
        let total: f64 = pmf.iter().sum();
        pmf.iter_mut().for_each(|p| *p /= total);
        Self::from_normalized(pmf)
    }

    pub fn probability(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn mean_degree(&self) -> f64 {
        self.mean
    }

    pub fn max_degree(&self) -> usize {
        self.pmf.len() - 1
    }

    /// Second factorial moment `<k(k-1)>`.
    pub fn second_factorial_moment(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(k, p)| (k * k.saturating_sub(1)) as f64 * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let m2: f64 = self
            .pmf
            .iter()
            .enumerate()
            .map(|(k, p)| (k * k) as f64 * p)
            .sum();
        m2 - self.mean * self.mean
    }

    /// Total-variation distance `0.5 * Σ |P(k) - Q(k)|`.
    pub fn total_variation(&self, other: &DegreeDistribution) -> f64 {
        let len = self.pmf.len().max(other.pmf.len());
        0.5 * (0..len)
            .map(|k| (self.probability(k) - other.probability(k)).abs())
            .sum::<f64>()
    }

    /// Reads `k,probability` rows (with header).
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, NumericalError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut pmf = Vec::new();
        for row in rdr.deserialize::<PmfRow>() {
            let row = row.map_err(|e| NumericalError::InvalidDistribution(e.to_string()))?;
            if row.k >= pmf.len() {
                pmf.resize(row.k + 1, 0.0);
            }
            pmf[row.k] += row.probability;
        }
        if pmf.is_empty() {
            return Err(NumericalError::InvalidDistribution("no rows".into()));
        }
        Self::from_pmf(pmf)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,probability\n");
        for (k, p) in self.pmf.iter().enumerate().filter(|(_, p)| **p > 0.0) {
            out.push_str(&format!("{k},{p}\n"));
        }
        out
    }
}

/// Generating functions of a degree distribution and, optionally, of a
/// per-degree survival profile `φ_k` (probability a degree-k node is kept).
///
/// * `g0(z) = Σ P(k) z^k`
/// * `g1(z) = Σ q_k z^k` with excess-degree weights `q_k = (k+1) P(k+1) / <k>`
/// * `f0(z) = Σ P(k) φ_k z^k`
/// * `f1(z) = Σ q_k φ_{k+1} z^k`
#[derive(Debug, Clone)]
pub struct GenFnSet {
    pmf: Vec<f64>,
    excess: Vec<f64>,
    mean: f64,
    survival: Option<Vec<f64>>,
}

impl GenFnSet {
    pub fn new(dist: &DegreeDistribution) -> Self {
        let pmf = dist.pmf().to_vec();
        let mean = dist.mean_degree();
        let excess = if mean > 0.0 {
            (1..pmf.len()).map(|k| k as f64 * pmf[k] / mean).collect()
        } else {
            // Edgeless: nothing to follow, so treat every branch as a dead end.
            vec![1.0]
        };
        GenFnSet {
            pmf,
            excess,
            mean,
            survival: None,
        }
    }

    /// Attaches a survival profile. `phi[k]` applies to degree `k`; degrees
    /// past the end of `phi` reuse its last entry.
    pub fn with_survival(mut self, phi: Vec<f64>) -> Result<Self, NumericalError> {
        if phi.is_empty() {
            return Err(NumericalError::InvalidProfile("empty profile".into()));
        }
        if let Some((k, p)) = phi
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(NumericalError::InvalidProfile(format!("phi[{k}] = {p}")));
        }
        self.survival = Some(phi);
        Ok(self)
    }

    /// Constant survival profile `φ_k ≡ phi`.
    pub fn with_constant_survival(self, phi: f64) -> Result<Self, NumericalError> {
        self.with_survival(vec![phi])
    }

    pub fn mean_degree(&self) -> f64 {
        self.mean
    }

    pub fn degree_probabilities(&self) -> &[f64] {
        &self.pmf
    }

    pub fn excess_probabilities(&self) -> &[f64] {
        &self.excess
    }

    /// Survival probability of a degree-k node (1 without a profile).
    pub fn phi(&self, k: usize) -> f64 {
        match &self.survival {
            None => 1.0,
            Some(phi) => phi.get(k).copied().unwrap_or(*phi.last().unwrap()),
        }
    }

    pub fn has_profile(&self) -> bool {
        self.survival.is_some()
    }

    pub fn g0(&self, z: f64) -> f64 {
        horner(&self.pmf, z)
    }

    pub fn g0_prime(&self, z: f64) -> f64 {
        horner_derivative(&self.pmf, z)
    }

    pub fn g1(&self, z: f64) -> f64 {
        horner(&self.excess, z)
    }

    /// `g1'(1) = <k(k-1)> / <k>`, the mean excess degree.
    pub fn g1_prime(&self, z: f64) -> f64 {
        horner_derivative(&self.excess, z)
    }

    /// Coefficients of `f0`.
    pub fn f0_coefficients(&self) -> Vec<f64> {
        self.pmf
            .iter()
            .enumerate()
            .map(|(k, p)| p * self.phi(k))
            .collect()
    }

    /// Coefficients of `f1`.
    pub fn f1_coefficients(&self) -> Vec<f64> {
        self.excess
            .iter()
            .enumerate()
            .map(|(k, q)| q * self.phi(k + 1))
            .collect()
    }

    pub fn f0(&self, z: f64) -> f64 {
        horner(&self.f0_coefficients(), z)
    }

    pub fn f0_prime(&self, z: f64) -> f64 {
        horner_derivative(&self.f0_coefficients(), z)
    }

    pub fn f1(&self, z: f64) -> f64 {
        horner(&self.f1_coefficients(), z)
    }
}

pub(crate) fn horner(coefficients: &[f64], z: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

pub(crate) fn horner_derivative(coefficients: &[f64], z: f64) -> f64 {
    coefficients
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, &c)| acc * z + k as f64 * c)
}
