//! CLT diagnostics: the scaled Φ-expectation `b^n E[Φ(b^-n |Z_n|)]`, moment
//! summaries of ensembles and checks of empirical transition frequencies.

use num_traits::ToPrimitive;

use crate::engine::FractalSpec;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;
use crate::summation::CompensatedSum;
use crate::variation::{phi_variation, PhiFunction};

use super::chain::{transition_matrix, Rational};
use super::paths::{sample_ensemble, Ensemble};
use super::stats::{ks_normal, limiting_variance, mean_variance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CltMode {
    /// Enumerate all `b^n` digit strings.
    Exhaustive,
    MonteCarlo {
        count: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltEstimate<T> {
    pub value: T,
    /// Monte Carlo standard error; `None` for exhaustive enumeration.
    pub std_error: Option<T>,
    pub samples: u64,
}

/// `b^n E[Φ(b^-n |Z_n|)]` over uniformly distributed digits.
pub fn clt_scaled_expectation<T: Real>(spec: &FractalSpec<T>, n: u32, mode: CltMode) -> Result<CltEstimate<T>> {
    if !spec.is_critical() {
        return Err(Error::Mode);
    }
    match mode {
        CltMode::Exhaustive => {
            let value = phi_variation(spec, n, T::one())?;
            Ok(CltEstimate { value, std_error: None, samples: spec.cells(n)? })
        }
        CltMode::MonteCarlo { count, seed } => {
            let ens = sample_ensemble(spec, n, count, seed)?;
            scaled_phi_mean(spec, &ens)
        }
    }
}

/// Sample mean of `|Z_n| / √(n ln b - ln |Z_n|)` with its standard error.
pub fn scaled_phi_mean<T: Real>(spec: &FractalSpec<T>, ens: &Ensemble<T>) -> Result<CltEstimate<T>> {
    let lc = T::from_u64_lossy(u64::from(ens.n)) * T::from_u64_lossy(spec.b).ln();
    let mut terms = Vec::with_capacity(ens.endpoints.len());
    for (index, z) in ens.endpoints.iter().enumerate() {
        let s = z.abs();
        if s == T::zero() {
            terms.push(T::zero());
        } else if s.ln() >= lc {
            return Err(Error::PhiDomain { level: ens.n, cell: index as u64, magnitude: (s.ln() - lc).exp().as_f64() });
        } else {
            terms.push(PhiFunction::scaled(s, lc));
        }
    }
    let count = T::from_u64_lossy(ens.count());
    let mean = CompensatedSum::sum_iter(terms.iter().copied()) / count;
    let var = if terms.len() > 1 {
        CompensatedSum::sum_iter(terms.iter().map(|&x| (x - mean) * (x - mean))) / (count - T::one())
    } else {
        T::zero()
    };
    Ok(CltEstimate { value: mean, std_error: Some((var / count).sqrt()), samples: ens.count() })
}

/// Empirical one-step frequencies against the exact transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionCheck {
    /// Row-normalized counts; `None` for states never left.
    pub frequencies: [[Option<f64>; 3]; 3],
    /// Largest `|freq - p| / √(p(1-p)/N_i)` over entries with `0 < p < 1`.
    pub max_abs_z: f64,
    /// Whether every entry with `p ∈ {0, 1}` is matched exactly.
    pub degenerate_entries_exact: bool,
}

pub fn transition_check(counts: &[[u64; 3]; 3], p: &Matrix<Rational>) -> TransitionCheck {
    let mut frequencies = [[None; 3]; 3];
    let mut max_abs_z = 0.0f64;
    let mut exact = true;
    for i in 0..3 {
        let total: u64 = counts[i].iter().sum();
        if total == 0 {
            continue;
        }
        for j in 0..3 {
            let freq = counts[i][j] as f64 / total as f64;
            frequencies[i][j] = Some(freq);
            let pij = p.get(i, j).to_f64().unwrap_or(f64::NAN);
            if pij <= 0.0 || pij >= 1.0 {
                exact &= freq == pij;
            } else {
                let se = (pij * (1.0 - pij) / total as f64).sqrt();
                max_abs_z = max_abs_z.max((freq - pij).abs() / se);
            }
        }
    }
    TransitionCheck { frequencies, max_abs_z, degenerate_entries_exact: exact }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub n: u32,
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    /// `(1/n) · mean of Z_n²`.
    pub second_moment_per_step: f64,
    /// Limiting variance σ² of `Z_n / √n`.
    pub sigma2: f64,
    /// KS distance of `Z_n / √n` to `N(0, σ²)`.
    pub ks_normal: f64,
    pub scaled_phi: f64,
    pub scaled_phi_std_error: f64,
    /// Tent map with odd b only.
    pub transitions: Option<TransitionCheck>,
}

pub fn ensemble_stats<T: Real>(spec: &FractalSpec<T>, ens: &Ensemble<T>) -> Result<EnsembleStats> {
    let zs: Vec<f64> = ens.endpoints.iter().map(|z| z.as_f64()).collect();
    let n = f64::from(ens.n.max(1));
    let (mean, variance) = mean_variance(&zs);
    let second = zs.iter().map(|z| z * z).sum::<f64>() / zs.len() as f64 / n;
    let sigma2 = limiting_variance(spec);
    let normalized: Vec<f64> = zs.iter().map(|z| z / n.sqrt()).collect();
    let phi = scaled_phi_mean(spec, ens)?;
    let transitions = match (&ens.transitions, spec.b % 2) {
        (Some(counts), 1) => Some(transition_check(counts, &transition_matrix(spec.b, spec.sign)?)),
        _ => None,
    };
    Ok(EnsembleStats {
        n: ens.n,
        count: ens.count(),
        mean,
        variance,
        second_moment_per_step: second,
        sigma2,
        ks_normal: ks_normal(&normalized, sigma2),
        scaled_phi: phi.value.as_f64(),
        scaled_phi_std_error: phi.std_error.map_or(f64::NAN, |s| s.as_f64()),
        transitions,
    })
}
