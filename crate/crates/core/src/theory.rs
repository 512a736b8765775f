//! Closed-form Φ-variation limits and the power-variation index.

use crate::base::PeriodicBase;
use crate::engine::{AlphaMode, FractalSpec};
use crate::error::{Error, Result};
use crate::scalar::{Real, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaId {
    TakagiEven,
    TakagiOdd,
    Weierstrass,
    CltGeneric,
}

impl FormulaId {
    pub fn name(self) -> &'static str {
        match self {
            FormulaId::TakagiEven => "TakagiEven",
            FormulaId::TakagiOdd => "TakagiOdd",
            FormulaId::Weierstrass => "Weierstrass",
            FormulaId::CltGeneric => "CltGeneric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitResult<T> {
    pub value: T,
    pub formula_id: FormulaId,
    /// Variance of the limiting normal law of `Z_n / √n`.
    pub sigma2: T,
}

/// `√(2σ² / (π ln b))`, the limit of `b^n E[Φ(b^-n |Z_n|)]` when
/// `Z_n / √n` is asymptotically `N(0, σ²)`.
pub fn clt_constant<T: Real>(sigma2: T, b: u64) -> Result<T> {
    if !(sigma2 > T::zero()) {
        return Err(Error::Range(format!("σ² = {sigma2} must be positive")));
    }
    if b < 2 {
        return Err(Error::Range(format!("base b = {b} must be at least 2")));
    }
    let lb = T::from_u64_lossy(b).ln();
    Ok((T::lit(2.0) * sigma2 / (T::PI() * lb)).sqrt())
}

/// Asymptotic variance of the digit sums for each family: 1 for the tent
/// map with even b, `(b ± 1)/(b ∓ 1)` for odd b, `2π²(ν² + ρ²)` for the
/// trigonometric base.
pub fn family_sigma2<T: Real>(spec: &FractalSpec<T>) -> T {
    match spec.base {
        PeriodicBase::Tent if spec.b.is_multiple_of(2) => T::one(),
        PeriodicBase::Tent => odd_sigma2(spec.b, spec.sign),
        PeriodicBase::Trig { nu, rho } => T::lit(2.0) * T::PI() * T::PI() * (nu * nu + rho * rho),
    }
}

/// `⟨f⟩^Φ_t` for the critical tent and trigonometric families.
pub fn phi_limit<T: Real>(spec: &FractalSpec<T>, t: T) -> Result<LimitResult<T>> {
    if !spec.is_critical() {
        return Err(Error::Mode);
    }
    if !(t >= T::zero() && t <= T::one()) {
        return Err(Error::Range(format!("t = {t} outside [0, 1]")));
    }
    let two = T::lit(2.0);
    let pi = T::PI();
    let lb = T::from_u64_lossy(spec.b).ln();
    let sigma2 = family_sigma2(spec);
    let (unit, formula_id) = match spec.base {
        PeriodicBase::Tent if spec.b.is_multiple_of(2) => ((two / (pi * lb)).sqrt(), FormulaId::TakagiEven),
        PeriodicBase::Tent => {
            let b = T::from_u64_lossy(spec.b);
            let s = spec.sign.to_real::<T>();
            ((two * (b + s) / (pi * (b - s) * lb)).sqrt(), FormulaId::TakagiOdd)
        }
        PeriodicBase::Trig { nu, rho } => (two * (pi * (nu * nu + rho * rho) / lb).sqrt(), FormulaId::Weierstrass),
    };
    Ok(LimitResult { value: t * unit, formula_id, sigma2 })
}

/// Behaviour of the q-th variation along b-adic partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QLimit {
    Zero,
    Finite,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VariationIndex<T> {
    /// `|α| < 1/b`.
    BoundedVariation,
    /// `|α| = 1/b`: index 1, q-variation vanishes for every q > 1 and the
    /// Φ-variation is the nondegenerate gauge.
    Critical,
    /// `|α| > 1/b`: nontrivial linear p-th variation with `p = -ln b / ln |α|`.
    Rough { p: T },
}

impl<T: Real> VariationIndex<T> {
    pub fn p(&self) -> Option<T> {
        match *self {
            VariationIndex::BoundedVariation => None,
            VariationIndex::Critical => Some(T::one()),
            VariationIndex::Rough { p } => Some(p),
        }
    }

    /// Limit class of `⟨f⟩^(q)`; `None` where no statement is available.
    pub fn classify_q(&self, q: T) -> Option<QLimit> {
        match *self {
            VariationIndex::BoundedVariation if q > T::one() => Some(QLimit::Zero),
            VariationIndex::BoundedVariation if q == T::one() => Some(QLimit::Finite),
            VariationIndex::BoundedVariation => None,
            VariationIndex::Critical if q > T::one() => Some(QLimit::Zero),
            VariationIndex::Critical => Some(QLimit::Infinite),
            VariationIndex::Rough { p } if q > p => Some(QLimit::Zero),
            VariationIndex::Rough { p } if q == p => Some(QLimit::Finite),
            VariationIndex::Rough { .. } => Some(QLimit::Infinite),
        }
    }
}

pub fn variation_index<T: Real>(spec: &FractalSpec<T>) -> VariationIndex<T> {
    match spec.mode {
        AlphaMode::Critical => VariationIndex::Critical,
        AlphaMode::General(mag) => {
            let scaled = mag * T::from_u64_lossy(spec.b);
            if scaled > T::one() {
                VariationIndex::Rough { p: -T::from_u64_lossy(spec.b).ln() / mag.ln() }
            } else if scaled < T::one() {
                VariationIndex::BoundedVariation
            } else {
                VariationIndex::Critical
            }
        }
    }
}

/// `(b + s) / (b - s)` for `s = sgn(α)`.
fn odd_sigma2<T: Real>(b: u64, sign: Sign) -> T {
    let b = T::from_u64_lossy(b);
    let s = sign.to_real::<T>();
    (b + s) / (b - s)
}
