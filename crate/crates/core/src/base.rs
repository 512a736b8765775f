//! Period-1 Lipschitz base functions φ and their scaled increments on
//! b-adic grids.
//!
//! Grid evaluations never go through [`PeriodicBase::eval`]: the scaled
//! increment `b^m [φ((r+1) b^-m) - φ(r b^-m)]` is computed from the exact
//! integers `r` and `b^m`. For the tent map this is pure integer arithmetic;
//! for the trigonometric base it uses the product form of the difference
//! `φ(x+h) - φ(x) = 2 sin(πh) [ν cos(2πx+πh) - ρ sin(2πx+πh)]`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest admissible number of grid cells: `b^m` must stay below 2^63.
pub const CELL_CAP: u64 = 1 << 63;

/// `b^m`, or [`Error::Overflow`] once it reaches [`CELL_CAP`].
pub fn checked_cells(b: u64, m: u32) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..m {
        acc = match acc.checked_mul(b) {
            Some(v) if v < CELL_CAP => v,
            _ => return Err(Error::Overflow { b, level: m }),
        };
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PeriodicBase<T> {
    /// Distance to the nearest integer.
    Tent,
    /// `ν sin(2πt) + ρ cos(2πt)`.
    Trig { nu: T, rho: T },
}

impl<T: Real> PeriodicBase<T> {
    pub fn trig(nu: T, rho: T) -> Self {
        PeriodicBase::Trig { nu, rho }
    }

    pub fn is_tent(&self) -> bool {
        matches!(self, PeriodicBase::Tent)
    }

    /// `√(ν² + ρ²)` for the trigonometric base.
    pub fn amplitude(&self) -> Option<T> {
        match *self {
            PeriodicBase::Tent => None,
            PeriodicBase::Trig { nu, rho } => Some(nu.hypot(rho)),
        }
    }

    pub fn lipschitz_bound(&self) -> T {
        match *self {
            PeriodicBase::Tent => T::one(),
            PeriodicBase::Trig { nu, rho } => T::TAU() * nu.hypot(rho),
        }
    }

    pub fn sup_bound(&self) -> T {
        match *self {
            PeriodicBase::Tent => T::lit(0.5),
            PeriodicBase::Trig { nu, rho } => nu.hypot(rho),
        }
    }

    /// φ(t), with floor-based reduction modulo 1.
    pub fn eval(&self, t: T) -> T {
        let frac = t - t.floor();
        match *self {
            PeriodicBase::Tent => frac.min(T::one() - frac),
            PeriodicBase::Trig { nu, rho } => {
                let (s, c) = (T::TAU() * frac).sin_cos();
                nu * s + rho * c
            }
        }
    }

    /// `ψ_m(r b^-m) = b^m [φ((r+1) b^-m) - φ(r b^-m)]` for `0 <= r < b^m`.
    pub fn scaled_increment(&self, b: u64, m: u32, r: u64) -> Result<T> {
        if b < 2 {
            return Err(Error::Range(format!("base b = {b} must be at least 2")));
        }
        if m == 0 {
            return Err(Error::Range("level m must be at least 1".into()));
        }
        let cells = checked_cells(b, m)?;
        if r >= cells {
            return Err(Error::Range(format!("residue {r} outside [0, {cells})")));
        }
        Ok(self.grid_increment(cells, r))
    }

    /// Scaled increment on the grid of `cells` points; callers guarantee
    /// `r < cells`.
    #[inline]
    pub(crate) fn grid_increment(&self, cells: u64, r: u64) -> T {
        match *self {
            PeriodicBase::Tent => T::from_i64_lossy(tent_grid_increment(cells, r)),
            PeriodicBase::Trig { nu, rho } => trig_grid_increment(nu, rho, cells, r),
        }
    }

    /// Scaled increment at an arbitrary left endpoint `x` with step `h`,
    /// `[φ(x+h) - φ(x)] / h`. Used where the residue no longer fits 64 bits.
    pub fn increment_at(&self, x: T, h: T) -> T {
        match *self {
            PeriodicBase::Tent => {
                let (lo, hi) = (self.eval(x), self.eval(x + h));
                (hi - lo) / h
            }
            PeriodicBase::Trig { nu, rho } => {
                let theta = T::TAU() * (x - x.floor()) + T::PI() * h;
                let (s, c) = theta.sin_cos();
                T::lit(2.0) * sin_pi_over(h) * (nu * c - rho * s)
            }
        }
    }
}

/// `min(r+1, N-r-1) - min(r, N-r)`, always in {-1, 0, +1}.
#[inline]
pub fn tent_grid_increment(cells: u64, r: u64) -> i64 {
    let hi = (r + 1).min(cells - r - 1);
    let lo = r.min(cells - r);
    hi as i64 - lo as i64
}

#[inline]
fn trig_grid_increment<T: Real>(nu: T, rho: T, cells: u64, r: u64) -> T {
    // 2πx + πh with x = r/N, h = 1/N, i.e. π (2r+1) / N and 2r+1 < 2N.
    let n = T::from_u64_lossy(cells);
    let theta = T::PI() * (T::from_u64_lossy(2 * r + 1) / n);
    let (s, c) = theta.sin_cos();
    T::lit(2.0) * sin_pi_over(n.recip()) * (nu * c - rho * s)
}

/// `sin(πh) / h`, continuous at `h = 0` with value π.
#[inline]
pub(crate) fn sin_pi_over<T: Real>(h: T) -> T {
    let x = T::PI() * h;
    if h < T::lit(1e-4) {
        let x2 = x * x;
        T::PI() * (T::one() - x2 / T::lit(6.0) + x2 * x2 / T::lit(120.0))
    } else {
        x.sin() / h
    }
}
