//! Conditional structure of the increments given earlier digits.

use crate::base::checked_cells;
use crate::engine::FractalSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::summation::CompensatedSum;

use super::paths::{DigitCursor, PathSample};

/// `E[Y_n | R_{n-1} = r]`, averaging `Y_n` over the `b` values of `U_n`.
/// Vanishes identically for the trigonometric base.
pub fn martingale_residual<T: Real>(spec: &FractalSpec<T>, n: u32, r: u64) -> Result<T> {
    if !spec.is_critical() {
        return Err(Error::Mode);
    }
    if n == 0 {
        return Err(Error::Range("level n must be at least 1".into()));
    }
    let prev = checked_cells(spec.b, n - 1)?;
    if r >= prev {
        return Err(Error::Range(format!("residue {r} outside [0, {prev})")));
    }
    let cells = checked_cells(spec.b, n)?;
    let mut acc = CompensatedSum::new();
    for u in 0..spec.b {
        acc.add(spec.base.grid_increment(cells, r + u * prev));
    }
    let mean = acc.value() / T::from_u64_lossy(spec.b);
    Ok(if spec.sign.pow(n) < 0 { -mean } else { mean })
}

/// `⟨Z⟩_1..⟨Z⟩_n` along the path, where
/// `E[Y_k² | F_{k-1}] = (1/b) Σ_ℓ ψ_k(b^-k R_{k-1} + ℓ/b)²`.
pub fn predictable_qv<T: Real>(spec: &FractalSpec<T>, path: &PathSample<T>) -> Result<Vec<T>> {
    if !spec.is_critical() {
        return Err(Error::Mode);
    }
    if spec.base.is_tent() {
        return Err(Error::Base);
    }
    let bf = T::from_u64_lossy(spec.b);
    let mut cursor = DigitCursor::<T>::new(spec.b);
    let mut total = CompensatedSum::new();
    let mut out = Vec::with_capacity(path.digits.len());
    for &d in &path.digits {
        let mut cond = CompensatedSum::new();
        for l in 0..spec.b {
            let mut next = cursor;
            next.advance(l);
            let psi = next.increment(&spec.base);
            cond.add(psi * psi);
        }
        total.add(cond.value() / bf);
        out.push(total.value());
        cursor.advance(u64::from(d));
    }
    Ok(out)
}
