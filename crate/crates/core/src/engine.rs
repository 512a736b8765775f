//! Evaluation of `f(t) = Σ α^m φ(b^m t)` and exact level-n increments.
//!
//! On the b-adic grid the tail `m >= n` of the series cancels by
//! periodicity, so the increment over cell `k` of level `n` is the finite sum
//! `b^-n sgn(α)^n Σ_{m=1..n} Y_m(k)` with
//! `Y_m(k) = sgn(α)^m ψ_m(k mod b^m)`. Each `Y_m` depends only on the
//! residue `k mod b^m`, i.e. on the lowest `m` base-b digits of `k`.

use rayon::prelude::*;

use crate::base::{checked_cells, PeriodicBase};
use crate::error::{Error, Result};
use crate::scalar::{Real, Sign};

/// Cells per reduction chunk. Chunk boundaries sit at multiples of this
/// value regardless of the worker count.
pub const CHUNK_CELLS: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaMode<T> {
    /// `|α| = 1/b`, held symbolically.
    Critical,
    /// `|α| = magnitude` with `0 < magnitude < 1`.
    General(T),
}

/// The triple (φ, b, α) defining `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractalSpec<T> {
    pub base: PeriodicBase<T>,
    pub b: u64,
    pub sign: Sign,
    pub mode: AlphaMode<T>,
}

/// Scaled sum `S_k = Σ Y_m` of a critical-mode increment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaledSum<T> {
    Int(i64),
    Real(T),
}

impl<T: Real> ScaledSum<T> {
    pub fn to_real(self) -> T {
        match self {
            ScaledSum::Int(s) => T::from_i64_lossy(s),
            ScaledSum::Real(s) => s,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            ScaledSum::Int(s) => s == 0,
            ScaledSum::Real(s) => s == T::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementRecord<T> {
    pub k: u64,
    pub n: u32,
    /// Unset in general mode.
    pub s: Option<ScaledSum<T>>,
    /// `f((k+1) b^-n) - f(k b^-n)`.
    pub value: T,
}

impl<T: Real> FractalSpec<T> {
    pub fn critical(base: PeriodicBase<T>, b: u64, sign: Sign) -> Result<Self> {
        check_base(b)?;
        Ok(Self { base, b, sign, mode: AlphaMode::Critical })
    }

    pub fn general(base: PeriodicBase<T>, b: u64, sign: Sign, magnitude: T) -> Result<Self> {
        check_base(b)?;
        if !(magnitude > T::zero() && magnitude < T::one()) {
            return Err(Error::Range(format!("|α| = {magnitude} must lie in (0, 1)")));
        }
        Ok(Self { base, b, sign, mode: AlphaMode::General(magnitude) })
    }

    /// Classical Takagi function: tent map, b = 2, α = 1/2.
    pub fn takagi() -> Self {
        Self { base: PeriodicBase::Tent, b: 2, sign: Sign::Plus, mode: AlphaMode::Critical }
    }

    pub fn is_critical(&self) -> bool {
        matches!(self.mode, AlphaMode::Critical)
    }

    pub fn alpha_magnitude(&self) -> T {
        match self.mode {
            AlphaMode::Critical => T::from_u64_lossy(self.b).recip(),
            AlphaMode::General(mag) => mag,
        }
    }

    pub fn alpha(&self) -> T {
        self.sign.to_real::<T>() * self.alpha_magnitude()
    }

    /// `Σ_{m<M} α^m φ(b^m t)` with `M` minimal such that the tail bound
    /// `|α|^M sup|φ| / (1 - |α|)` is at most `tol`.
    pub fn eval_f(&self, t: T, tol: T) -> Result<T> {
        if !(tol > T::zero()) {
            return Err(Error::InvalidTolerance(tol.as_f64()));
        }
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::Range(format!("t = {t} outside [0, 1]")));
        }
        let mag = self.alpha_magnitude();
        let alpha = self.alpha();
        let bf = T::from_u64_lossy(self.b);
        let mut tail = self.base.sup_bound() / (T::one() - mag);
        let mut weight = T::one();
        let mut x = t;
        let mut acc = T::zero();
        while tail > tol {
            acc += weight * self.base.eval(x);
            weight *= alpha;
            tail *= mag;
            let y = bf * x;
            x = y - y.floor();
        }
        Ok(acc)
    }

    /// Exact increment over cell `k` of level `n`.
    pub fn increment_exact(&self, n: u32, k: u64) -> Result<IncrementRecord<T>> {
        let grid = LevelGrid::new(self, n)?;
        if k >= grid.cells {
            return Err(Error::Range(format!("cell {k} outside [0, {})", grid.cells)));
        }
        let residues: Vec<u64> = grid.powers.iter().map(|&p| k % p).collect();
        Ok(grid.record(self, k, &residues))
    }

    /// Increments for cells `k_lo..k_hi` in ascending order.
    pub fn increment_stream(&self, n: u32, k_lo: u64, k_hi: u64) -> Result<IncrementStream<T>> {
        let grid = LevelGrid::new(self, n)?;
        if k_lo > k_hi || k_hi > grid.cells {
            return Err(Error::Range(format!("cell range [{k_lo}, {k_hi}) invalid for {} cells", grid.cells)));
        }
        let residues = grid.powers.iter().map(|&p| k_lo % p).collect();
        Ok(IncrementStream { spec: *self, grid, residues, k: k_lo, k_hi })
    }

    /// Number of cells `b^n` of level `n`, checked against the level cap.
    pub fn cells(&self, n: u32) -> Result<u64> {
        checked_cells(self.b, n)
    }

    /// Folds cells `k_lo..k_hi` chunk by chunk in parallel. Returns one
    /// accumulator per chunk, in ascending chunk order, so sequential merging
    /// of the result is independent of the worker count.
    pub fn fold_cells<A, I, F>(&self, n: u32, k_lo: u64, k_hi: u64, init: I, fold: F) -> Result<Vec<A>>
    where
        A: Send,
        I: Fn() -> A + Sync,
        F: Fn(&mut A, &IncrementRecord<T>) + Sync,
    {
        // validates the range
        self.increment_stream(n, k_lo, k_hi)?;
        if k_lo == k_hi {
            return Ok(Vec::new());
        }
        let first = k_lo / CHUNK_CELLS;
        let last = (k_hi - 1) / CHUNK_CELLS;
        Ok((first..=last)
            .into_par_iter()
            .map(|c| {
                let lo = (c * CHUNK_CELLS).max(k_lo);
                let hi = ((c + 1) * CHUNK_CELLS).min(k_hi);
                let mut acc = init();
                let stream = self.increment_stream(n, lo, hi).expect("chunk inside validated range");
                for rec in stream {
                    fold(&mut acc, &rec);
                }
                acc
            })
            .collect())
    }
}

fn check_base(b: u64) -> Result<()> {
    if b < 2 {
        Err(Error::Range(format!("base b = {b} must be at least 2")))
    } else {
        Ok(())
    }
}

/// Powers `b^1..b^n` and the per-level constants shared by all cells.
#[derive(Debug, Clone)]
struct LevelGrid<T> {
    n: u32,
    cells: u64,
    powers: Vec<u64>,
    /// `sgn(α)^m` for m = 1..n.
    signs: Vec<i64>,
    /// General mode: `α^{n-j} b^-j` for j = 1..n.
    weights: Vec<T>,
}

impl<T: Real> LevelGrid<T> {
    fn new(spec: &FractalSpec<T>, n: u32) -> Result<Self> {
        let cells = checked_cells(spec.b, n)?;
        let powers: Vec<u64> = (1..=n)
            .scan(1u64, |acc, _| {
                *acc *= spec.b;
                Some(*acc)
            })
            .collect();
        let signs = (1..=n).map(|m| spec.sign.pow(m)).collect();
        let weights = match spec.mode {
            AlphaMode::Critical => Vec::new(),
            AlphaMode::General(_) => {
                let alpha = spec.alpha();
                powers.iter().zip(1..=n).map(|(&p, j)| alpha.powi((n - j) as i32) / T::from_u64_lossy(p)).collect()
            }
        };
        Ok(Self { n, cells, powers, signs, weights })
    }

    #[inline]
    fn record(&self, spec: &FractalSpec<T>, k: u64, residues: &[u64]) -> IncrementRecord<T> {
        let n = self.n;
        let cells = T::from_u64_lossy(self.cells);
        match (spec.mode, spec.base) {
            (AlphaMode::Critical, PeriodicBase::Tent) => {
                let mut s: i64 = 0;
                for ((&p, &r), &sg) in self.powers.iter().zip(residues).zip(&self.signs) {
                    s += sg * crate::base::tent_grid_increment(p, r);
                }
                let value = T::from_i64_lossy(spec.sign.pow(n) * s) / cells;
                IncrementRecord { k, n, s: Some(ScaledSum::Int(s)), value }
            }
            (AlphaMode::Critical, base) => {
                let mut s = T::zero();
                for ((&p, &r), &sg) in self.powers.iter().zip(residues).zip(&self.signs) {
                    let y = base.grid_increment(p, r);
                    s += if sg < 0 { -y } else { y };
                }
                let value = if spec.sign.pow(n) < 0 { -s } else { s } / cells;
                IncrementRecord { k, n, s: Some(ScaledSum::Real(s)), value }
            }
            (AlphaMode::General(_), base) => {
                let mut value = T::zero();
                for ((&p, &r), &w) in self.powers.iter().zip(residues).zip(&self.weights) {
                    value += w * base.grid_increment(p, r);
                }
                IncrementRecord { k, n, s: None, value }
            }
        }
    }
}

/// Iterator over consecutive cells of one level. Residues `k mod b^m` are
/// advanced by counting with wraparound; no division after construction.
#[derive(Debug, Clone)]
pub struct IncrementStream<T> {
    spec: FractalSpec<T>,
    grid: LevelGrid<T>,
    residues: Vec<u64>,
    k: u64,
    k_hi: u64,
}

impl<T: Real> Iterator for IncrementStream<T> {
    type Item = IncrementRecord<T>;

    #[inline]
    fn next(&mut self) -> Option<Self::Item> {
        if self.k >= self.k_hi {
            return None;
        }
        let rec = self.grid.record(&self.spec, self.k, &self.residues);
        self.k += 1;
        for (r, &p) in self.residues.iter_mut().zip(&self.grid.powers) {
            *r += 1;
            if *r == p {
                *r = 0;
            }
        }
        Some(rec)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.k_hi - self.k) as usize;
        (left, Some(left))
    }
}

impl<T: Real> ExactSizeIterator for IncrementStream<T> {}
