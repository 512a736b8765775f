//! Seeded sampling of the digit process `U_1, U_2, ...` and the increment
//! sequence `Y_m = sgn(α)^m ψ_m(R_m b^-m)`, `R_m = Σ_{i<=m} U_i b^{i-1}`.
//!
//! Each path draws from its own ChaCha8 stream `(seed, index)`, so an
//! ensemble is reproducible and independent of how paths are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::base::{PeriodicBase, CELL_CAP};
use crate::engine::FractalSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Paths per parallel work unit in ensemble sampling.
const PATH_BLOCK: u64 = 1024;

/// Random source for path `index` of the ensemble seeded with `seed`.
pub fn digit_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Position `R_m b^-m` of the digit process after `m` digits.
///
/// `R_m` is kept exactly while `b^m` fits below the level cap, in which case
/// increments go through the exact grid formula. Past the cap the position
/// continues as the float recurrence `x_m = (U_m + x_{m-1}) / b`, and the
/// tent increment follows the digit recurrence: with `h = (b-1)/2`,
/// `U_m < h` gives +1, `U_m > h` gives -1 and `U_m = h` (odd b) repeats the
/// previous value; for even `b` the sign is `U_m < b/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DigitCursor<T> {
    b: u64,
    m: u32,
    exact: Option<(u64, u64)>,
    x: T,
    step: T,
    tent: i64,
}

impl<T: Real> DigitCursor<T> {
    pub fn new(b: u64) -> Self {
        Self { b, m: 0, exact: Some((0, 1)), x: T::zero(), step: T::one(), tent: 0 }
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    /// `R_m` while it is tracked exactly.
    pub fn residue(&self) -> Option<u64> {
        self.exact.map(|(r, _)| r)
    }

    pub fn advance(&mut self, digit: u64) {
        debug_assert!(digit < self.b);
        let b = self.b;
        self.m += 1;
        self.exact = self.exact.and_then(|(r, cells)| {
            let next = cells.checked_mul(b).filter(|&c| c < CELL_CAP)?;
            Some((r + digit * cells, next))
        });
        let bf = T::from_u64_lossy(b);
        self.x = (T::from_u64_lossy(digit) + self.x) / bf;
        self.step /= bf;
        self.tent = if b.is_multiple_of(2) {
            if 2 * digit < b {
                1
            } else {
                -1
            }
        } else {
            let h = (b - 1) / 2;
            match digit.cmp(&h) {
                std::cmp::Ordering::Less => 1,
                std::cmp::Ordering::Greater => -1,
                std::cmp::Ordering::Equal => self.tent,
            }
        };
    }

    /// `R_m b^-m` as a float.
    pub fn position(&self) -> T {
        match self.exact {
            Some((r, cells)) => T::from_u64_lossy(r) / T::from_u64_lossy(cells),
            None => self.x,
        }
    }

    /// `ψ_m(R_m b^-m)` at the current level `m >= 1`.
    pub fn increment(&self, base: &PeriodicBase<T>) -> T {
        match (self.exact, base) {
            (Some((r, cells)), _) => base.grid_increment(cells, r),
            (None, PeriodicBase::Tent) => T::from_i64_lossy(self.tent),
            (None, trig) => trig.increment_at(self.x, self.step),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSample<T> {
    pub seed: u64,
    /// Stream index within the ensemble.
    pub index: u64,
    pub n: u32,
    pub digits: Vec<u32>,
    /// `Y_1..Y_n`.
    pub y: Vec<T>,
    /// `Z_0..Z_n`.
    pub z: Vec<T>,
    /// `⟨Z⟩_0..⟨Z⟩_n`, trigonometric base only.
    pub qv: Option<Vec<T>>,
}

impl<T: Real> PathSample<T> {
    /// Builds the path determined by the given digits.
    pub fn from_digits(spec: &FractalSpec<T>, seed: u64, index: u64, digits: Vec<u32>) -> Result<Self> {
        if !spec.is_critical() {
            return Err(Error::Mode);
        }
        if let Some(&d) = digits.iter().find(|&&d| u64::from(d) >= spec.b) {
            return Err(Error::Range(format!("digit {d} outside [0, {})", spec.b)));
        }
        let n = u32::try_from(digits.len()).map_err(|_| Error::Range("path too long".into()))?;
        let mut cursor = DigitCursor::new(spec.b);
        let mut y = Vec::with_capacity(digits.len());
        let mut z = Vec::with_capacity(digits.len() + 1);
        z.push(T::zero());
        let mut acc = T::zero();
        for (&d, m) in digits.iter().zip(1..) {
            cursor.advance(u64::from(d));
            let raw = cursor.increment(&spec.base);
            let ym = if spec.sign.pow(m) < 0 { -raw } else { raw };
            acc += ym;
            y.push(ym);
            z.push(acc);
        }
        let mut path = Self { seed, index, n, digits, y, z, qv: None };
        if !spec.base.is_tent() {
            let qv = super::martingale::predictable_qv(spec, &path)?;
            path.qv = Some(std::iter::once(T::zero()).chain(qv).collect());
        }
        Ok(path)
    }
}

fn draw_digits(b: u64, n: u32, seed: u64, index: u64) -> Vec<u32> {
    let mut rng = digit_rng(seed, index);
    (0..n).map(|_| rng.random_range(0..b) as u32).collect()
}

/// Path `index` of the ensemble seeded with `seed`.
pub fn sample_path<T: Real>(spec: &FractalSpec<T>, n: u32, seed: u64, index: u64) -> Result<PathSample<T>> {
    PathSample::from_digits(spec, seed, index, draw_digits(spec.b, n, seed, index))
}

/// `count` independent paths of length `n`.
pub fn sample_paths<T: Real>(spec: &FractalSpec<T>, n: u32, count: u64, seed: u64) -> Result<Vec<PathSample<T>>> {
    if !spec.is_critical() {
        return Err(Error::Mode);
    }
    if count == 0 {
        return Err(Error::Range("sample count must be at least 1".into()));
    }
    (0..count).into_par_iter().map(|i| sample_path(spec, n, seed, i)).collect()
}

/// Endpoints `Z_n` of an ensemble plus, for the tent map, counts of
/// consecutive pairs `(Y_m, Y_{m+1})` indexed by `Y + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble<T> {
    pub n: u32,
    pub seed: u64,
    pub endpoints: Vec<T>,
    pub transitions: Option<[[u64; 3]; 3]>,
}

impl<T> Ensemble<T> {
    pub fn count(&self) -> u64 {
        self.endpoints.len() as u64
    }
}

/// Samples `count` paths without retaining them. Path `i` uses the same
/// stream as [`sample_path`] with index `i`.
pub fn sample_ensemble<T: Real>(spec: &FractalSpec<T>, n: u32, count: u64, seed: u64) -> Result<Ensemble<T>> {
    if !spec.is_critical() {
        return Err(Error::Mode);
    }
    if count == 0 {
        return Err(Error::Range("sample count must be at least 1".into()));
    }
    let tent = spec.base.is_tent();
    let blocks: Vec<(Vec<T>, [[u64; 3]; 3])> = (0..count.div_ceil(PATH_BLOCK))
        .into_par_iter()
        .map(|blk| {
            let lo = blk * PATH_BLOCK;
            let hi = (lo + PATH_BLOCK).min(count);
            let mut ends = Vec::with_capacity((hi - lo) as usize);
            let mut trans = [[0u64; 3]; 3];
            for index in lo..hi {
                let mut rng = digit_rng(seed, index);
                let mut cursor = DigitCursor::<T>::new(spec.b);
                let mut z = T::zero();
                let mut prev: Option<usize> = None;
                for m in 1..=n {
                    cursor.advance(rng.random_range(0..spec.b));
                    let raw = cursor.increment(&spec.base);
                    let ym = if spec.sign.pow(m) < 0 { -raw } else { raw };
                    z += ym;
                    if tent {
                        let state = (ym.as_f64() as i64 + 1) as usize;
                        if let Some(p) = prev {
                            trans[p][state] += 1;
                        }
                        prev = Some(state);
                    }
                }
                ends.push(z);
            }
            (ends, trans)
        })
        .collect();
    let mut endpoints = Vec::with_capacity(count as usize);
    let mut transitions = [[0u64; 3]; 3];
    for (ends, trans) in blocks {
        endpoints.extend(ends);
        for (row, add) in transitions.iter_mut().zip(trans) {
            for (c, a) in row.iter_mut().zip(add) {
                *c += a;
            }
        }
    }
    Ok(Ensemble { n, seed, endpoints, transitions: tent.then_some(transitions) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::tent_grid_increment;
    use crate::scalar::Sign;

    #[test]
    fn cursor_recurrence_matches_exact_grid() {
        for b in [2u64, 3, 4, 5, 7] {
            let mut rng = digit_rng(11, b);
            let mut cursor = DigitCursor::<f64>::new(b);
            let mut r = 0u64;
            let mut cells = 1u64;
            while let Some(next) = cells.checked_mul(b).filter(|&c| c < CELL_CAP) {
                let d = rng.random_range(0..b);
                r += d * cells;
                cells = next;
                cursor.advance(d);
                assert_eq!(cursor.residue(), Some(r));
                assert_eq!(cursor.tent, tent_grid_increment(cells, r), "b={b} m={}", cursor.level());
                assert!((cursor.x - r as f64 / cells as f64).abs() < 1e-15);
            }
            cursor.advance(0);
            assert_eq!(cursor.residue(), None);
        }
    }

    #[test]
    fn odd_middle_digit_repeats() {
        let mut cursor = DigitCursor::<f64>::new(3);
        cursor.advance(1);
        assert_eq!(cursor.increment(&PeriodicBase::Tent), 0.0);
        cursor.advance(0);
        cursor.advance(1);
        cursor.advance(1);
        assert_eq!(cursor.increment(&PeriodicBase::Tent), 1.0);
    }

    #[test]
    fn path_structure() {
        let spec = FractalSpec::critical(PeriodicBase::<f64>::trig(1.0, 0.5), 3, Sign::Minus).unwrap();
        let path = sample_path(&spec, 80, 5, 2).unwrap();
        assert_eq!(path.z[0], 0.0);
        assert_eq!(path.z.len(), 81);
        for j in 1..=80 {
            assert!((path.z[j] - path.z[j - 1] - path.y[j - 1]).abs() < 1e-12);
            assert!(path.y[j - 1].abs() <= spec.base.lipschitz_bound() + 1e-12);
        }
        let qv = path.qv.as_ref().unwrap();
        assert_eq!(qv.len(), 81);
        assert!(qv.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn deterministic_and_scheduling_free() {
        let spec = FractalSpec::<f64>::takagi();
        assert_eq!(sample_paths(&spec, 30, 1, 9).unwrap(), sample_paths(&spec, 30, 1, 9).unwrap());
        let paths = sample_paths(&spec, 30, 2500, 9).unwrap();
        let ens = sample_ensemble(&spec, 30, 2500, 9).unwrap();
        for (p, z) in paths.iter().zip(&ens.endpoints) {
            assert_eq!(p.z[30], *z);
        }
        assert_ne!(paths[0].digits, paths[1].digits);
    }

    #[test]
    fn path_matches_engine_increment() {
        // the path's Z_n is the scaled sum of the cell R_n at level n
        let spec = FractalSpec::critical(PeriodicBase::<f64>::Tent, 3, Sign::Minus).unwrap();
        let path = sample_path(&spec, 9, 1, 0).unwrap();
        let k: u64 = path.digits.iter().rev().fold(0, |acc, &d| acc * 3 + d as u64);
        let rec = spec.increment_exact(9, k).unwrap();
        assert_eq!(rec.s.unwrap().to_real(), path.z[9]);
    }

    #[test]
    fn errors() {
        let spec = FractalSpec::<f64>::takagi();
        assert!(matches!(sample_paths(&spec, 3, 0, 1), Err(Error::Range(_))));
        assert!(matches!(PathSample::from_digits(&spec, 0, 0, vec![0, 2]), Err(Error::Range(_))));
        let g = FractalSpec::general(PeriodicBase::<f64>::Tent, 2, Sign::Plus, 0.9).unwrap();
        assert_eq!(sample_paths(&g, 3, 1, 1), Err(Error::Mode));
        assert_eq!(sample_ensemble(&g, 3, 1, 1), Err(Error::Mode));
    }
}
