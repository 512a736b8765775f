//! Φ-variation and power variation along b-adic partitions.
//!
//! Sums run over cells `k` with `k b^-n <= t`, capped at `b^n - 1`. Critical
//! increments are accumulated in scaled form: with `Δ_k = ± b^-n S_k`,
//! `Φ(|Δ_k|) = b^-n |S_k| / √(n ln b - ln |S_k|)`, and `b^-n` is applied once
//! at the end. Natural logarithms throughout.

use crate::base::PeriodicBase;
use crate::engine::{AlphaMode, FractalSpec, IncrementRecord, ScaledSum};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::summation::CompensatedSum;
use crate::theory;

/// `Φ(x) = x / √(-ln x)` on `(0, 1)`, `Φ(0) = 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhiFunction;

impl PhiFunction {
    /// `None` outside `[0, 1)`.
    pub fn eval<T: Real>(x: T) -> Option<T> {
        if x == T::zero() {
            Some(T::zero())
        } else if x > T::zero() && x < T::one() {
            Some(x / (-x.ln()).sqrt())
        } else {
            None
        }
    }

    /// `b^n Φ(b^-n s)` for `0 < s < b^n`, given `log_cells = n ln b`.
    #[inline]
    pub fn scaled<T: Real>(s_abs: T, log_cells: T) -> T {
        s_abs / (log_cells - s_abs.ln()).sqrt()
    }
}

/// Number of cells `k` of level `n` with `k b^-n <= t`, at most `b^n`.
pub fn cells_up_to<T: Real>(cells: u64, t: T) -> Result<u64> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(Error::Range(format!("t = {t} outside [0, 1]")));
    }
    let last = (t.as_f64() * cells as f64).floor() as u64;
    Ok(last.saturating_add(1).min(cells))
}

/// Φ-sum and power sums of one level restricted to `[0, t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSums<T> {
    pub n: u32,
    pub t: T,
    /// Cells included in the sums.
    pub cells_used: u64,
    /// Present in critical mode only.
    pub phi: Option<T>,
    /// `(q, Σ |Δ_k|^q)` in the order requested.
    pub q: Vec<(T, T)>,
}

impl<T: Real> LevelSums<T> {
    pub fn compute(spec: &FractalSpec<T>, n: u32, t: T, qs: &[T]) -> Result<Self> {
        if let Some(&bad) = qs.iter().find(|&&q| !(q > T::zero())) {
            return Err(Error::Range(format!("q = {bad} must be positive")));
        }
        let cells = spec.cells(n)?;
        let used = cells_up_to(cells, t)?;
        match (spec.mode, spec.base) {
            (AlphaMode::Critical, PeriodicBase::Tent) => tent_sums(spec, n, t, cells, used, qs),
            _ => real_sums(spec, n, t, cells, used, qs),
        }
    }
}

fn log_cells<T: Real>(spec: &FractalSpec<T>, n: u32) -> T {
    T::from_u64_lossy(u64::from(n)) * T::from_u64_lossy(spec.b).ln()
}

/// Tent cells carry integer `|S_k| <= n`, so each chunk reduces to an exact
/// histogram of `|S_k|`; floating point enters only in the final weighted sum.
fn tent_sums<T: Real>(spec: &FractalSpec<T>, n: u32, t: T, cells: u64, used: u64, qs: &[T]) -> Result<LevelSums<T>> {
    let width = n as usize + 1;
    let chunks = spec.fold_cells(
        n,
        0,
        used,
        || vec![0u64; width],
        |hist, rec| {
            if let Some(ScaledSum::Int(s)) = rec.s {
                hist[s.unsigned_abs() as usize] += 1;
            }
        },
    )?;
    let mut hist = vec![0u64; width];
    for chunk in &chunks {
        for (h, c) in hist.iter_mut().zip(chunk) {
            *h += c;
        }
    }
    if let Some(j) = (1..width).rev().find(|&j| hist[j] > 0) {
        if j as u64 >= cells {
            return Err(Error::PhiDomain { level: n, cell: 0, magnitude: j as f64 / cells as f64 });
        }
    }
    let cells_t = T::from_u64_lossy(cells);
    let lc = log_cells(spec, n);
    let mut phi = CompensatedSum::new();
    for (j, &count) in hist.iter().enumerate().skip(1) {
        if count > 0 {
            let s = T::from_u64_lossy(j as u64);
            phi.add(T::from_u64_lossy(count) * PhiFunction::scaled(s, lc));
        }
    }
    let q = qs
        .iter()
        .map(|&q| {
            let mut acc = CompensatedSum::new();
            for (j, &count) in hist.iter().enumerate().skip(1) {
                if count > 0 {
                    acc.add(T::from_u64_lossy(count) * T::from_u64_lossy(j as u64).powf(q));
                }
            }
            (q, acc.value() * cells_t.powf(-q))
        })
        .collect();
    Ok(LevelSums { n, t, cells_used: used, phi: Some(phi.value() / cells_t), q })
}

#[derive(Debug, Clone)]
struct RealChunk<T> {
    phi: CompensatedSum<T>,
    q: Vec<CompensatedSum<T>>,
    /// First cell leaving the domain of Φ, with its scaled magnitude.
    violation: Option<(u64, T)>,
}

fn real_sums<T: Real>(spec: &FractalSpec<T>, n: u32, t: T, cells: u64, used: u64, qs: &[T]) -> Result<LevelSums<T>> {
    let critical = spec.is_critical();
    let cells_t = T::from_u64_lossy(cells);
    let lc = log_cells(spec, n);
    let init = || RealChunk { phi: CompensatedSum::new(), q: vec![CompensatedSum::new(); qs.len()], violation: None };
    let fold = |acc: &mut RealChunk<T>, rec: &IncrementRecord<T>| {
        // |S_k| in critical mode, |Δ_k| otherwise
        let mag = match rec.s {
            Some(s) => s.to_real().abs(),
            None => rec.value.abs(),
        };
        for (sum, &q) in acc.q.iter_mut().zip(qs) {
            sum.add(mag.powf(q));
        }
        if critical && mag > T::zero() {
            if mag >= cells_t {
                acc.violation.get_or_insert((rec.k, mag));
            } else {
                acc.phi.add(PhiFunction::scaled(mag, lc));
            }
        }
    };
    let chunks = spec.fold_cells(n, 0, used, init, fold)?;
    let mut total = init();
    for chunk in &chunks {
        if critical {
            if let Some((k, mag)) = chunk.violation {
                return Err(Error::PhiDomain { level: n, cell: k, magnitude: (mag / cells_t).as_f64() });
            }
        }
        total.phi.merge(&chunk.phi);
        for (acc, part) in total.q.iter_mut().zip(&chunk.q) {
            acc.merge(part);
        }
    }
    let q = qs
        .iter()
        .zip(&total.q)
        .map(|(&q, acc)| {
            let v = if critical { acc.value() * cells_t.powf(-q) } else { acc.value() };
            (q, v)
        })
        .collect();
    let phi = critical.then(|| total.phi.value() / cells_t);
    Ok(LevelSums { n, t, cells_used: used, phi, q })
}

/// `Σ_{k b^-n <= t} Φ(|f((k+1) b^-n) - f(k b^-n)|)`.
pub fn phi_variation<T: Real>(spec: &FractalSpec<T>, n: u32, t: T) -> Result<T> {
    if !spec.is_critical() {
        return Err(Error::Mode);
    }
    let sums = LevelSums::compute(spec, n, t, &[])?;
    Ok(sums.phi.expect("critical mode yields a Φ-sum"))
}

/// `Σ_{k b^-n <= t} |f((k+1) b^-n) - f(k b^-n)|^q`.
pub fn q_variation<T: Real>(spec: &FractalSpec<T>, n: u32, q: T, t: T) -> Result<T> {
    if !(q > T::zero()) {
        return Err(Error::Range(format!("q = {q} must be positive")));
    }
    let sums = LevelSums::compute(spec, n, t, &[q])?;
    Ok(sums.q[0].1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationRow<T> {
    pub n: u32,
    pub t: T,
    pub v_phi: Option<T>,
    pub v_q: Vec<(T, T)>,
    pub theory_limit: Option<T>,
    pub ratio: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VariationReport<T> {
    pub rows: Vec<VariationRow<T>>,
}

/// One row per `(n, t)`, sorted, with the closed-form limit where one exists.
pub fn convergence_report<T: Real>(
    spec: &FractalSpec<T>,
    n_list: &[u32],
    t_list: &[T],
    q_list: &[T],
) -> Result<VariationReport<T>> {
    if n_list.is_empty() || t_list.is_empty() {
        return Err(Error::Range("level and time lists must be nonempty".into()));
    }
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut ts = t_list.to_vec();
    if ts.iter().any(|t| t.is_nan()) {
        return Err(Error::Range("t must not be NaN".into()));
    }
    ts.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    ts.dedup();
    let mut rows = Vec::with_capacity(ns.len() * ts.len());
    for &n in &ns {
        for &t in &ts {
            let sums = LevelSums::compute(spec, n, t, q_list)?;
            let theory_limit = theory::phi_limit(spec, t).ok().map(|l| l.value);
            let ratio = match (sums.phi, theory_limit) {
                (Some(v), Some(l)) if l != T::zero() => Some(v / l),
                _ => None,
            };
            rows.push(VariationRow { n, t, v_phi: sums.phi, v_q: sums.q, theory_limit, ratio });
        }
    }
    Ok(VariationReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Sign;

    fn naive_phi(spec: &FractalSpec<f64>, n: u32, t: f64) -> f64 {
        let cells = spec.cells(n).unwrap();
        let used = cells_up_to(cells, t).unwrap();
        spec.increment_stream(n, 0, used).unwrap().map(|r| PhiFunction::eval(r.value.abs()).unwrap()).sum()
    }

    #[test]
    fn phi_function_shape() {
        assert_eq!(PhiFunction::eval(0.0f64), Some(0.0));
        assert_eq!(PhiFunction::eval(1.0f64), None);
        assert_eq!(PhiFunction::eval(-0.1f64), None);
        let grid: Vec<f64> = (1..1000).map(|i| i as f64 / 1000.0).collect();
        for w in grid.windows(2) {
            assert!(PhiFunction::eval(w[0]).unwrap() < PhiFunction::eval(w[1]).unwrap());
        }
        let ratios: Vec<f64> = (1..12)
            .map(|j| {
                let x = 10f64.powi(-j);
                PhiFunction::eval(x).unwrap() / x
            })
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn cell_inclusion() {
        assert_eq!(cells_up_to(4, 0.0f64).unwrap(), 1);
        assert_eq!(cells_up_to(4, 0.25f64).unwrap(), 2);
        assert_eq!(cells_up_to(4, 0.2499f64).unwrap(), 1);
        assert_eq!(cells_up_to(4, 1.0f64).unwrap(), 4);
        assert!(cells_up_to(4, 1.01f64).is_err());
    }

    #[test]
    fn takagi_small_levels() {
        let takagi = FractalSpec::<f64>::takagi();
        let expect = 1.0 / 2f64.ln().sqrt();
        assert!((expect - 1.2011224087864498).abs() < 1e-15);
        assert!((phi_variation(&takagi, 1, 1.0).unwrap() - expect).abs() < 1e-15);
        assert!((phi_variation(&takagi, 2, 1.0).unwrap() - expect).abs() < 1e-15);
        assert_eq!(q_variation(&takagi, 2, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(q_variation(&takagi, 2, 2.0, 1.0).unwrap(), 0.5);
        assert_eq!(q_variation(&takagi, 3, 2.0, 1.0).unwrap(), 0.375);
    }

    #[test]
    fn single_cell_at_t_zero() {
        for spec in [
            FractalSpec::<f64>::takagi(),
            FractalSpec::critical(PeriodicBase::<f64>::trig(1.0, 0.0), 2, Sign::Minus).unwrap(),
        ] {
            let first = spec.increment_exact(5, 0).unwrap().value.abs();
            let v = phi_variation(&spec, 5, 0.0).unwrap();
            assert!((v - PhiFunction::eval(first).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn errors() {
        let takagi = FractalSpec::<f64>::takagi();
        assert_eq!(q_variation(&takagi, 3, 0.0, 1.0), Err(Error::Range("q = 0 must be positive".into())));
        let general = FractalSpec::general(PeriodicBase::<f64>::Tent, 2, Sign::Plus, 0.7).unwrap();
        assert_eq!(phi_variation(&general, 3, 1.0), Err(Error::Mode));
        // Trig(2,0), b=2, n=2: S_0 = 8 > b^n
        let weier = FractalSpec::critical(PeriodicBase::<f64>::trig(2.0, 0.0), 2, Sign::Plus).unwrap();
        assert!(matches!(phi_variation(&weier, 2, 1.0), Err(Error::PhiDomain { .. })));
        assert!(phi_variation(&weier, 8, 1.0).is_ok());
    }

    #[test]
    fn scaled_form_matches_naive() {
        let specs = [
            FractalSpec::<f64>::takagi(),
            FractalSpec::critical(PeriodicBase::<f64>::Tent, 3, Sign::Minus).unwrap(),
            FractalSpec::critical(PeriodicBase::<f64>::trig(1.0, 0.0), 2, Sign::Plus).unwrap(),
            FractalSpec::critical(PeriodicBase::<f64>::trig(0.2, 0.3), 3, Sign::Minus).unwrap(),
        ];
        for spec in specs {
            let max_n = if spec.b == 2 { 12 } else { 8 };
            for n in 6..=max_n {
                for t in [0.3, 1.0] {
                    let fast = phi_variation(&spec, n, t).unwrap();
                    let slow = naive_phi(&spec, n, t);
                    assert!((fast - slow).abs() <= 1e-8 * slow, "b={} n={n}", spec.b);
                }
            }
        }
    }

    #[test]
    fn monotone_in_t() {
        let spec = FractalSpec::critical(PeriodicBase::<f64>::trig(1.0, 1.0), 3, Sign::Plus).unwrap();
        let mut prev = (0.0, 0.0);
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let v = phi_variation(&spec, 7, t).unwrap();
            let q = q_variation(&spec, 7, 1.5, t).unwrap();
            assert!(v >= prev.0 && q >= prev.1);
            prev = (v, q);
        }
    }

    #[test]
    fn q_decreasing_in_q() {
        let spec = FractalSpec::critical(PeriodicBase::<f64>::trig(0.1, 0.1), 2, Sign::Plus).unwrap();
        let v1 = q_variation(&spec, 4, 1.0, 1.0).unwrap();
        let v3 = q_variation(&spec, 4, 3.0, 1.0).unwrap();
        assert!(v1 >= v3);
        let general = FractalSpec::general(PeriodicBase::<f64>::Tent, 2, Sign::Plus, 0.6).unwrap();
        assert!(q_variation(&general, 4, 1.0, 1.0).unwrap() >= q_variation(&general, 4, 3.0, 1.0).unwrap());
    }

    #[test]
    fn general_mode_matches_critical_at_one_over_b() {
        let crit = FractalSpec::critical(PeriodicBase::<f64>::trig(1.0, 0.0), 3, Sign::Minus).unwrap();
        let gen = FractalSpec::general(PeriodicBase::<f64>::trig(1.0, 0.0), 3, Sign::Minus, 1.0 / 3.0).unwrap();
        let a = q_variation(&crit, 7, 2.0, 1.0).unwrap();
        let b = q_variation(&gen, 7, 2.0, 1.0).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn report_rows_sorted_and_consistent() {
        let takagi = FractalSpec::<f64>::takagi();
        let report = convergence_report(&takagi, &[2, 1], &[1.0, 0.5], &[1.0]).unwrap();
        let keys: Vec<(u32, f64)> = report.rows.iter().map(|r| (r.n, r.t)).collect();
        assert_eq!(keys, vec![(1, 0.5), (1, 1.0), (2, 0.5), (2, 1.0)]);
        for row in &report.rows {
            if row.t == 1.0 {
                assert!((row.v_phi.unwrap() - 1.2011224087864498).abs() < 1e-12);
            }
            let ratio = row.v_phi.unwrap() / row.theory_limit.unwrap();
            assert_eq!(row.ratio, Some(ratio));
        }
        assert!(report.rows[0].v_phi <= report.rows[1].v_phi);
        assert!(convergence_report(&takagi, &[], &[1.0], &[]).is_err());
    }

    #[test]
    fn f32_variation() {
        let takagi = FractalSpec::<f32>::takagi();
        let v = phi_variation(&takagi, 10, 1.0f32).unwrap();
        let v64 = phi_variation(&FractalSpec::<f64>::takagi(), 10, 1.0).unwrap();
        assert!((v as f64 - v64).abs() < 1e-5);
    }
}
