//! Compensated summation.

use crate::scalar::Real;

/// Neumaier's variant of Kahan summation: tracks the rounding error of every
/// addition in a separate compensation term.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum into this one: sum first, then compensation.
    #[inline]
    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }

    pub fn sum_iter<I: IntoIterator<Item = T>>(iter: I) -> T {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
        assert_eq!(CompensatedSum::sum_iter(xs), 2.0);
    }

    #[test]
    fn many_small_terms() {
        let n = 1_000_000;
        let s = CompensatedSum::sum_iter(std::iter::repeat_n(0.1f64, n));
        assert!((s - 100_000.0).abs() < 1e-9);
        let s32 = CompensatedSum::sum_iter(std::iter::repeat_n(0.1f32, n));
        // the f32 compensation term itself accumulates rounding error
        assert!((s32 - 100_000.0).abs() < 10.0);
    }

    #[test]
    fn merge_matches_single_pass_closely() {
        let xs: Vec<f64> = (1..=10_000).map(|i| 1.0 / i as f64).collect();
        let whole = CompensatedSum::sum_iter(xs.iter().copied());
        let mut acc = CompensatedSum::new();
        for c in xs.chunks(777) {
            let mut part = CompensatedSum::new();
            c.iter().for_each(|&x| part.add(x));
            acc.merge(&part);
        }
        assert!((acc.value() - whole).abs() <= 1e-15 * whole);
    }
}
