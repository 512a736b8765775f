//! The {-1, 0, +1} Markov chain of tent-map digit increments for odd b,
//! and its restriction to the recurrent states {-1, +1}.
//!
//! States are ordered (-1, 0, +1) throughout.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Pow, ToPrimitive};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Real, Sign};

pub type Rational = Ratio<i64>;

pub const STATES: [i64; 3] = [-1, 0, 1];

fn check_odd(b: u64) -> Result<i64> {
    if b < 3 || b.is_multiple_of(2) || b > i64::MAX as u64 / 4 {
        Err(Error::Parity(b))
    } else {
        Ok(b as i64)
    }
}

/// `P± = (1/2b) [[b±1, 0, b∓1], [b-1, 2, b-1], [b∓1, 0, b±1]]`.
pub fn transition_matrix(b: u64, sign: Sign) -> Result<Matrix<Rational>> {
    let b = check_odd(b)?;
    let s = sign.as_i64();
    let d = 2 * b;
    let q = |x: i64| Rational::new(x, d);
    Ok(Matrix::from_rows(vec![
        vec![q(b + s), q(0), q(b - s)],
        vec![q(b - 1), q(2), q(b - 1)],
        vec![q(b - s), q(0), q(b + s)],
    ]))
}

/// Initial law `μ₁ = ((b-1)/2b, 1/b, (b-1)/2b)`.
pub fn initial_law(b: u64) -> Result<[Rational; 3]> {
    let b = check_odd(b)?;
    Ok([Rational::new(b - 1, 2 * b), Rational::new(1, b), Rational::new(b - 1, 2 * b)])
}

/// `P̄±`: `P±` with the transient middle state removed.
pub fn restricted_one_step(b: u64, sign: Sign) -> Result<Matrix<BigRational>> {
    let p = transition_matrix(b, sign)?;
    let big = |x: &Rational| BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()));
    Ok(Matrix::from_rows(vec![vec![big(p.get(0, 0)), big(p.get(0, 2))], vec![big(p.get(2, 0)), big(p.get(2, 2))]]))
}

/// `(±b)^-n` exactly.
pub fn chain_cov_exact(b: u64, sign: Sign, n: u32) -> Result<BigRational> {
    let b = check_odd(b)?;
    let base = BigRational::from_integer(BigInt::from(sign.as_i64() * b));
    Ok(base.pow(n).recip())
}

/// Closed form `P̄±^n = ½ [[1 + c, 1 - c], [1 - c, 1 + c]]`, `c = (±b)^-n`.
pub fn restricted_nstep(b: u64, sign: Sign, n: u32) -> Result<Matrix<BigRational>> {
    let c = chain_cov_exact(b, sign, n)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let one = BigRational::one();
    let diag = &half * (&one + &c);
    let off = &half * (&one - &c);
    Ok(Matrix::from_rows(vec![vec![diag.clone(), off.clone()], vec![off, diag]]))
}

/// `cov(Ȳ₁, Ȳ_{n+1})` under the stationary law `(½, ½)`; `n = 0` gives
/// `var(Ȳ₁) = 1`.
pub fn chain_cov<T: Real>(b: u64, sign: Sign, n: u32) -> Result<T> {
    let c = chain_cov_exact(b, sign, n)?;
    Ok(T::lit(big_to_f64(&c)))
}

/// `σ² = var(Ȳ₁) + 2 Σ_{n>=1} cov(Ȳ₁, Ȳ_{n+1}) = (b ± 1)/(b ∓ 1)`.
pub fn chain_sigma2(b: u64, sign: Sign) -> Result<Rational> {
    let b = check_odd(b)?;
    let s = sign.as_i64();
    Ok(Rational::new(b + s, b - s))
}

/// Stationary covariance computed directly as
/// `Σ_{y, y'} μ̄(y) P̄^n(y, y') y y'` from the closed-form n-step matrix.
pub fn stationary_cov(b: u64, sign: Sign, n: u32) -> Result<BigRational> {
    let pn = restricted_nstep(b, sign, n)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let ys = [-1i64, 1];
    let mut acc = BigRational::from_integer(BigInt::from(0));
    for (i, &y) in ys.iter().enumerate() {
        for (j, &y2) in ys.iter().enumerate() {
            acc += &half * pn.get(i, j) * BigRational::from_integer(BigInt::from(y * y2));
        }
    }
    Ok(acc)
}

pub fn big_to_f64(x: &BigRational) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale down huge components before dividing
            let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000);
            let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (x.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            n / d
        }
    }
}

/// The chain parameters for one odd base and sign.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub b: u64,
    pub sign: Sign,
    pub mu1: [Rational; 3],
    pub p: Matrix<Rational>,
}

impl ChainSpec {
    pub fn new(b: u64, sign: Sign) -> Result<Self> {
        Ok(Self { b, sign, mu1: initial_law(b)?, p: transition_matrix(b, sign)? })
    }

    pub fn sigma2(&self) -> Rational {
        chain_sigma2(self.b, self.sign).expect("validated at construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn br(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn transition_examples() {
        let p = transition_matrix(3, Sign::Plus).unwrap();
        assert_eq!(
            p,
            Matrix::from_rows(vec![
                vec![r(2, 3), r(0, 1), r(1, 3)],
                vec![r(1, 3), r(1, 3), r(1, 3)],
                vec![r(1, 3), r(0, 1), r(2, 3)],
            ])
        );
        let m = transition_matrix(3, Sign::Minus).unwrap();
        assert_eq!(m.row(0), &[r(1, 3), r(0, 1), r(2, 3)]);
        assert_eq!(m.row(2), &[r(2, 3), r(0, 1), r(1, 3)]);
        let p5 = transition_matrix(5, Sign::Plus).unwrap();
        assert_eq!(p5.row(0), &[r(3, 5), r(0, 1), r(2, 5)]);
        assert_eq!(p5.row(1), &[r(2, 5), r(1, 5), r(2, 5)]);
    }

    #[test]
    fn parity_errors() {
        for b in [0u64, 1, 2, 4, 10] {
            assert_eq!(transition_matrix(b, Sign::Plus), Err(Error::Parity(b)));
            assert_eq!(restricted_nstep(b, Sign::Minus, 2), Err(Error::Parity(b)));
            assert_eq!(chain_cov::<f64>(b, Sign::Plus, 1), Err(Error::Parity(b)));
            assert_eq!(chain_sigma2(b, Sign::Plus), Err(Error::Parity(b)));
        }
    }

    #[test]
    fn chain_invariants() {
        for b in (3..=21u64).step_by(2) {
            for sign in [Sign::Plus, Sign::Minus] {
                let c = ChainSpec::new(b, sign).unwrap();
                assert!(c.p.row_sums().iter().all(|x| *x == r(1, 1)));
                assert_eq!(c.mu1.iter().sum::<Rational>(), r(1, 1));
                assert_eq!(*c.p.get(0, 1), r(0, 1));
                assert_eq!(*c.p.get(2, 1), r(0, 1));
                assert_eq!(*c.p.get(1, 1), r(2, 2 * b as i64));
            }
        }
    }

    #[test]
    fn nstep_examples() {
        assert_eq!(
            restricted_nstep(3, Sign::Plus, 1).unwrap(),
            Matrix::from_rows(vec![vec![br(2, 3), br(1, 3)], vec![br(1, 3), br(2, 3)]])
        );
        assert_eq!(
            restricted_nstep(3, Sign::Plus, 2).unwrap(),
            Matrix::from_rows(vec![vec![br(5, 9), br(4, 9)], vec![br(4, 9), br(5, 9)]])
        );
        for sign in [Sign::Plus, Sign::Minus] {
            assert_eq!(restricted_nstep(7, sign, 0).unwrap(), Matrix::identity(2));
        }
    }

    #[test]
    fn covariance_and_sigma2() {
        assert_eq!(chain_cov::<f64>(3, Sign::Plus, 1).unwrap(), 1.0 / 3.0);
        assert_eq!(chain_cov::<f64>(3, Sign::Minus, 1).unwrap(), -1.0 / 3.0);
        assert_eq!(chain_cov::<f64>(3, Sign::Plus, 0).unwrap(), 1.0);
        assert_eq!(chain_sigma2(3, Sign::Plus).unwrap(), r(2, 1));
        assert_eq!(chain_sigma2(3, Sign::Minus).unwrap(), r(1, 2));
        assert_eq!(chain_sigma2(5, Sign::Plus).unwrap(), r(3, 2));
        for b in [3u64, 5, 9] {
            for sign in [Sign::Plus, Sign::Minus] {
                for n in 0..12 {
                    assert_eq!(stationary_cov(b, sign, n).unwrap(), chain_cov_exact(b, sign, n).unwrap());
                }
            }
        }
    }

    #[test]
    fn sigma2_is_limit_of_covariance_series() {
        for b in [3u64, 5, 11] {
            for sign in [Sign::Plus, Sign::Minus] {
                let mut partial = BigRational::zero();
                for n in 1..=60 {
                    partial += chain_cov_exact(b, sign, n).unwrap();
                }
                let series = big_to_f64(&(BigRational::one() + br(2, 1) * partial));
                let closed = chain_sigma2(b, sign).unwrap();
                let closed = *closed.numer() as f64 / *closed.denom() as f64;
                assert!((series - closed).abs() < 1e-14);
            }
        }
    }
}
