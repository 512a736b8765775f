//! Probabilistic side: the uniform digit process, the Markov chain of tent
//! increments for odd b, martingale structure of trigonometric increments
//! and CLT diagnostics.

pub mod chain;
pub mod clt;
pub mod martingale;
pub mod paths;
pub mod stats;

pub use chain::{
    chain_cov, chain_cov_exact, chain_sigma2, initial_law, restricted_nstep, restricted_one_step, transition_matrix,
    ChainSpec, Rational, STATES,
};
pub use clt::{clt_scaled_expectation, ensemble_stats, transition_check, CltEstimate, CltMode, EnsembleStats};
pub use martingale::{martingale_residual, predictable_qv};
pub use paths::{digit_rng, sample_ensemble, sample_path, sample_paths, DigitCursor, Ensemble, PathSample};
pub use stats::{equidistribution_stat, ks_normal, ks_uniform, normal_cdf};
