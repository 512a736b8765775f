//! Φ-variation and power variation of Weierstraß and Takagi–van der Waerden
//! functions `f(t) = Σ α^m φ(b^m t)` along b-adic partitions.
//!
//! The numeric core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`); Markov chain matrices use exact rationals. Concrete
//! `f64` aliases are provided at the crate root.

// NaN-rejecting range checks are written as `!(x > 0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod base;
pub mod engine;
pub mod error;
pub mod matrix;
pub mod scalar;
pub mod stochastic;
pub mod summation;
pub mod theory;
pub mod variation;

pub use base::{checked_cells, PeriodicBase, CELL_CAP};
pub use engine::{AlphaMode, FractalSpec, IncrementRecord, IncrementStream, ScaledSum, CHUNK_CELLS};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::{Real, Sign};
pub use summation::CompensatedSum;
pub use theory::{clt_constant, phi_limit, variation_index, FormulaId, LimitResult, QLimit, VariationIndex};
pub use variation::{convergence_report, phi_variation, q_variation, PhiFunction, VariationReport, VariationRow};

pub type Base = PeriodicBase<f64>;
pub type Spec = FractalSpec<f64>;
pub type Increment = IncrementRecord<f64>;
pub type Report = VariationReport<f64>;
pub type Row = VariationRow<f64>;
pub type Limit = LimitResult<f64>;
pub type Path = stochastic::PathSample<f64>;

pub type Base32 = PeriodicBase<f32>;
pub type Spec32 = FractalSpec<f32>;
