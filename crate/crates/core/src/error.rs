use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("b^{level} with b = {b} exceeds the 64-bit level cap")]
    Overflow { b: u64, level: u32 },

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("{0}")]
    Range(String),

    #[error("increment |Δ| = {magnitude} at level {level}, cell {cell} is outside the domain [0, 1) of Φ")]
    PhiDomain { level: u32, cell: u64, magnitude: f64 },

    #[error("operation requires critical roughness |α| = 1/b")]
    Mode,

    #[error("b = {0} must be odd and at least 3")]
    Parity(u64),

    #[error("operation requires the trigonometric base")]
    Base,

    #[error("no closed-form limit for this base")]
    UnsupportedBase,
}

impl Error {
    /// Stable machine-readable error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Overflow { .. } => "OverflowError",
            Error::InvalidTolerance(_) => "InvalidTolerance",
            Error::Range(_) => "RangeError",
            Error::PhiDomain { .. } => "PhiDomainError",
            Error::Mode => "ModeError",
            Error::Parity(_) => "ParityError",
            Error::Base => "BaseError",
            Error::UnsupportedBase => "UnsupportedBase",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
