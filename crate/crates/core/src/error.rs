use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input violates a type invariant (Hermiticity, positivity, normalization, ...).
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A configured resource cap would be exceeded.
    #[error("resource cap exceeded: {what} requires {requested}, cap is {cap}")]
    ResourceCap { what: &'static str, requested: u128, cap: u128 },

    /// A scalar function is undefined on part of the spectrum.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method ran out of iterations; carries the best iterate found.
    #[error("no convergence after {iterations} iterations (best value {best_value}, residual {residual})")]
    NoConvergence {
        iterations: usize,
        best_value: f64,
        residual: f64,
        best_point: Vec<f64>,
    },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Resource caps for enumerations and tensor powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest matrix dimension produced by tensor powers (`d^n`).
    pub max_dim: usize,
    /// Largest number of enumerated M-types.
    pub max_types: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_dim: 4096,
            max_types: 10_000_000,
        }
    }
}

impl Caps {
    pub(crate) fn check_dim(&self, what: &'static str, dim: u128) -> Result<()> {
        if dim > self.max_dim as u128 {
            Err(Error::ResourceCap {
                what,
                requested: dim,
                cap: self.max_dim as u128,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_types(&self, count: u128) -> Result<()> {
        if count > self.max_types {
            Err(Error::ResourceCap {
                what: "M-type enumeration",
                requested: count,
                cap: self.max_types,
            })
        } else {
            Ok(())
        }
    }
}

/// `base^exp` saturating at `u128::MAX`.
pub(crate) fn saturating_pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

/// Binomial coefficient, saturating.
pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}
