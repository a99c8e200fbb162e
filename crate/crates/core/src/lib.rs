//! Classical-quantum channel resolvability at desk scale.
//!
//! Hermitian linear algebra, cq channels and M-types, entropies and Rényi quantities,
//! capacity and fixed-input rates, exact and Monte-Carlo resolution errors, method-of-types
//! primitives and identification-code checks. Everything is generic over [`Scalar`]
//! (`f32`/`f64`); the aliases below fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod hermitian;
pub mod idcodes;
pub mod info;
pub mod rates;
pub mod resolvability;
pub mod scalar;
pub mod types;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Caps, Error, Result};
pub use scalar::{Extended, Scalar};

pub type Operator = hermitian::HermitianOperator<f64>;
pub type Density = hermitian::DensityOperator<f64>;
pub type Channel = channel::CQChannel<f64>;
pub type Dist = channel::Distribution<f64>;
pub type Code = idcodes::IDCode<f64>;
