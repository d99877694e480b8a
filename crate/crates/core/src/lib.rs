//! Transition probability of a derivative-coupled Unruh-DeWitt detector in
//! Minkowski space, the Einstein cylinder, the Poincare patch of AdS2 and the
//! AdS2 time machine obtained by identifying Poincare points under a dilation.
//!
//! Numerical routines are generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the aliases below fix double precision.

// `!(x > 0)` rejects NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod kernels;
pub mod plot;
pub mod quadrature;
pub mod response;
pub mod scalar;
pub mod special;
pub mod sweep;
pub mod validation;

pub use error::{Error, Result};

pub type EinsteinCylinder = kernels::EinsteinCylinder<f64>;
pub type PoincareAdS2 = kernels::PoincareAdS2<f64>;
pub type TimeMachine = kernels::TimeMachine<f64>;
pub type Geometry = kernels::Geometry<f64>;
pub type QuadratureConfig = quadrature::QuadratureConfig<f64>;
pub type DetectorConfig = response::DetectorConfig<f64>;
pub type ResponseResult = response::ResponseResult<f64>;
pub type TimeMachineOptions = response::TimeMachineOptions<f64>;
