//! Bound entangled states from unextendible product bases (UPBs), their
//! entanglement witnesses, and explicit radii of balls that contain only
//! PPT entangled states.
//!
//! The numerical core is generic over the real scalar [`Real`] (`f32` or
//! `f64`); the aliases below fix it to `f64`, which every tolerance in the
//! crate is stated for.

pub mod error;
pub mod linalg;
pub mod montecarlo;
pub mod operator;
pub mod oracle;
pub mod robustness;
pub mod scalar;
pub mod streams;
pub mod upb;
pub mod witness;

pub use error::{Error, Result};
pub use scalar::Real;

pub type CMatrix = linalg::CMatrix<f64>;
pub type EigenDecomposition = linalg::EigenDecomposition<f64>;
pub type HermitianOperator = operator::HermitianOperator<f64>;
pub type DensityMatrix = operator::DensityMatrix<f64>;
pub type ProductState = upb::ProductState<f64>;
pub type UpbSet = upb::UpbSet<f64>;
pub type LambdaResult = witness::LambdaResult<f64>;
pub type Witness = witness::Witness<f64>;
pub type UpbWitness = witness::UpbWitness<f64>;
pub type LineFamily = robustness::LineFamily<f64>;
pub type RadiusInputs = robustness::RadiusInputs<f64>;

pub type HermitianOperatorF32 = operator::HermitianOperator<f32>;
pub type DensityMatrixF32 = operator::DensityMatrix<f32>;
pub type UpbSetF32 = upb::UpbSet<f32>;

pub use operator::{Bipartition, HilbertStructure};
pub use robustness::{RadiusMode, RobustnessProfile};
pub use witness::SeesawConfig;
