//! Gaussian dilations of one-mode bosonic channels: symplectic toolkit,
//! capacity estimates, truncated-Fock oracles and non-degradability witnesses.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod scalar;
pub mod symplectic;
pub mod channels;
pub mod optimize;
pub mod capacities;
pub mod fock;
pub mod degradability;

pub use error::{Error, Result};
pub use nalgebra;
pub use scalar::Scalar;

pub type CovarianceMatrix64 = symplectic::CovarianceMatrix<f64>;
pub type GaussianState64 = symplectic::GaussianState<f64>;
pub type EnergyBudget64 = symplectic::EnergyBudget<f64>;
pub type SymplecticDilation64 = channels::SymplecticDilation<f64>;
pub type TwoModeUnitary64 = channels::TwoModeUnitary<f64>;
pub type GaussianChannel64 = channels::GaussianChannel<f64>;
pub type CapacityResult64 = capacities::CapacityResult<f64>;
pub type FockOperator64 = fock::FockOperator<f64>;
pub type GammaImage64 = degradability::GammaImage<f64>;
pub type GammaImageExact = degradability::GammaImage<num_rational::BigRational>;
