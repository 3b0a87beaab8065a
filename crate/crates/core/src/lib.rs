//! Ground states of the three-level Lipkin model under exact diagonalization,
//! Hartree-Fock, parity-projected Hartree-Fock and a one-coordinate generator
//! coordinate method, together with four-orbital reduced density matrices and
//! orbital quantum correlations (mutual information, classical correlation and
//! quantum discord under parity-respecting projective measurements).
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`). The aliases
//! exported at the crate root fix the scalar to `f64`; the generic types live
//! in their modules.

pub mod combinatorics;
pub mod discord;
pub mod error;
pub mod fock;
pub mod gcm;
pub mod mean_field;
pub mod model;
pub mod nelder_mead;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod rdm;
pub mod scalar;
pub mod scan;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type ModelParams = model::ModelParams<f64>;
pub type PqState = model::PqState<f64>;
pub type GroundState = model::GroundState<f64>;
pub type HfOrbital = mean_field::HfOrbital<f64>;
pub type FockDensity = fock::FockDensity<f64>;
pub type MeasurementParams = fock::MeasurementParams<f64>;
pub type GcmConfig = gcm::GcmConfig<f64>;
pub type GcmSolution = gcm::GcmSolution<f64>;
pub type NineStateDensity = rdm::NineStateDensity<f64>;
pub type CorrelationReport = discord::CorrelationReport<f64>;

pub type ModelParamsF32 = model::ModelParams<f32>;
pub type PqStateF32 = model::PqState<f32>;
pub type FockDensityF32 = fock::FockDensity<f32>;

pub use discord::{OptimizerConfig, Partition};
pub use fock::ModeSubset;
pub use rdm::Subsystem;
pub use scan::{run_scan, Method, ScanConfig};
