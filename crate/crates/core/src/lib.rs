//! Density-matrix quantum-circuit simulator and training toolkit: a fully
//! quantum autoencoder with mixed-state latents, pluggable divergences,
//! global/instance objectives, derivative-free training, and a
//! quantum-kernel SVM — all at desk scale (2-4 data qubits).
//!
//! Everything numeric is generic over [`Scalar`] (f32 or f64); the `*64`
//! aliases below are the concrete types used by the CLI and tests.

pub mod channel;
pub mod config;
pub mod data;
pub mod error;
pub mod linalg;
pub mod losses;
pub mod metrics;
pub mod objective;
pub mod optim;
pub mod qsvc;
pub mod qstate;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use rng::Rng;
pub use scalar::Scalar;

/// f64 concrete aliases (the default precision).
pub type CMatrix64 = linalg::CMatrix<f64>;
pub type DensityMatrix64 = qstate::DensityMatrix<f64>;
pub type GlobalState64 = qstate::GlobalState<f64>;
pub type AnsatzParams64 = channel::AnsatzParams<f64>;
pub type CostObservable64 = losses::CostObservable<f64>;
