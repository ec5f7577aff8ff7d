//! Truncated Fock-space simulator for continuous-variable teleportation of
//! single-photon and polarization-encoded states.
//!
//! The central object is the transfer operator
//! `T_q(β) = √((1−q²)/π) D(β) q^{n̂} D(−β)`, which maps Alice's input state
//! to Bob's (unnormalized) output conditioned on the measured field value
//! `β`. Closed-form photon statistics are provided alongside numerical
//! routes (full three-mode projection, polar quadrature, Monte Carlo) so the
//! two can be checked against each other.

pub mod error;
pub mod fock;
pub mod polarization;
pub mod quadrature;
pub mod range;
pub mod sampler;
pub mod statistics;
pub mod teleport;

pub use error::{Error, Result};
pub use fock::{FockCutoff, ModeOperator, MultiModeState, StateVector};
pub use num_complex::Complex64;
pub use polarization::{DualModeMeasurement, PolarizationOutcomeBudget};
pub use quadrature::QuadratureGrid;
pub use range::RangeSpec;
pub use sampler::{InputDescriptor, PhotonCount, SamplerConfig, ShotRecord, ShotRun, ShotSummary};
pub use statistics::{LossGainSplit, PhotonCategory, PhotonDistribution};
pub use teleport::{EntanglementParam, MeasurementOutcome};
