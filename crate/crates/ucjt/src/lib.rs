//! Dual-engine evaluation of user-centric joint transmission in ultra-dense
//! networks.
//!
//! A user's *virtual cell* is the set of access points within radius `C`;
//! those points jointly transmit to it while co-channel users keep a minimum
//! separation `D` enforced by hard-core scheduling. The crate estimates the
//! typical user's throughput and the network's spatial throughput with two
//! independent engines:
//!
//! * [`simulator`] — a seeded Monte Carlo engine over explicit network
//!   realizations (Poisson access-point fields, Matérn hard-core user sets,
//!   Rayleigh fading), supporting four transmission schemes;
//! * [`analytic`] — adaptive quadrature over the Laplace-transform
//!   expressions for the signal and interference fields (maximum ratio
//!   transmission, first-order weight approximation, near/far interference
//!   split).
//!
//! The two engines share only the configuration types, which makes their
//! agreement a meaningful end-to-end check; the [`experiment`] module and
//! the `ucjt` binary run parameter sweeps through both and emit CSV.

pub mod analytic;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod schemes;
pub mod simulator;

pub use config::{ExperimentConfig, Mode, NetworkConfig, SweepVar};
pub use error::{Error, Result};
pub use schemes::Scheme;
