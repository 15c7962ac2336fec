//! Two-line Cramér–Lundberg risk model in which each line covers the other's
//! deficits at a proportional cost.
//!
//! The crate computes survival probabilities two ways: by exact event-driven
//! simulation of the coupled surplus process, and through the closed-form
//! Laplace-transform solution built from Wiener–Hopf factors of two auxiliary
//! compound Poisson processes. The two routes are cross-checked by the
//! validation harness.

pub mod distributions;
pub mod error;
pub mod harness;
pub mod ladder_wh;
pub mod mc;
pub mod risk_model;
pub mod simulator;
pub mod transforms;

pub use distributions::{ClaimDistribution, JointAtom, JointClaimDistribution};
pub use error::{Error, Result};
pub use mc::McEstimate;
pub use risk_model::{CommonShock, CoverageModel, NetProfit, RiskProcess, TransferCost};
