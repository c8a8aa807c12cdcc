//! Exact delay laws for frame-slotted multi-hop causal paths and synthesis of
//! the minimal temporal window of integration (TWI) that meets a global
//! delivery-reliability target.
//!
//! The crate is organised bottom-up:
//!
//! * [`delay_components`] builds the PMF and moments of every elementary
//!   delay constituent (propagation, computation, grant-based access,
//!   grant-free hops).
//! * [`path_model`] composes them into the end-to-end law of a causal path
//!   and its drop probability.
//! * [`optimizer`] solves for the minimal TWI with Cantelli margins and
//!   computes the uniform water-filling baseline.
//! * [`monte_carlo`] provides seeded samplers and random topologies.
//! * [`experiments`] runs the fixed scenarios and parameter sweeps.

// Negated comparisons are used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod delay_components;
pub mod error;
pub mod experiments;
pub mod monte_carlo;
pub mod optimizer;
pub mod path_model;
pub mod quadrature;
pub mod stage;

pub use delay_components::{
    event_propagation_moments, n1_pmf, n2_pmf, truncated_geometric_moments,
    truncated_geometric_pmf, zeta_from_snr, ComputationSpec, PropagationKind, PropagationSpec,
    RetrySpec,
};
pub use error::{Result, TwiError};
pub use optimizer::{
    alpha_cap, cantelli_theta, feasibility_phi, solve_min_twi, solve_uniform_baseline,
    PathAllocation, Policy, ReliabilityBudget, TwiSolution, ALPHA_MIN,
};
pub use path_model::{drop_probability, summarize_path, HopSpec, PathSpec, PathSummary};
pub use stage::{FrameTime, StageDistribution};
