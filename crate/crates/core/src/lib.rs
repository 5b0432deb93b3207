//! Interim payoff profiles achievable by information structures.
//!
//! The set of profiles is the section at the prior of the convex hull of
//! the graph of the likelihood-adjusted payoff `ŵ(μ, θ) = μ(θ)/μ0(θ)·w(μ, θ)`.
//! Everything here works on a finite belief grid and solves small LPs over
//! distributions of grid atoms.

#![allow(clippy::needless_range_loop)]

pub mod cohort;
pub mod error;
pub mod exec;
pub mod ipset;
pub mod lp;
pub mod model;
pub mod persuasion;
pub mod presets;
pub mod reputation;

pub use error::{Error, Result};
pub use exec::Execution;
pub use ipset::{
    approximate_set, boundary_profile, membership, min_signals, reduce_support, support_value, BeliefGrid, Direction,
    GridOptions, IPSetApprox, Membership, SupportSolution,
};
pub use model::{
    adjusted_payoff, interim_profile, posterior, posterior_distribution, unconditional_profile, BeliefAtom,
    BeliefDistribution, IPProfile, InformationStructure, PayoffSpec, Prior, Side, WeightedAtom,
};
