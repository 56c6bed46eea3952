//! Privacy amplification for Rényi-DP parameters released through Bernoulli samples.
//!
//! A parameter `θ ∈ [c, 1-c]^d` drawn from a Rényi-DP mechanism is released
//! as `k` independent samples of `Bern(θ)`. This crate computes how much the
//! release amplifies privacy: the bounds of [`bounds`], the exact value of
//! [`solver::exact_post`], and parameter sweeps over both.

pub mod bern;
pub mod bounds;
pub mod cli;
pub mod error;
mod optim;
pub mod renyi;
pub mod solver;
pub mod sweep;
pub mod validate;

pub use bern::{AmpParams, CornerDist, OutcomeDist, PushforwardKernel};
pub use bounds::{bounds_report, BoundsBundle, Regime};
pub use error::{Error, Result};
pub use renyi::{r_alpha, r_alpha_inverse, renyi_divergence, Alpha, LogScalar, MassVector};
pub use solver::{exact_post, OptResult, SolverConfig, SolverStatus, Strategy};
