//! Metropolis-within-Gibbs sampling for both models.
//!
//! Each coordinate gets its own random-walk Metropolis update, visited in a
//! fixed order every sweep. Proposal scales adapt toward a target acceptance
//! rate during burn-in only. Chains are independent given `(seed, chain)`,
//! so running them on separate threads yields the same draws.

mod config;
mod diagnostics;
mod models;
mod prior;
mod sampler;

pub use config::ChainConfig;
pub use diagnostics::{
    diagnostics, ess_basic, rank_normalize, rhat_basic, split_chains, split_rhat, ParamSummary,
    Summary, MIN_CHAINS, MIN_DRAWS, RHAT_WARN,
};
pub use models::{
    count_target, fit_counts, fit_timing, timing_target, CountTarget, TimingTarget,
};
pub use prior::PriorSpec;
pub use sampler::{assemble, run_chain, ChainDraws, Model, PosteriorDraws};
