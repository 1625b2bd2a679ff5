//! Chains on worker threads. Each chain owns its RNG stream, and results
//! are merged by chain index, so output does not depend on thread count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use auction_bids_core::count::SupportShift;
use auction_bids_core::data::Dataset;
use auction_bids_core::mcmc::{
    assemble, count_target, diagnostics, run_chain, timing_target, ChainConfig, ChainDraws, Model,
    PosteriorDraws, PriorSpec, Summary,
};

use crate::error::CliResult;

pub fn run_chains<M: Model>(
    model: &M,
    cfg: &ChainConfig,
    threads: usize,
) -> CliResult<Vec<ChainDraws>> {
    let workers = threads.clamp(1, cfg.n_chains);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<auction_bids_core::Result<ChainDraws>>>> =
        Mutex::new((0..cfg.n_chains).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let chain = next.fetch_add(1, Ordering::Relaxed);
                if chain >= cfg.n_chains {
                    break;
                }
                let out = run_chain(model, cfg, chain);
                slots.lock().expect("chain slot lock")[chain] = Some(out);
            });
        }
    });
    let mut chains = Vec::with_capacity(cfg.n_chains);
    for slot in slots.into_inner().expect("chain slot lock") {
        chains.push(slot.expect("every chain ran")?);
    }
    Ok(chains)
}

pub fn fit_timing(
    data: &Dataset,
    prior: &PriorSpec,
    cfg: &ChainConfig,
    threads: usize,
) -> CliResult<(PosteriorDraws, Summary)> {
    let target = timing_target(data, prior, cfg)?;
    let chains = run_chains(&target, cfg, threads)?;
    let draws = assemble(&target, chains, Vec::new());
    let summary = diagnostics(&draws)?;
    Ok((draws, summary))
}

pub fn fit_counts(
    data: &Dataset,
    prior: &PriorSpec,
    cfg: &ChainConfig,
    shift: SupportShift,
    threads: usize,
) -> CliResult<(PosteriorDraws, Summary)> {
    let target = count_target(data, prior, cfg, shift)?;
    let chains = run_chains(&target, cfg, threads)?;
    let draws = assemble(&target, chains, target.fixed());
    let summary = diagnostics(&draws)?;
    Ok((draws, summary))
}

/// Worker count when none is given.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
