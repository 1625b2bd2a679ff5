//! Convergence diagnostics and posterior summaries.
//!
//! R-hat is the rank-normalized split-chain statistic (maximum of the bulk
//! and folded versions); effective sample size uses Geyer's initial
//! monotone sequence on rank-normalized split chains.

use alloc::string::String;
use alloc::vec::Vec;

use super::sampler::PosteriorDraws;
use crate::error::{Error, Result};
use crate::report::average_ranks;
use crate::special::{normal_quantile, stable_sum};

/// R-hat above this value is reported as a convergence warning.
pub const RHAT_WARN: f64 = 1.1;

pub const MIN_CHAINS: usize = 2;
pub const MIN_DRAWS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParamSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    pub q025: f64,
    pub q975: f64,
    pub rhat: f64,
    /// Bulk effective sample size.
    pub ess: f64,
    pub mcse_mean: f64,
    pub mcse_sd: f64,
    /// Post-burn-in acceptance rate averaged over chains.
    pub acceptance: f64,
    /// All draws identical within every chain.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Summary {
    pub params: Vec<ParamSummary>,
    pub fixed: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

impl Summary {
    pub fn get(&self, name: &str) -> Option<&ParamSummary> {
        self.params.iter().find(|p| p.name == name)
    }
}

fn mean(xs: &[f64]) -> f64 {
    stable_sum(xs.iter().copied()) / xs.len() as f64
}

fn var(xs: &[f64]) -> f64 {
    let m = mean(xs);
    stable_sum(xs.iter().map(|x| (x - m) * (x - m))) / (xs.len() as f64 - 1.0)
}

/// Halve every chain, dropping the middle draw of odd-length chains.
pub fn split_chains(chains: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = chains.iter().map(Vec::len).min().unwrap_or(0);
    let half = n / 2;
    let mut out = Vec::with_capacity(2 * chains.len());
    for c in chains {
        out.push(c[..half].to_vec());
        out.push(c[n - half..n].to_vec());
    }
    out
}

/// Replace draws by normal scores of their pooled average ranks.
pub fn rank_normalize(chains: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let pooled: Vec<f64> = chains.iter().flatten().copied().collect();
    let s = pooled.len() as f64;
    let ranks = average_ranks(&pooled);
    let mut out = Vec::with_capacity(chains.len());
    let mut k = 0;
    for c in chains {
        out.push(
            (0..c.len())
                .map(|_| {
                    let z = normal_quantile((ranks[k] - 0.375) / (s + 0.25));
                    k += 1;
                    z
                })
                .collect(),
        );
    }
    out
}

/// Classic potential scale reduction over equal-length chains.
pub fn rhat_basic(chains: &[Vec<f64>]) -> f64 {
    let m = chains.len() as f64;
    let n = chains[0].len() as f64;
    let means: Vec<f64> = chains.iter().map(|c| mean(c)).collect();
    let b = n * var(&means);
    let w = stable_sum(chains.iter().map(|c| var(c))) / m;
    if w == 0.0 {
        return if b == 0.0 { f64::NAN } else { f64::INFINITY };
    }
    let var_plus = (n - 1.0) / n * w + b / n;
    libm::sqrt(var_plus / w)
}

/// Rank-normalized split R-hat: the larger of the bulk and folded
/// (tail) statistics.
pub fn split_rhat(chains: &[Vec<f64>]) -> f64 {
    let split = split_chains(chains);
    let bulk = rhat_basic(&rank_normalize(&split));
    let pooled: Vec<f64> = split.iter().flatten().copied().collect();
    let med = quantile_sorted(&sorted(&pooled), 0.5);
    let folded: Vec<Vec<f64>> = split
        .iter()
        .map(|c| c.iter().map(|x| (x - med).abs()).collect())
        .collect();
    let tail = rhat_basic(&rank_normalize(&folded));
    if bulk.is_nan() || tail.is_nan() {
        return f64::NAN;
    }
    bulk.max(tail)
}

fn autocov(c: &[f64], mean: f64, lag: usize) -> f64 {
    let n = c.len();
    stable_sum((0..n - lag).map(|i| (c[i] - mean) * (c[i + lag] - mean))) / n as f64
}

/// Effective sample size of equal-length chains (Geyer initial monotone
/// sequence on the multi-chain autocorrelation estimate).
pub fn ess_basic(chains: &[Vec<f64>]) -> f64 {
    let m = chains.len();
    let n = chains[0].len();
    let nf = n as f64;
    if n < 4 {
        return 0.0;
    }
    let means: Vec<f64> = chains.iter().map(|c| mean(c)).collect();
    let acov0: Vec<f64> = chains
        .iter()
        .zip(&means)
        .map(|(c, &mu)| autocov(c, mu, 0))
        .collect();
    let mean_var = mean(&acov0) * nf / (nf - 1.0);
    let mut var_plus = mean_var * (nf - 1.0) / nf;
    if m > 1 {
        var_plus += var(&means);
    }
    if !(var_plus > 0.0) || mean_var == 0.0 {
        return 0.0;
    }

    let rho = |lag: usize| -> f64 {
        if lag == 0 {
            return 1.0;
        }
        let ac = stable_sum(
            chains
                .iter()
                .zip(&means)
                .map(|(c, &mu)| autocov(c, mu, lag)),
        ) / m as f64;
        1.0 - (mean_var - ac) / var_plus
    };

    // Pairs Γ_k = ρ_{2k} + ρ_{2k+1}, truncated at the first non-positive
    // pair and forced to be non-increasing.
    let mut tau = -1.0;
    let mut prev_pair = f64::INFINITY;
    let mut k = 0;
    while 2 * k + 1 < n {
        let mut pair = rho(2 * k) + rho(2 * k + 1);
        if pair <= 0.0 {
            break;
        }
        if pair > prev_pair {
            pair = prev_pair;
        }
        tau += 2.0 * pair;
        prev_pair = pair;
        k += 1;
    }
    let total = (m * n) as f64;
    let tau = tau.max(1.0 / libm::log10(total));
    total / tau
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(v: &[f64], p: f64) -> f64 {
    let h = (v.len() as f64 - 1.0) * p;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// Posterior summaries and convergence diagnostics for every parameter.
pub fn diagnostics(draws: &PosteriorDraws) -> Result<Summary> {
    if draws.chains.len() < MIN_CHAINS {
        return Err(Error::TooFewDraws(alloc::format!(
            "{} chains, need at least {MIN_CHAINS}",
            draws.chains.len()
        )));
    }
    let n = draws.chains.iter().map(|c| c.draws.len()).min().unwrap_or(0);
    if n < MIN_DRAWS {
        return Err(Error::TooFewDraws(alloc::format!(
            "{n} kept draws per chain, need at least {MIN_DRAWS}"
        )));
    }

    let mut params = Vec::with_capacity(draws.names.len());
    let mut warnings = Vec::new();
    for (j, name) in draws.names.iter().enumerate() {
        let chains: Vec<Vec<f64>> = draws
            .column(j)
            .into_iter()
            .map(|mut c| {
                c.truncate(n);
                c
            })
            .collect();
        let pooled: Vec<f64> = chains.iter().flatten().copied().collect();
        let mu = mean(&pooled);
        let sd = libm::sqrt(var(&pooled));
        let sv = sorted(&pooled);
        let degenerate = chains.iter().all(|c| c.iter().all(|&x| x == c[0]));

        let (rhat, ess, mcse_mean, mcse_sd) = if degenerate {
            (f64::NAN, 0.0, f64::NAN, f64::NAN)
        } else {
            let split = split_chains(&chains);
            let ess = ess_basic(&rank_normalize(&split));
            let ess_mean = ess_basic(&split);
            let centered_sq: Vec<Vec<f64>> = split
                .iter()
                .map(|c| c.iter().map(|x| (x - mu) * (x - mu)).collect())
                .collect();
            let sq_pooled: Vec<f64> = centered_sq.iter().flatten().copied().collect();
            let ess_sq = ess_basic(&centered_sq);
            // delta method: sd = sqrt(var)
            let mcse_var = libm::sqrt(var(&sq_pooled) / ess_sq);
            (
                split_rhat(&chains),
                ess,
                sd / libm::sqrt(ess_mean),
                mcse_var / (2.0 * sd),
            )
        };
        if degenerate {
            warnings.push(alloc::format!("{name}: constant draws, diagnostics undefined"));
        } else if !(rhat <= RHAT_WARN) {
            warnings.push(alloc::format!("{name}: R-hat {rhat:.3} exceeds {RHAT_WARN}"));
        }
        let acceptance = stable_sum(draws.chains.iter().map(|c| c.acceptance[j]))
            / draws.chains.len() as f64;

        params.push(ParamSummary {
            name: name.clone(),
            mean: mu,
            sd,
            median: quantile_sorted(&sv, 0.5),
            q025: quantile_sorted(&sv, 0.025),
            q975: quantile_sorted(&sv, 0.975),
            rhat,
            ess,
            mcse_mean,
            mcse_sd,
            acceptance,
            degenerate,
        });
    }
    Ok(Summary {
        params,
        fixed: draws.fixed.clone(),
        warnings,
    })
}
