use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::config::ChainConfig;
use super::diagnostics::{diagnostics, Summary};
use super::prior::PriorSpec;
use super::sampler::{assemble, run_chain, Model, PosteriorDraws, Scope};
use crate::cmp::{self, CmpParams};
use crate::count::SupportShift;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::special::{ln_beta, NeumaierSum};

/// Posterior of `(η, θ, δ, ψ'_1..C)` given timing observations.
#[derive(Debug, Clone)]
pub struct TimingTarget {
    prior: PriorSpec,
    /// Per category, observations pooled by log-experience.
    groups: Vec<Vec<PooledRatios>>,
}

/// Ratios sharing one log-experience value share both Beta shapes.
#[derive(Debug, Clone, Copy)]
struct PooledRatios {
    log_exp: f64,
    n: f64,
    sum_ln_r: f64,
    sum_ln_1mr: f64,
}

impl TimingTarget {
    pub fn categories(&self) -> usize {
        self.groups.len()
    }
}

const ETA: usize = 0;
const THETA: usize = 1;
const DELTA: usize = 2;

impl Model for TimingTarget {
    fn names(&self) -> Vec<String> {
        let mut names = vec!["eta".to_string(), "theta".to_string(), "delta".to_string()];
        names.extend((1..=self.categories()).map(|c| format!("psi_late[{c}]")));
        names
    }

    fn n_groups(&self) -> usize {
        self.groups.len()
    }

    fn scope(&self, coord: usize) -> Scope {
        if coord < 3 {
            Scope::All
        } else {
            Scope::Group(coord - 3)
        }
    }

    fn group_loglik(&self, x: &[f64], g: usize) -> f64 {
        let (eta, theta, delta, psi) = (x[ETA], x[THETA], x[DELTA], x[3 + g]);
        let mut sum = NeumaierSum::new();
        for cell in &self.groups[g] {
            let a = libm::exp(eta + theta * cell.log_exp);
            let b = libm::exp(psi + delta * cell.log_exp);
            sum.add((a - 1.0) * cell.sum_ln_r);
            sum.add((b - 1.0) * cell.sum_ln_1mr);
            sum.add(-cell.n * ln_beta(a, b));
        }
        let v = sum.value();
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    }

    fn log_prior(&self, _coord: usize, value: f64) -> f64 {
        self.prior.log_normal(value)
    }

    fn initial(&self) -> Vec<f64> {
        vec![self.prior.normal_mean; 3 + self.categories()]
    }

    fn presearch_order(&self) -> Vec<usize> {
        (3..3 + self.categories()).chain(0..3).collect()
    }
}

pub fn timing_target(data: &Dataset, prior: &PriorSpec, cfg: &ChainConfig) -> Result<TimingTarget> {
    prior.validate()?;
    cfg.validate()?;
    if data.categories == 0 {
        return Err(Error::Empty("dataset has no categories"));
    }
    if data.timing.is_empty() && !cfg.prior_only {
        return Err(Error::Empty("timing observations"));
    }
    data.validate()?;
    let mut pooled: Vec<BTreeMap<u64, PooledRatios>> = vec![BTreeMap::new(); data.categories];
    for t in &data.timing {
        let cell = pooled[t.category - 1]
            .entry(t.log_exp.to_bits())
            .or_insert(PooledRatios {
                log_exp: t.log_exp,
                n: 0.0,
                sum_ln_r: 0.0,
                sum_ln_1mr: 0.0,
            });
        cell.n += 1.0;
        cell.sum_ln_r += libm::log(t.r);
        cell.sum_ln_1mr += libm::log1p(-t.r);
    }
    Ok(TimingTarget {
        prior: *prior,
        groups: pooled.into_iter().map(|m| m.into_values().collect()).collect(),
    })
}

/// Posterior of `(γ, [ν], ψ''_1..C)` given count observations. A free `ν`
/// is sampled as `ln ν`.
#[derive(Debug, Clone)]
pub struct CountTarget {
    prior: PriorSpec,
    fixed_nu: Option<f64>,
    /// Per category, observations pooled by log-experience.
    groups: Vec<Vec<Pooled>>,
    table: cmp::FactorialTable,
}

/// Observations sharing one log-experience value: they share `λ`, so the
/// normalizer is evaluated once for all of them.
#[derive(Debug, Clone, Copy)]
struct Pooled {
    log_exp: f64,
    n: f64,
    sum_k: f64,
    sum_ln_fact: f64,
}

impl CountTarget {
    pub fn categories(&self) -> usize {
        self.groups.len()
    }

    fn offset(&self) -> usize {
        if self.fixed_nu.is_some() {
            1
        } else {
            2
        }
    }

    fn nu(&self, x: &[f64]) -> f64 {
        match self.fixed_nu {
            Some(v) => v,
            None => libm::exp(x[1]),
        }
    }

    pub fn fixed(&self) -> Vec<(String, f64)> {
        match self.fixed_nu {
            Some(v) => vec![("nu".to_string(), v)],
            None => Vec::new(),
        }
    }
}

impl Model for CountTarget {
    fn names(&self) -> Vec<String> {
        let mut names = vec!["gamma".to_string()];
        if self.fixed_nu.is_none() {
            names.push("nu".to_string());
        }
        names.extend((1..=self.categories()).map(|c| format!("psi_multi[{c}]")));
        names
    }

    fn n_groups(&self) -> usize {
        self.groups.len()
    }

    fn scope(&self, coord: usize) -> Scope {
        let off = self.offset();
        if coord < off {
            Scope::All
        } else {
            Scope::Group(coord - off)
        }
    }

    fn group_loglik(&self, x: &[f64], g: usize) -> f64 {
        let gamma = x[0];
        let nu = self.nu(x);
        let psi = x[self.offset() + g];
        if !nu.is_finite() {
            return f64::NEG_INFINITY;
        }
        let mut sum = NeumaierSum::new();
        for cell in &self.groups[g] {
            let ln_lambda = psi + gamma * cell.log_exp;
            let p = CmpParams {
                lambda: libm::exp(ln_lambda),
                nu,
            };
            match cmp::log_normalizer_cached(&p, &self.table) {
                Ok(z) if z.is_finite() => {
                    sum.add(cell.sum_k * ln_lambda);
                    sum.add(-nu * cell.sum_ln_fact);
                    sum.add(-cell.n * z);
                }
                _ => return f64::NEG_INFINITY,
            }
        }
        sum.value()
    }

    fn log_prior(&self, coord: usize, value: f64) -> f64 {
        if self.fixed_nu.is_none() && coord == 1 {
            self.prior.log_nu_on_log_scale(value)
        } else {
            self.prior.log_normal(value)
        }
    }

    fn initial(&self) -> Vec<f64> {
        let mut x = vec![self.prior.normal_mean; self.offset() + self.categories()];
        if self.fixed_nu.is_none() {
            x[1] = 0.0; // ν = 1
        }
        x
    }

    fn presearch_order(&self) -> Vec<usize> {
        let off = self.offset();
        (off..off + self.categories()).chain(0..off).collect()
    }

    fn natural(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        if self.fixed_nu.is_none() {
            out[1] = libm::exp(x[1]);
        }
        out
    }
}

pub fn count_target(
    data: &Dataset,
    prior: &PriorSpec,
    cfg: &ChainConfig,
    shift: SupportShift,
) -> Result<CountTarget> {
    prior.validate()?;
    cfg.validate()?;
    if data.categories == 0 {
        return Err(Error::Empty("dataset has no categories"));
    }
    if data.counts.is_empty() && !cfg.prior_only {
        return Err(Error::Empty("count observations"));
    }
    data.validate()?;
    let table = cmp::FactorialTable::default();
    let mut pooled: Vec<BTreeMap<u64, Pooled>> = vec![BTreeMap::new(); data.categories];
    for c in &data.counts {
        let k = shift.to_support(c.bids);
        let cell = pooled[c.category - 1]
            .entry(c.log_exp.to_bits())
            .or_insert(Pooled {
                log_exp: c.log_exp,
                n: 0.0,
                sum_k: 0.0,
                sum_ln_fact: 0.0,
            });
        cell.n += 1.0;
        cell.sum_k += k as f64;
        cell.sum_ln_fact += table.ln_factorial(k);
    }
    Ok(CountTarget {
        prior: *prior,
        fixed_nu: cfg.fix_nu_at,
        groups: pooled.into_iter().map(|m| m.into_values().collect()).collect(),
        table,
    })
}

fn run_all<M: Model>(model: &M, cfg: &ChainConfig, fixed: Vec<(String, f64)>) -> Result<(PosteriorDraws, Summary)> {
    let chains = (0..cfg.n_chains)
        .map(|c| run_chain(model, cfg, c))
        .collect::<Result<Vec<_>>>()?;
    let draws = assemble(model, chains, fixed);
    let summary = diagnostics(&draws)?;
    Ok((draws, summary))
}

/// Sample the timing-model posterior, running chains one after another.
pub fn fit_timing(data: &Dataset, prior: &PriorSpec, cfg: &ChainConfig) -> Result<(PosteriorDraws, Summary)> {
    let target = timing_target(data, prior, cfg)?;
    run_all(&target, cfg, Vec::new())
}

/// Sample the count-model posterior (shifted support), running chains one
/// after another.
pub fn fit_counts(data: &Dataset, prior: &PriorSpec, cfg: &ChainConfig) -> Result<(PosteriorDraws, Summary)> {
    let target = count_target(data, prior, cfg, SupportShift::Shifted)?;
    let fixed = target.fixed();
    run_all(&target, cfg, fixed)
}
