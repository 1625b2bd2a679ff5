use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::ChainConfig;
use crate::error::{Error, Result};

/// Which likelihood groups a coordinate touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    All,
    Group(usize),
}

/// A posterior factored into independent likelihood groups (categories).
///
/// Coordinates live on the sampler's scale; `natural` maps a state to the
/// reported parameter values.
pub trait Model: Sync {
    fn names(&self) -> Vec<String>;
    fn n_groups(&self) -> usize;
    fn scope(&self, coord: usize) -> Scope;
    /// Log likelihood of group `g`; `-inf` for infeasible states.
    fn group_loglik(&self, x: &[f64], g: usize) -> f64;
    fn log_prior(&self, coord: usize, value: f64) -> f64;
    /// Starting state before pre-search.
    fn initial(&self) -> Vec<f64>;
    /// Pre-search visiting order.
    fn presearch_order(&self) -> Vec<usize>;

    fn dim(&self) -> usize {
        self.names().len()
    }

    fn natural(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
}

/// Output of one chain.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainDraws {
    /// Kept draws, row-major (iteration × parameter), natural scale.
    pub draws: Vec<Vec<f64>>,
    /// Post-burn-in acceptance rate per coordinate.
    pub acceptance: Vec<f64>,
    pub scales_burn_end: Vec<f64>,
    pub scales_end: Vec<f64>,
    pub init: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PosteriorDraws {
    pub names: Vec<String>,
    pub chains: Vec<ChainDraws>,
    /// Parameters held constant, with their values.
    pub fixed: Vec<(String, f64)>,
}

impl PosteriorDraws {
    /// All draws of parameter `j`, chain by chain.
    pub fn column(&self, j: usize) -> Vec<Vec<f64>> {
        self.chains
            .iter()
            .map(|c| c.draws.iter().map(|row| row[j]).collect())
            .collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

const PROBE_OFFSETS: [f64; 20] = [
    -10.0, -8.0, -5.0, -3.0, -2.0, -1.0, -0.5, -0.2, -0.1, -0.05, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0,
    3.0, 5.0, 8.0, 10.0,
];
const INIT_JITTER_SD: f64 = 0.05;
const INIT_SCALE: f64 = 0.1;

struct State<'m, M: Model + ?Sized> {
    model: &'m M,
    prior_only: bool,
    x: Vec<f64>,
    group_ll: Vec<f64>,
}

impl<'m, M: Model + ?Sized> State<'m, M> {
    fn new(model: &'m M, x: Vec<f64>, prior_only: bool) -> Self {
        let mut s = Self {
            model,
            prior_only,
            x,
            group_ll: vec![0.0; model.n_groups()],
        };
        if !prior_only {
            for g in 0..model.n_groups() {
                s.group_ll[g] = model.group_loglik(&s.x, g);
            }
        }
        s
    }

    fn log_posterior(&self) -> f64 {
        let prior: f64 = (0..self.x.len())
            .map(|i| self.model.log_prior(i, self.x[i]))
            .sum();
        prior + self.group_ll.iter().sum::<f64>()
    }

    /// Log posterior terms that depend on `coord`, at the current state and
    /// with `coord` set to `value`. Returns the new group values for reuse.
    fn propose(&mut self, coord: usize, value: f64) -> (f64, f64, Vec<(usize, f64)>) {
        let old_value = self.x[coord];
        let prior_old = self.model.log_prior(coord, old_value);
        let prior_new = self.model.log_prior(coord, value);
        if self.prior_only {
            return (prior_old, prior_new, Vec::new());
        }
        let groups: Vec<usize> = match self.model.scope(coord) {
            Scope::All => (0..self.model.n_groups()).collect(),
            Scope::Group(g) => vec![g],
        };
        self.x[coord] = value;
        let mut new_lls = Vec::with_capacity(groups.len());
        let mut old_sum = 0.0;
        let mut new_sum = 0.0;
        for g in groups {
            old_sum += self.group_ll[g];
            let ll = self.model.group_loglik(&self.x, g);
            new_sum += ll;
            new_lls.push((g, ll));
            if ll == f64::NEG_INFINITY {
                break;
            }
        }
        self.x[coord] = old_value;
        (prior_old + old_sum, prior_new + new_sum, new_lls)
    }

    fn accept(&mut self, coord: usize, value: f64, new_lls: Vec<(usize, f64)>) {
        self.x[coord] = value;
        for (g, ll) in new_lls {
            self.group_ll[g] = ll;
        }
    }
}

fn chain_rng(seed: u64, chain: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain as u64);
    rng
}

/// Deterministic coordinate-wise probe search from the model's initial
/// state, shared by every chain.
fn presearch<M: Model + ?Sized>(model: &M, prior_only: bool) -> Vec<f64> {
    let mut state = State::new(model, model.initial(), prior_only);
    for coord in model.presearch_order() {
        let base = state.x[coord];
        let (cur, _, _) = state.propose(coord, base);
        let mut best = (cur, base, None);
        for off in PROBE_OFFSETS {
            let (_, lp, lls) = state.propose(coord, base + off);
            if lp.is_finite() && (lp > best.0 || !best.0.is_finite()) {
                best = (lp, base + off, Some(lls));
            }
        }
        if let (_, v, Some(lls)) = best {
            state.accept(coord, v, lls);
        }
    }
    state.x
}

/// Run one chain of the Metropolis-within-Gibbs sampler.
pub fn run_chain<M: Model + ?Sized>(model: &M, cfg: &ChainConfig, chain: usize) -> Result<ChainDraws> {
    cfg.validate()?;
    let dim = model.dim();
    let mut rng = chain_rng(cfg.seed, chain);

    let start = presearch(model, cfg.prior_only);
    let mut state = State::new(model, start, cfg.prior_only);
    if !state.log_posterior().is_finite() {
        return Err(Error::NonFinite(alloc::format!(
            "no finite starting point found (chain {chain})"
        )));
    }
    for coord in 0..dim {
        let z: f64 = rng.sample(StandardNormal);
        let v = state.x[coord] + INIT_JITTER_SD * z;
        let (_, lp, lls) = state.propose(coord, v);
        if lp.is_finite() {
            state.accept(coord, v, lls);
        }
    }
    let init = model.natural(&state.x);

    let mut log_scale = vec![libm::log(INIT_SCALE); dim];
    let mut accepted = vec![0usize; dim];
    let mut draws = Vec::with_capacity(cfg.kept_per_chain());
    let mut scales_burn_end = Vec::new();

    let total = cfg.n_burn + cfg.n_keep;
    for it in 1..=total {
        let burning = it <= cfg.n_burn;
        for coord in 0..dim {
            let z: f64 = rng.sample(StandardNormal);
            let proposal = state.x[coord] + libm::exp(log_scale[coord]) * z;
            let (old, new, lls) = state.propose(coord, proposal);
            let u: f64 = rng.random();
            let log_ratio = new - old;
            let ok = new.is_finite() && (log_ratio >= 0.0 || libm::log(u) < log_ratio);
            if ok {
                state.accept(coord, proposal, lls);
            }
            if burning {
                // Robbins–Monro step on the log proposal scale
                let gain = libm::pow(it as f64, -0.6);
                let a = if ok { 1.0 } else { 0.0 };
                log_scale[coord] += gain * (a - cfg.adapt_target);
            } else if ok {
                accepted[coord] += 1;
            }
        }
        if it == cfg.n_burn {
            scales_burn_end = log_scale.iter().map(|&l| libm::exp(l)).collect();
        }
        if !burning && (it - cfg.n_burn) % cfg.thin == 0 {
            let row = model.natural(&state.x);
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(alloc::format!(
                    "non-finite draw at iteration {it} (chain {chain})"
                )));
            }
            draws.push(row);
        }
    }

    Ok(ChainDraws {
        draws,
        acceptance: accepted
            .iter()
            .map(|&a| a as f64 / cfg.n_keep as f64)
            .collect(),
        scales_burn_end,
        scales_end: log_scale.iter().map(|&l| libm::exp(l)).collect(),
        init,
    })
}

/// Collect chains (already ordered by chain index) into one draw set.
pub fn assemble<M: Model + ?Sized>(
    model: &M,
    chains: Vec<ChainDraws>,
    fixed: Vec<(String, f64)>,
) -> PosteriorDraws {
    PosteriorDraws {
        names: model.names(),
        chains,
        fixed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    /// One normal mean with known variance, observed `n` times.
    struct NormalMean {
        obs: Vec<f64>,
        noise_var: f64,
        prior_var: f64,
    }

    impl Model for NormalMean {
        fn names(&self) -> Vec<String> {
            vec!["mu".to_string()]
        }
        fn n_groups(&self) -> usize {
            1
        }
        fn scope(&self, _: usize) -> Scope {
            Scope::All
        }
        fn group_loglik(&self, x: &[f64], _: usize) -> f64 {
            self.obs
                .iter()
                .map(|y| -0.5 * (y - x[0]) * (y - x[0]) / self.noise_var)
                .sum()
        }
        fn log_prior(&self, _: usize, v: f64) -> f64 {
            -0.5 * v * v / self.prior_var
        }
        fn initial(&self) -> Vec<f64> {
            vec![0.0]
        }
        fn presearch_order(&self) -> Vec<usize> {
            vec![0]
        }
    }

    #[test]
    fn conjugate_normal_posterior() {
        let obs: Vec<f64> = (0..20).map(|i| 1.0 + 0.1 * (i as f64 - 9.5)).collect();
        let m = NormalMean {
            obs: obs.clone(),
            noise_var: 4.0,
            prior_var: 100.0,
        };
        let prec = 1.0 / 100.0 + obs.len() as f64 / 4.0;
        let post_var = 1.0 / prec;
        let post_mean = post_var * obs.iter().sum::<f64>() / 4.0;

        let cfg = ChainConfig {
            seed: 11,
            n_burn: 2000,
            n_keep: 40_000,
            thin: 2,
            n_chains: 1,
            ..ChainConfig::default()
        };
        let c = run_chain(&m, &cfg, 0).unwrap();
        let xs: Vec<f64> = c.draws.iter().map(|r| r[0]).collect();
        let chains = vec![xs.clone()];
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        let ess = super::super::ess_basic(&chains);
        let mcse = (var / ess).sqrt();
        assert!((mean - post_mean).abs() < 3.0 * mcse, "{mean} vs {post_mean}");
        let sd_mcse = var.sqrt() / (2.0 * ess).sqrt();
        assert!(
            (var.sqrt() - post_var.sqrt()).abs() < 3.0 * sd_mcse,
            "{} vs {}",
            var.sqrt(),
            post_var.sqrt()
        );
        assert_eq!(c.scales_burn_end, c.scales_end);
        assert!(c.acceptance[0] > 0.1 && c.acceptance[0] < 0.6);
    }

    #[test]
    fn same_seed_same_draws() {
        let m = NormalMean {
            obs: vec![0.3, -0.2, 1.1],
            noise_var: 1.0,
            prior_var: 100.0,
        };
        let cfg = ChainConfig {
            seed: 5,
            n_burn: 100,
            n_keep: 200,
            thin: 1,
            ..ChainConfig::default()
        };
        let a = run_chain(&m, &cfg, 2).unwrap();
        let b = run_chain(&m, &cfg, 2).unwrap();
        assert_eq!(a, b);
        let c = run_chain(&m, &cfg, 3).unwrap();
        assert_ne!(a.draws, c.draws);
    }
}
