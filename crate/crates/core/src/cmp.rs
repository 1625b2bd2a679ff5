//! Conway–Maxwell–Poisson distribution.
//!
//! `P(K = k) = λ^k / (k!)^ν / Z(λ, ν)` on `k = 0, 1, 2, ...`, with
//! `Z(λ, ν) = Σ_j λ^j / (j!)^ν`. `ν = 1` is Poisson, `ν = 0` (with
//! `λ < 1`) is geometric and `ν → ∞` tends to Bernoulli.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::special::{ln_factorial, stable_sum};

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 100_000;

/// Relative size below which a term (and the remaining tail) is dropped.
const REL_TOL: f64 = 1e-15;

/// Parameters `(λ, ν)` of a COM-Poisson law.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CmpParams {
    pub lambda: f64,
    pub nu: f64,
}

impl CmpParams {
    pub fn new(lambda: f64, nu: f64) -> Result<Self> {
        let p = Self { lambda, nu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "lambda must be positive and finite, got {}",
                self.lambda
            )));
        }
        if !(self.nu.is_finite() && self.nu >= 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "nu must be non-negative and finite, got {}",
                self.nu
            )));
        }
        if self.nu == 0.0 && self.lambda >= 1.0 {
            return Err(Error::Divergent {
                lambda: self.lambda,
            });
        }
        Ok(())
    }
}

/// `ln k!` for small `k`, precomputed for repeated normalizer evaluations.
/// Entries are bitwise equal to [`ln_factorial`].
#[derive(Debug, Clone, PartialEq)]
pub struct FactorialTable {
    ln_k: Vec<f64>,
    ln_fact: Vec<f64>,
}

impl FactorialTable {
    pub fn new(size: usize) -> Self {
        let size = size.max(1);
        Self {
            ln_k: (0..size).map(|k| libm::log(k as f64)).collect(),
            ln_fact: (0..size as u64).map(ln_factorial).collect(),
        }
    }

    #[inline]
    pub fn ln_factorial(&self, k: u64) -> f64 {
        match self.ln_fact.get(k as usize) {
            Some(&v) => v,
            None => ln_factorial(k),
        }
    }

    #[inline]
    fn ln(&self, k: u64) -> f64 {
        match self.ln_k.get(k as usize) {
            Some(&v) => v,
            None => libm::log(k as f64),
        }
    }
}

impl Default for FactorialTable {
    fn default() -> Self {
        Self::new(512)
    }
}

/// Log of the unnormalized series terms `ln(λ^k / (k!)^ν)` for `k = 0..=K`,
/// where `K` is the truncation point, together with `ln Z` over the same
/// terms.
///
/// Summation stops once the index is past the mode (the next ratio
/// `λ / (k+1)^ν` is below one), the next term is below `1e-15` of the running
/// sum, and the geometric bound on the remaining tail is below the same
/// threshold. Past the mode the ratio is non-increasing, so the bound holds.
/// The final `ln Z` is recomputed from the kept terms, shifted by the
/// largest, then raised by a few ulps if needed so that the probabilities
/// `exp(log_kernel(k) − ln Z)` never sum above one.
fn series(p: &CmpParams, table: Option<&FactorialTable>) -> Result<(Vec<f64>, f64)> {
    p.validate()?;
    let ln_lambda = libm::log(p.lambda);
    let ln_fact = |k: u64| match table {
        Some(t) => t.ln_factorial(k),
        None => ln_factorial(k),
    };
    let ln_k = |k: u64| match table {
        Some(t) => t.ln(k),
        None => libm::log(k as f64),
    };

    let mut terms = Vec::with_capacity(64);
    terms.push(0.0);
    // running sum is `exp(top) * scaled`
    let mut top = 0.0;
    let mut scaled = 1.0;

    for k in 1..MAX_TERMS as u64 {
        let log_ratio = ln_lambda - p.nu * ln_k(k);
        let next = kernel(k, ln_lambda, p.nu, ln_fact);
        let rel = libm::exp(next - top);
        if log_ratio < 0.0 && rel < REL_TOL * scaled {
            let r = libm::exp(log_ratio);
            if rel / (1.0 - r) < REL_TOL * scaled {
                let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let sum = stable_sum(terms.iter().map(|&t| libm::exp(t - max)));
                let log_z = round_up_to_unit_mass(&terms, max + libm::log(sum));
                return Ok((terms, log_z));
            }
        }
        if next > top {
            scaled = scaled / rel + 1.0;
            top = next;
        } else {
            scaled += rel;
        }
        terms.push(next);
    }
    Err(Error::TruncationCap { cap: MAX_TERMS })
}

/// Smallest `ln Z` at or above `log_z` whose probabilities
/// `exp(t − ln Z)` sum to at most one in floating point.
fn round_up_to_unit_mass(terms: &[f64], mut log_z: f64) -> f64 {
    for _ in 0..16 {
        if stable_sum(terms.iter().map(|&t| libm::exp(t - log_z))) <= 1.0 {
            break;
        }
        log_z = log_z.next_up();
    }
    log_z
}

#[inline]
fn kernel(k: u64, ln_lambda: f64, nu: f64, ln_fact: impl Fn(u64) -> f64) -> f64 {
    let lk = if k == 0 { 0.0 } else { k as f64 * ln_lambda };
    if nu == 0.0 {
        lk
    } else {
        lk - nu * ln_fact(k)
    }
}

/// `ln Z(λ, ν)` by direct log-space series summation.
pub fn log_normalizer_series(p: &CmpParams) -> Result<f64> {
    series(p, None).map(|(_, z)| z)
}

/// `ln Z(λ, ν)`.
///
/// Uses the exact closed forms for the geometric (`ν = 0`) and Poisson
/// (`ν = 1`) cases and the truncated series otherwise.
pub fn log_normalizer(p: &CmpParams) -> Result<f64> {
    closed_form(p)?.map_or_else(|| log_normalizer_series(p), Ok)
}

/// [`log_normalizer`] with factorials looked up in `table`; the result is
/// identical.
pub fn log_normalizer_cached(p: &CmpParams, table: &FactorialTable) -> Result<f64> {
    closed_form(p)?.map_or_else(|| series(p, Some(table)).map(|(_, z)| z), Ok)
}

fn closed_form(p: &CmpParams) -> Result<Option<f64>> {
    p.validate()?;
    Ok(if p.nu == 0.0 {
        Some(-libm::log1p(-p.lambda))
    } else if p.nu == 1.0 {
        Some(p.lambda)
    } else {
        None
    })
}

/// Unnormalized log term `k ln λ − ν ln k!`.
#[inline]
pub fn log_kernel(k: u64, p: &CmpParams) -> f64 {
    kernel(k, libm::log(p.lambda), p.nu, ln_factorial)
}

/// `ln P(K = k)`.
pub fn log_pmf(k: u64, p: &CmpParams) -> Result<f64> {
    Ok(log_kernel(k, p) - log_normalizer(p)?)
}

/// Probability table `P(K = k)` for `k = 0..=K` over the truncated support.
pub fn pmf_table(p: &CmpParams) -> Result<Vec<f64>> {
    let (terms, log_z) = series(p, None)?;
    Ok(terms.into_iter().map(|t| libm::exp(t - log_z)).collect())
}

/// `E[K]`, summed over the truncated support.
pub fn mean(p: &CmpParams) -> Result<f64> {
    let table = pmf_table(p)?;
    Ok(stable_sum(
        table.iter().enumerate().map(|(k, &pk)| k as f64 * pk),
    ))
}

/// Inverse-CDF sampler over a precomputed table.
#[derive(Debug, Clone)]
pub struct CmpSampler {
    cdf: Vec<f64>,
}

impl CmpSampler {
    pub fn new(p: &CmpParams) -> Result<Self> {
        let table = pmf_table(p)?;
        let mut acc = 0.0;
        let cdf = table
            .into_iter()
            .map(|pk| {
                acc += pk;
                acc
            })
            .collect();
        Ok(Self { cdf })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let k = self.cdf.partition_point(|&c| c <= u);
        k.min(self.cdf.len() - 1) as u64
    }
}

/// `n` independent draws.
pub fn sample<R: Rng + ?Sized>(p: &CmpParams, rng: &mut R, n: usize) -> Result<Vec<u64>> {
    if n == 0 {
        p.validate()?;
        return Ok(Vec::new());
    }
    let sampler = CmpSampler::new(p)?;
    Ok((0..n).map(|_| sampler.draw(rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(l: f64, n: f64) -> CmpParams {
        CmpParams::new(l, n).unwrap()
    }

    #[test]
    fn poisson_normalizer() {
        let z = log_normalizer(&params(2.0, 1.0)).unwrap();
        assert_eq!(z, 2.0);
        let zs = log_normalizer_series(&params(2.0, 1.0)).unwrap();
        assert!((zs - 2.0).abs() < 1e-12, "{zs}");
    }

    #[test]
    fn geometric_normalizer() {
        let z = log_normalizer(&params(0.5, 0.0)).unwrap();
        assert!((z - core::f64::consts::LN_2).abs() < 1e-15);
        let zs = log_normalizer_series(&params(0.5, 0.0)).unwrap();
        assert!((zs - core::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn pmf_examples() {
        let v = log_pmf(3, &params(2.0, 1.0)).unwrap();
        let poisson = -2.0 + (8.0f64 / 6.0).ln();
        assert!((v - poisson).abs() < 1e-14, "{v}");
        let v = log_pmf(2, &params(0.4, 0.0)).unwrap();
        assert!((v - (0.6f64 * 0.16).ln()).abs() < 1e-14, "{v}");
    }

    #[test]
    fn mean_examples() {
        assert!((mean(&params(2.0, 1.0)).unwrap() - 2.0).abs() < 1e-12);
        let m = mean(&params(0.445, 0.0)).unwrap();
        assert!((m - 0.445 / 0.555).abs() < 1e-12);
    }

    #[test]
    fn divergent_geometric_rejected() {
        assert!(matches!(
            CmpParams::new(1.0, 0.0),
            Err(Error::Divergent { .. })
        ));
        let bad = CmpParams {
            lambda: 1.2,
            nu: 0.0,
        };
        assert!(matches!(log_normalizer(&bad), Err(Error::Divergent { .. })));
        assert!(matches!(log_pmf(0, &bad), Err(Error::Divergent { .. })));
    }

    #[test]
    fn truncation_cap_reported() {
        // λ so close to 1 that the geometric tail needs more than the cap
        let p = params(1.0 - 1e-7, 0.0);
        assert!(matches!(
            log_normalizer_series(&p),
            Err(Error::TruncationCap { .. })
        ));
    }

    #[test]
    fn invalid_params() {
        assert!(CmpParams::new(0.0, 1.0).is_err());
        assert!(CmpParams::new(1.0, -0.1).is_err());
        assert!(CmpParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn sample_empty_and_deterministic() {
        let p = params(1.5, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(sample(&p, &mut rng, 0).unwrap().is_empty());
        let a = sample(&p, &mut ChaCha8Rng::seed_from_u64(3), 100).unwrap();
        let b = sample(&p, &mut ChaCha8Rng::seed_from_u64(3), 100).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cached_normalizer_is_identical() {
        let table = FactorialTable::new(64);
        for l in [0.1, 1.5, 7.0, 40.0] {
            for n in [0.3, 0.5, 2.0, 1.0, 0.0] {
                let Ok(p) = CmpParams::new(l, n) else { continue };
                match (log_normalizer(&p), log_normalizer_cached(&p, &table)) {
                    (Ok(a), Ok(b)) => assert_eq!(a.to_bits(), b.to_bits(), "λ={l} ν={n}"),
                    (a, b) => assert_eq!(a.is_err(), b.is_err()),
                }
            }
        }
    }
}
