//! Beta model for the timing of a bidder's final bid.
//!
//! `r ~ Beta(α, β)` with `ln α = η + θ·x` and `ln β = ψ'_c + δ·x`, where `x`
//! is log-experience and `c` the product category. Small `r` means a late
//! bid, so larger `ψ'_c` means more late bidding in category `c`.

use alloc::vec::Vec;

use crate::data::TimingObservation;
use crate::error::{Error, Result};
use crate::special::{inc_beta, ln_beta, stable_sum};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimingCoeffs {
    pub eta: f64,
    pub theta: f64,
    pub delta: f64,
    /// Category intercepts `ψ'_c`, index `c - 1`.
    pub psi_late: Vec<f64>,
}

impl TimingCoeffs {
    pub fn categories(&self) -> usize {
        self.psi_late.len()
    }

    fn psi(&self, category: usize) -> Result<f64> {
        if category == 0 || category > self.psi_late.len() {
            return Err(Error::CategoryOutOfRange {
                category,
                categories: self.psi_late.len(),
            });
        }
        Ok(self.psi_late[category - 1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BetaShape {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaShape {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!(
                "beta shapes must be positive, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }
}

/// Beta shapes for a bidder with log-experience `log_exp` in `category`.
pub fn link_shapes(coeffs: &TimingCoeffs, category: usize, log_exp: f64) -> Result<BetaShape> {
    let psi = coeffs.psi(category)?;
    Ok(BetaShape {
        alpha: libm::exp(coeffs.eta + coeffs.theta * log_exp),
        beta: libm::exp(psi + coeffs.delta * log_exp),
    })
}

/// Log density of `Beta(α, β)` at `r ∈ (0, 1)`.
pub fn beta_log_density(r: f64, s: BetaShape) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::OutOfSupport {
            value: r,
            support: "(0, 1)",
        });
    }
    Ok(beta_log_density_unchecked(
        libm::log(r),
        libm::log1p(-r),
        s.alpha,
        s.beta,
    ))
}

#[inline]
pub(crate) fn beta_log_density_unchecked(ln_r: f64, ln_1mr: f64, a: f64, b: f64) -> f64 {
    (a - 1.0) * ln_r + (b - 1.0) * ln_1mr - ln_beta(a, b)
}

/// `P(R ≤ x)`, the regularized incomplete beta function.
pub fn beta_cdf(x: f64, s: BetaShape) -> f64 {
    inc_beta(x, s.alpha, s.beta)
}

/// `P(R > x)`, computed without cancellation.
pub fn beta_sf(x: f64, s: BetaShape) -> f64 {
    inc_beta(1.0 - x, s.beta, s.alpha)
}

/// `P(R < lower) + P(R > upper)`: mass in both ends of the unit interval.
pub fn tail_mass(
    coeffs: &TimingCoeffs,
    category: usize,
    log_exp: f64,
    lower: f64,
    upper: f64,
) -> Result<f64> {
    if !(0.0 < lower && lower <= upper && upper < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "tail bounds must satisfy 0 < {lower} <= {upper} < 1"
        )));
    }
    let s = link_shapes(coeffs, category, log_exp)?;
    Ok(beta_cdf(lower, s) + beta_sf(upper, s))
}

/// A window of calendar time at either end of an auction.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "side", content = "hours", rename_all = "snake_case"))]
pub enum Window {
    FirstHours(f64),
    LastHours(f64),
}

/// Probability that the final bid falls inside `window` of an auction
/// lasting `duration_hours`.
pub fn interval_probability(
    coeffs: &TimingCoeffs,
    category: usize,
    log_exp: f64,
    window: Window,
    duration_hours: f64,
) -> Result<f64> {
    let h = match window {
        Window::FirstHours(h) | Window::LastHours(h) => h,
    };
    if !(h > 0.0 && h < duration_hours && duration_hours.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!(
            "window of {h} hours must lie inside a {duration_hours}-hour auction"
        )));
    }
    let shape = link_shapes(coeffs, category, log_exp)?;
    // r is time remaining: the last hours are near r = 0
    Ok(match window {
        Window::LastHours(_) => beta_cdf(h / duration_hours, shape),
        Window::FirstHours(_) => inc_beta(h / duration_hours, shape.beta, shape.alpha),
    })
}

/// Log likelihood of `data` under `coeffs`.
pub fn timing_loglik(coeffs: &TimingCoeffs, data: &[TimingObservation]) -> Result<f64> {
    let mut terms = Vec::with_capacity(data.len());
    for obs in data {
        if obs.category > coeffs.categories() || obs.category == 0 {
            return Err(Error::DimensionMismatch {
                expected: coeffs.categories(),
                found: obs.category,
            });
        }
        let s = link_shapes(coeffs, obs.category, obs.log_exp)?;
        terms.push(beta_log_density(obs.r, s)?);
    }
    Ok(stable_sum(terms))
}
