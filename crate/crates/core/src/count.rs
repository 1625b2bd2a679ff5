//! COM-Poisson model for the number of bids a bidder places in one auction.
//!
//! `bids − 1 ~ CMP(λ, ν)` with `ln λ = ψ''_c + γ·x`, `x` log-experience and
//! `ν` shared by every category and bidder. Larger `ψ''_c` means more
//! multiple bidding in category `c`.

use alloc::vec::Vec;

use crate::cmp::{self, CmpParams};
use crate::data::CountObservation;
use crate::error::{Error, Result};
use crate::special::stable_sum;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CountCoeffs {
    pub gamma: f64,
    pub nu: f64,
    /// Category intercepts `ψ''_c`, index `c - 1`.
    pub psi_multi: Vec<f64>,
    /// `nu` is held constant during fitting.
    pub nu_fixed: bool,
}

impl CountCoeffs {
    pub fn categories(&self) -> usize {
        self.psi_multi.len()
    }
}

/// How observed counts (all `≥ 1`) map onto the CMP support `{0, 1, ...}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SupportShift {
    /// Model `bids − 1`.
    #[default]
    Shifted,
    /// Model `bids` directly; the mass at zero is never observed.
    Unshifted,
}

impl SupportShift {
    #[inline]
    pub fn to_support(self, bids: u64) -> u64 {
        match self {
            SupportShift::Shifted => bids - 1,
            SupportShift::Unshifted => bids,
        }
    }

    #[inline]
    pub fn from_support(self, k: u64) -> u64 {
        match self {
            SupportShift::Shifted => k + 1,
            SupportShift::Unshifted => k,
        }
    }
}

/// `λ = exp(ψ''_c + γ·log_exp)`.
pub fn link_lambda(coeffs: &CountCoeffs, category: usize, log_exp: f64) -> Result<f64> {
    if category == 0 || category > coeffs.psi_multi.len() {
        return Err(Error::CategoryOutOfRange {
            category,
            categories: coeffs.psi_multi.len(),
        });
    }
    Ok(libm::exp(coeffs.psi_multi[category - 1] + coeffs.gamma * log_exp))
}

/// Log likelihood with the default shifted support.
pub fn count_loglik(coeffs: &CountCoeffs, data: &[CountObservation]) -> Result<f64> {
    count_loglik_with(coeffs, data, SupportShift::Shifted)
}

pub fn count_loglik_with(
    coeffs: &CountCoeffs,
    data: &[CountObservation],
    shift: SupportShift,
) -> Result<f64> {
    let mut terms = Vec::with_capacity(data.len());
    for obs in data {
        if obs.category == 0 || obs.category > coeffs.categories() {
            return Err(Error::DimensionMismatch {
                expected: coeffs.categories(),
                found: obs.category,
            });
        }
        if obs.bids == 0 {
            return Err(Error::OutOfSupport {
                value: 0.0,
                support: "{1, 2, ...}",
            });
        }
        let lambda = link_lambda(coeffs, obs.category, obs.log_exp)?;
        let p = CmpParams::new(lambda, coeffs.nu)?;
        terms.push(cmp::log_pmf(shift.to_support(obs.bids), &p)?);
    }
    Ok(stable_sum(terms))
}
