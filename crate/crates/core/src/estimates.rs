//! Published posterior means for the fifteen eBay product categories
//! (Dec 2002 – Feb 2003 data), used as simulation truth and for reporting.

use alloc::vec::Vec;

use crate::count::CountCoeffs;
use crate::timing::TimingCoeffs;

pub const ETA: f64 = -0.95;
pub const THETA: f64 = -0.06;
pub const DELTA: f64 = -0.08;
/// The decay parameter drifted towards zero and was fixed there.
pub const NU: f64 = 0.0;
pub const GAMMA: f64 = -0.18;

/// A product category with its two intercepts (posterior mean, sd).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CategoryEstimate {
    pub name: &'static str,
    pub psi_late: f64,
    pub psi_late_sd: f64,
    pub psi_multi: f64,
    pub psi_multi_sd: f64,
}

const fn cat(
    name: &'static str,
    psi_late: f64,
    psi_late_sd: f64,
    psi_multi: f64,
    psi_multi_sd: f64,
) -> CategoryEstimate {
    CategoryEstimate {
        name,
        psi_late,
        psi_late_sd,
        psi_multi,
        psi_multi_sd,
    }
}

pub const CATEGORIES: [CategoryEstimate; 15] = [
    cat("Collectible pottery", -0.30, 0.023, -0.23, 0.015),
    cat("Sunglasses", -0.31, 0.020, -0.27, 0.011),
    cat("Golf balls", -0.26, 0.021, -0.48, 0.015),
    cat("Premium wristwatches", -0.61, 0.021, -0.19, 0.012),
    cat("Premium writing pens", -0.19, 0.029, -0.31, 0.021),
    cat("Computer accessories", 0.26, 0.028, -0.41, 0.019),
    cat("Golf club bags", -0.41, 0.026, -0.26, 0.015),
    cat("Neckties", -0.18, 0.034, -0.37, 0.025),
    cat("Desktop accessories", 0.03, 0.038, -0.28, 0.026),
    cat("Handheld calculators", 0.12, 0.038, -0.27, 0.023),
    cat("Luggage bags", 0.01, 0.035, -0.22, 0.020),
    cat("Men's electric shavers", -0.04, 0.031, -0.27, 0.020),
    cat("Electric drills", -0.27, 0.027, -0.28, 0.017),
    cat("Telescopes and microscopes", -0.39, 0.032, -0.18, 0.019),
    cat("Hair dryer", 0.03, 0.049, -0.32, 0.036),
];

/// 1-based index of the premium writing pens category.
pub const PENS: usize = 5;

pub fn category_names() -> Vec<&'static str> {
    CATEGORIES.iter().map(|c| c.name).collect()
}

pub fn psi_late() -> Vec<f64> {
    CATEGORIES.iter().map(|c| c.psi_late).collect()
}

pub fn psi_multi() -> Vec<f64> {
    CATEGORIES.iter().map(|c| c.psi_multi).collect()
}

pub fn timing_coeffs() -> TimingCoeffs {
    TimingCoeffs {
        eta: ETA,
        theta: THETA,
        delta: DELTA,
        psi_late: psi_late(),
    }
}

/// Count coefficients with `ν` fixed at zero (geometric).
pub fn count_coeffs() -> CountCoeffs {
    CountCoeffs {
        gamma: GAMMA,
        nu: NU,
        psi_multi: psi_multi(),
        nu_fixed: true,
    }
}
