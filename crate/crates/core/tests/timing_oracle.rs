mod common;

use auction_bids_core::data::TimingObservation;
use auction_bids_core::estimates;
use auction_bids_core::timing::{
    beta_cdf, beta_log_density, interval_probability, link_shapes, timing_loglik, BetaShape,
    TimingCoeffs, Window,
};
use common::{beta_log_density_quad, inc_beta_quad, integrate};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SHAPES: [f64; 5] = [0.343, 0.705, 1.0, 2.0, 5.0];
const XS: [f64; 4] = [1.0 / 168.0, 0.1, 0.5, 167.0 / 168.0];

fn shape(a: f64, b: f64) -> BetaShape {
    BetaShape::new(a, b).unwrap()
}

#[test]
fn cdf_matches_quadrature() {
    for &a in &SHAPES {
        for &b in &SHAPES {
            for &x in &XS {
                let got = beta_cdf(x, shape(a, b));
                let want = inc_beta_quad(x, a, b);
                assert!((got - want).abs() < 1e-8, "a={a} b={b} x={x}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn cdf_at_pens_link_shapes() {
    // mpmath betainc, 40 digits
    const MP: f64 = 0.146_083_568_744_061_72;
    let s = link_shapes(&estimates::timing_coeffs(), estimates::PENS, 2.0).unwrap();
    assert!((s.alpha - 0.3430).abs() < 1e-4 && (s.beta - 0.7047).abs() < 1e-4);
    let got = beta_cdf(1.0 / 168.0, s);
    assert!((got - inc_beta_quad(1.0 / 168.0, s.alpha, s.beta)).abs() < 1e-8);
    assert!((got - MP).abs() < 1e-10);
}

#[test]
fn density_matches_quadrature_normalized_oracle() {
    // mpmath: ln(0.1^(α−1) 0.9^(β−1) / B(0.387, 0.705))
    const MP: f64 = 0.310_724_538_735_359_49;
    let got = beta_log_density(0.1, shape(0.387, 0.705)).unwrap();
    assert!((got - beta_log_density_quad(0.1, 0.387, 0.705)).abs() < 1e-9);
    assert!((got - MP).abs() < 1e-12);
}

/// `∫_0^{1/2}` of the density, with `t = u^(1/a)` removing the singularity.
fn left_half_mass(s: BetaShape) -> f64 {
    let a = s.alpha;
    integrate(
        |u: f64| {
            let t = u.powf(1.0 / a);
            // below t's underflow point the interval has negligible width
            if t == 0.0 {
                return 0.0;
            }
            beta_log_density(t, s).unwrap().exp() * t / (a * u)
        },
        0.0,
        0.5f64.powf(a),
        1e-13,
    )
}

#[test]
fn density_integrates_to_one() {
    for &a in &[0.35, 0.7, 1.0, 2.0] {
        for &b in &[0.35, 0.7, 1.0, 2.0] {
            // Beta(a, b) at 1 − s equals Beta(b, a) at s
            let total = left_half_mass(shape(a, b)) + left_half_mass(shape(b, a));
            assert!((total - 1.0).abs() < 1e-6, "a={a} b={b}: {total}");
        }
    }
}

#[test]
fn cdf_endpoints_and_monotone() {
    for &a in &SHAPES {
        for &b in &SHAPES {
            let s = shape(a, b);
            assert_eq!(beta_cdf(0.0, s), 0.0);
            assert_eq!(beta_cdf(1.0, s), 1.0);
            let mut prev = 0.0;
            for i in 1..=200 {
                let v = beta_cdf(i as f64 / 200.0, s);
                assert!(v >= prev, "a={a} b={b} i={i}");
                prev = v;
            }
        }
    }
}

#[test]
fn tails_grow_with_experience() {
    let coeffs = estimates::timing_coeffs();
    for c in 1..=15 {
        let mut prev = (0.0, 0.0);
        for i in 0..=35 {
            let le = 0.2 * i as f64;
            let s = link_shapes(&coeffs, c, le).unwrap();
            let lower = beta_cdf(0.01, s);
            let upper = 1.0 - beta_cdf(0.99, s);
            assert!(lower >= prev.0 && upper >= prev.1, "c={c} le={le}");
            prev = (lower, upper);
        }
    }
}

#[test]
fn pens_probability_quartet() {
    let coeffs = estimates::timing_coeffs();
    let prob = |le, w| interval_probability(&coeffs, estimates::PENS, le, w, 168.0).unwrap();
    let cases = [
        (2.0, Window::LastHours(1.0), 0.145),
        (6.0, Window::LastHours(1.0), 0.190),
        (2.0, Window::FirstHours(1.0), 0.011),
        (6.0, Window::FirstHours(1.0), 0.027),
    ];
    for (le, w, want) in cases {
        let got = prob(le, w);
        assert!((got - want).abs() <= 0.005, "{w:?} le={le}: {got}");
    }
}

fn random_obs(n: usize, seed: u64, categories: usize) -> Vec<TimingObservation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| TimingObservation {
            category: 1 + i % categories,
            auction: i,
            r: rng.random_range(1e-6..1.0 - 1e-6),
            log_exp: rng.random_range(0.0..7.0),
            duration_hours: 168.0,
        })
        .collect()
}

#[test]
fn loglik_equals_per_point_oracle_sum() {
    let coeffs = TimingCoeffs {
        eta: -0.95,
        theta: -0.06,
        delta: -0.08,
        psi_late: vec![-0.3, 0.26, -0.61],
    };
    let data = random_obs(100, 3, 3);
    let oracle: f64 = data
        .iter()
        .map(|o| {
            let a = (coeffs.eta + coeffs.theta * o.log_exp).exp();
            let b = (coeffs.psi_late[o.category - 1] + coeffs.delta * o.log_exp).exp();
            beta_log_density_quad(o.r, a, b)
        })
        .sum();
    let got = timing_loglik(&coeffs, &data).unwrap();
    assert!((got - oracle).abs() < 1e-7 * oracle.abs().max(1.0), "{got} vs {oracle}");
}

proptest! {
    #[test]
    fn loglik_permutation_invariant(seed in 0u64..1000, rot in 0usize..50) {
        let coeffs = estimates::timing_coeffs();
        let data = random_obs(50, seed, 15);
        let mut shuffled = data.clone();
        shuffled.rotate_left(rot);
        shuffled.reverse();
        let a = timing_loglik(&coeffs, &data).unwrap();
        let b = timing_loglik(&coeffs, &shuffled).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }
}

#[test]
fn pooled_target_matches_pointwise_loglik() {
    use auction_bids_core::mcmc::{timing_target, ChainConfig, Model, PriorSpec};
    use auction_bids_core::synth::{simulate_dataset, SynthConfig};

    let data = simulate_dataset(&SynthConfig::published(12, 3, 40)).unwrap();
    let target = timing_target(&data, &PriorSpec::default(), &ChainConfig::default()).unwrap();
    let coeffs = TimingCoeffs {
        eta: -0.7,
        theta: -0.1,
        delta: 0.05,
        psi_late: vec![-0.2, 0.3, 0.0],
    };
    let mut x = vec![coeffs.eta, coeffs.theta, coeffs.delta];
    x.extend(&coeffs.psi_late);
    let pooled: f64 = (0..target.n_groups()).map(|g| target.group_loglik(&x, g)).sum();
    let direct = timing_loglik(&coeffs, &data.timing).unwrap();
    assert!((pooled - direct).abs() < 1e-9 * direct.abs(), "{pooled} vs {direct}");
}
