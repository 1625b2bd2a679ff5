use auction_bids_core::data::Dataset;
use auction_bids_core::mcmc::{fit_counts, fit_timing, ChainConfig, PriorSpec};
use auction_bids_core::synth::{simulate_dataset, SynthConfig};

fn short(seed: u64) -> ChainConfig {
    ChainConfig {
        seed,
        n_burn: 1000,
        n_keep: 4000,
        thin: 2,
        n_chains: 4,
        ..ChainConfig::default()
    }
}

fn empty(categories: usize) -> Dataset {
    Dataset {
        categories,
        ..Dataset::default()
    }
}

#[test]
fn timing_prior_recovery() {
    let cfg = ChainConfig {
        prior_only: true,
        n_burn: 2000,
        n_keep: 20_000,
        thin: 2,
        ..short(5)
    };
    let (_, s) = fit_timing(&empty(3), &PriorSpec::default(), &cfg).unwrap();
    assert_eq!(s.params.len(), 6);
    for p in &s.params {
        assert!(p.mean.abs() < 3.0 * p.mcse_mean, "{}: {} ± {}", p.name, p.mean, p.mcse_mean);
        assert!((p.sd - 10.0).abs() < 0.5, "{}: sd {}", p.name, p.sd);
    }
}

#[test]
fn nu_prior_recovery() {
    let cfg = ChainConfig {
        prior_only: true,
        n_burn: 2000,
        n_keep: 20_000,
        thin: 2,
        ..short(6)
    };
    let (_, s) = fit_counts(&empty(2), &PriorSpec::default(), &cfg).unwrap();
    let nu = s.get("nu").unwrap();
    assert!((nu.mean - 2.0).abs() < 3.0 * nu.mcse_mean, "{} ± {}", nu.mean, nu.mcse_mean);
}

#[test]
fn same_seed_same_draws() {
    let data = simulate_dataset(&SynthConfig::published(1, 2, 10)).unwrap();
    let cfg = ChainConfig {
        n_burn: 200,
        n_keep: 400,
        thin: 1,
        n_chains: 2,
        ..short(9)
    };
    let a = fit_timing(&data, &PriorSpec::default(), &cfg).unwrap().0;
    let b = fit_timing(&data, &PriorSpec::default(), &cfg).unwrap().0;
    assert_eq!(a, b);
    let c = fit_timing(&data, &PriorSpec::default(), &ChainConfig { seed: 10, ..cfg }).unwrap().0;
    assert_ne!(a, c);
}

#[test]
fn geometric_counts_recovered_with_nu_fixed() {
    let truth = SynthConfig::published(21, 4, 100);
    let data = simulate_dataset(&truth).unwrap();
    let cfg = ChainConfig {
        fix_nu_at: Some(0.0),
        ..short(21)
    };
    let (draws, s) = fit_counts(&data, &PriorSpec::default(), &cfg).unwrap();
    assert!(draws.index_of("nu").is_none());
    assert_eq!(draws.fixed, vec![("nu".to_string(), 0.0)]);
    let mut expected = vec![("gamma".to_string(), truth.counts.gamma)];
    for (c, v) in truth.counts.psi_multi.iter().enumerate() {
        expected.push((format!("psi_multi[{}]", c + 1), *v));
    }
    for (name, v) in expected {
        let p = s.get(&name).unwrap();
        assert!((p.mean - v).abs() < 3.0 * p.sd, "{name}: {} ± {} vs {v}", p.mean, p.sd);
        assert!(p.rhat < 1.1, "{name}: rhat {}", p.rhat);
    }
    for chain in &draws.chains {
        assert_eq!(chain.scales_burn_end, chain.scales_end);
        assert!(chain.acceptance.iter().all(|a| (0.1..=0.6).contains(a)), "{:?}", chain.acceptance);
    }
}

#[test]
fn poisson_counts_put_nu_near_one() {
    let mut truth = SynthConfig::published(33, 3, 80);
    truth.counts.nu = 1.0;
    let data = simulate_dataset(&truth).unwrap();
    let (draws, s) = fit_counts(&data, &PriorSpec::default(), &short(33)).unwrap();
    let nu = s.get("nu").unwrap();
    assert!(nu.q025 <= 1.0 && 1.0 <= nu.q975, "[{}, {}]", nu.q025, nu.q975);
    for chain in &draws.chains {
        assert!(chain.acceptance.iter().all(|a| (0.1..=0.6).contains(a)), "{:?}", chain.acceptance);
    }
}

#[test]
fn timing_recovered_on_small_synthetic_set() {
    let truth = SynthConfig::published(8, 3, 100);
    let data = simulate_dataset(&truth).unwrap();
    let (draws, s) = fit_timing(&data, &PriorSpec::default(), &short(8)).unwrap();
    let t = &truth.timing;
    let mut expected = vec![("eta", t.eta), ("theta", t.theta), ("delta", t.delta)]
        .into_iter()
        .map(|(n, v)| (n.to_string(), v))
        .collect::<Vec<_>>();
    for (c, v) in t.psi_late.iter().enumerate() {
        expected.push((format!("psi_late[{}]", c + 1), *v));
    }
    let hits = expected
        .iter()
        .filter(|(name, v)| {
            let p = s.get(name).unwrap();
            (p.mean - v).abs() < 3.0 * p.sd
        })
        .count();
    assert!(hits * 10 >= expected.len() * 9, "{hits}/{}", expected.len());
    for chain in &draws.chains {
        assert_eq!(chain.scales_burn_end, chain.scales_end);
        assert!(chain.acceptance.iter().all(|a| (0.1..=0.6).contains(a)), "{:?}", chain.acceptance);
    }
}

#[test]
fn empty_data_is_rejected() {
    assert!(fit_timing(&empty(2), &PriorSpec::default(), &short(1)).is_err());
}
