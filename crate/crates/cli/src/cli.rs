//! Command-line definitions and subcommand drivers.

use std::path::{Path, PathBuf};

use auction_bids_core::count::SupportShift;
use auction_bids_core::data::{BuildOptions, Dataset};
use auction_bids_core::estimates;
use auction_bids_core::mcmc::{ChainConfig, PriorSpec, Summary, MIN_CHAINS, MIN_DRAWS};
use auction_bids_core::report::{
    probability_report, rank_categories_by, spearman, timing_point_estimate, Metric,
    ProbabilityQuery, RankBy,
};
use auction_bids_core::synth::{bid_log_from_dataset, simulate_dataset, BidderLaw, SynthConfig};
use auction_bids_core::timing::{tail_mass, TimingCoeffs, Window};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::FileConfig;
use crate::error::{CliError, CliResult};
use crate::export::{self, SummaryFile};
use crate::io::{self, BidLog, Format};
use crate::parallel;

pub const TIMING_DRAWS: &str = "timing_draws.csv";
pub const TIMING_SUMMARY: &str = "timing_summary.json";
pub const BIDS_DRAWS: &str = "bids_draws.csv";
pub const BIDS_SUMMARY: &str = "bids_summary.json";
pub const TRUTH_FILE: &str = "truth.json";
pub const RANKINGS_FILE: &str = "rankings.csv";
pub const CORRELATION_FILE: &str = "correlation.csv";
pub const PROBABILITIES_FILE: &str = "probabilities.csv";
pub const TAIL_FILE: &str = "tail_mass.csv";

/// Log-experience grid used by the report tables.
pub const REPORT_LOG_EXP: [f64; 4] = [0.0, 2.0, 4.0, 6.0];

#[derive(Debug, Parser)]
#[command(
    name = "auction-bids",
    version,
    about = "Bid timing and bid multiplicity models for online auctions"
)]
pub struct Cli {
    /// Settings file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a synthetic bid log from the models.
    Simulate(SimulateArgs),
    /// Sample the bid-timing posterior.
    FitTiming(FitArgs),
    /// Sample the bid-count posterior.
    FitBids(FitBidsArgs),
    /// Rankings, rank correlation and probability tables from fitted summaries.
    Report(ReportArgs),
    /// Descriptive tables for a bid log.
    Describe(DescribeArgs),
    /// Probability that a final bid lands in a window of the auction.
    Probe(ProbeArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of categories (at most 15).
    #[arg(long)]
    pub categories: Option<usize>,
    #[arg(long)]
    pub auctions: Option<usize>,
    /// Every auction gets exactly this many bidders.
    #[arg(long)]
    pub bidders: Option<u64>,
    /// True `ν` of the count model.
    #[arg(long, default_value_t = 0.0)]
    pub nu: f64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub burn: Option<usize>,
    #[arg(long)]
    pub keep: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    /// Worker threads (defaults to available cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Ignore the data and sample the prior.
    #[arg(long)]
    pub prior_only: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Directory holding the bid log.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Use every bid, not only each bidder's final one.
    #[arg(long)]
    pub all_bids: bool,
    #[command(flatten)]
    pub chain: ChainArgs,
}

#[derive(Debug, Args)]
pub struct FitBidsArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    /// Hold `ν` at this value.
    #[arg(long)]
    pub fix_nu: Option<f64>,
    /// Model the bid count itself rather than bids beyond the first.
    #[arg(long)]
    pub unshifted: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory holding fitted summaries (defaults to `--out`).
    #[arg(long)]
    pub fits: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Use the published estimates instead of fitted summaries.
    #[arg(long)]
    pub published: bool,
    /// Auction length for the probability table.
    #[arg(long, default_value_t = 168.0)]
    pub duration: f64,
}

#[derive(Debug, Args)]
pub struct DescribeArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub all_bids: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    First,
    Last,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    /// 1-based category.
    #[arg(long)]
    pub category: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub log_exp: f64,
    #[arg(long, value_enum, default_value = "last")]
    pub window: Side,
    #[arg(long, default_value_t = 1.0)]
    pub hours: f64,
    #[arg(long, default_value_t = 168.0)]
    pub duration: f64,
    /// Timing summary to take point estimates from; published estimates
    /// otherwise.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

pub fn run(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Simulate(a) => simulate(a, &file),
        Command::FitTiming(a) => fit_timing(a, &file),
        Command::FitBids(a) => fit_bids(a, &file),
        Command::Report(a) => report(a, &file),
        Command::Describe(a) => describe(a, &file),
        Command::Probe(a) => probe(a),
    }
}

fn required(flag: Option<PathBuf>, file: &Option<PathBuf>, name: &str) -> CliResult<PathBuf> {
    flag.or_else(|| file.clone())
        .ok_or_else(|| CliError::Usage(format!("--{name} is required")))
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn simulate(a: SimulateArgs, file: &FileConfig) -> CliResult<()> {
    let out = required(a.out, &file.out, "out")?;
    let seed = a.seed.or(file.seed).unwrap_or(0);
    let categories = a
        .categories
        .or(file.categories)
        .unwrap_or(estimates::CATEGORIES.len());
    let auctions = a.auctions.or(file.auctions).unwrap_or(200);
    let format = a.format.or(file.format).unwrap_or_default();
    if categories == 0 || categories > estimates::CATEGORIES.len() {
        return Err(CliError::Usage(format!(
            "--categories must lie in 1..={}",
            estimates::CATEGORIES.len()
        )));
    }
    if !(a.nu >= 0.0 && a.nu.is_finite()) {
        return Err(CliError::Usage(format!(
            "--nu must be non-negative, got {}",
            a.nu
        )));
    }
    let mut cfg = SynthConfig::published(seed, categories, auctions);
    cfg.counts.nu = a.nu;
    cfg.counts.nu_fixed = false;
    if let Some(n) = a.bidders {
        cfg.bidders = BidderLaw::Fixed(n);
    }
    cfg.validate().map_err(|e| match e {
        auction_bids_core::Error::InvalidParameter(m) => CliError::Usage(m),
        other => other.into(),
    })?;

    let data = simulate_dataset(&cfg)?;
    let (auctions, bids) = bid_log_from_dataset(&data, seed)?;
    io::write_bid_log(&out, format, &BidLog { auctions, bids })?;
    let truth = serde_json::to_string_pretty(&cfg).map_err(|e| CliError::Data(e.to_string()))?;
    let path = out.join(TRUTH_FILE);
    std::fs::write(&path, truth + "\n").map_err(|e| CliError::io(&path, e))
}

struct FitSetup {
    data: Dataset,
    out: PathBuf,
    cfg: ChainConfig,
    threads: usize,
}

fn fit_setup(a: FitArgs, file: &FileConfig, fix_nu: Option<f64>) -> CliResult<FitSetup> {
    let out = required(a.out, &file.out, "out")?;
    let c = a.chain;
    let defaults = ChainConfig::default();
    let cfg = ChainConfig {
        seed: c.seed.or(file.seed).unwrap_or(defaults.seed),
        n_burn: c.burn.or(file.burn).unwrap_or(defaults.n_burn),
        n_keep: c.keep.or(file.keep).unwrap_or(defaults.n_keep),
        thin: c.thin.or(file.thin).unwrap_or(defaults.thin),
        n_chains: c.chains.or(file.chains).unwrap_or(defaults.n_chains),
        adapt_target: file.adapt_target.unwrap_or(defaults.adapt_target),
        fix_nu_at: fix_nu,
        prior_only: c.prior_only,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if cfg.n_chains < MIN_CHAINS || cfg.kept_per_chain() < MIN_DRAWS {
        return Err(CliError::Usage(format!(
            "need at least {MIN_CHAINS} chains and {MIN_DRAWS} kept draws per chain, got {} and {}",
            cfg.n_chains,
            cfg.kept_per_chain()
        )));
    }
    let threads = c
        .threads
        .or(file.threads)
        .unwrap_or_else(parallel::default_threads);
    if threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let data = match required(a.data, &file.data, "data") {
        Ok(dir) => {
            let format = a.format.or(file.format).unwrap_or_default();
            let opts = BuildOptions {
                all_bids: a.all_bids || file.all_bids.unwrap_or(false),
            };
            io::load_dataset(&dir, format, opts)?
        }
        Err(e) if !cfg.prior_only => return Err(e),
        Err(_) => Dataset {
            categories: estimates::CATEGORIES.len(),
            ..Dataset::default()
        },
    };
    ensure_dir(&out)?;
    Ok(FitSetup {
        data,
        out,
        cfg,
        threads,
    })
}

fn report_warnings(summary: &Summary) {
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
}

fn fit_timing(a: FitArgs, file: &FileConfig) -> CliResult<()> {
    let s = fit_setup(a, file, None)?;
    let (draws, summary) = parallel::fit_timing(&s.data, &PriorSpec::default(), &s.cfg, s.threads)?;
    report_warnings(&summary);
    export::write_draws(&s.out.join(TIMING_DRAWS), &draws, s.cfg.thin)?;
    export::write_summary(
        &s.out.join(TIMING_SUMMARY),
        &SummaryFile::new("timing", &s.cfg, &summary),
    )
}

fn fit_bids(a: FitBidsArgs, file: &FileConfig) -> CliResult<()> {
    let fix_nu = a.fix_nu.or(file.fix_nu);
    let s = fit_setup(a.fit, file, fix_nu)?;
    let shift = if a.unshifted {
        SupportShift::Unshifted
    } else {
        SupportShift::Shifted
    };
    let (draws, summary) =
        parallel::fit_counts(&s.data, &PriorSpec::default(), &s.cfg, shift, s.threads)?;
    report_warnings(&summary);
    export::write_draws(&s.out.join(BIDS_DRAWS), &draws, s.cfg.thin)?;
    export::write_summary(
        &s.out.join(BIDS_SUMMARY),
        &SummaryFile::new("bids", &s.cfg, &summary),
    )
}

/// A summary built from the published estimates (standard deviations as
/// reported, medians set to the means).
pub fn published_summary(metric: Metric) -> Summary {
    let mut s = Summary::default();
    let mut push = |name: String, mean: f64, sd: f64| {
        s.params.push(auction_bids_core::mcmc::ParamSummary {
            name,
            mean,
            sd,
            median: mean,
            q025: f64::NAN,
            q975: f64::NAN,
            rhat: f64::NAN,
            ess: 0.0,
            mcse_mean: f64::NAN,
            mcse_sd: f64::NAN,
            acceptance: f64::NAN,
            degenerate: false,
        })
    };
    match metric {
        Metric::LateBidding => {
            push("eta".into(), estimates::ETA, f64::NAN);
            push("theta".into(), estimates::THETA, f64::NAN);
            push("delta".into(), estimates::DELTA, f64::NAN);
            for (i, c) in estimates::CATEGORIES.iter().enumerate() {
                push(format!("psi_late[{}]", i + 1), c.psi_late, c.psi_late_sd);
            }
        }
        Metric::MultipleBidding => {
            push("gamma".into(), estimates::GAMMA, f64::NAN);
            for (i, c) in estimates::CATEGORIES.iter().enumerate() {
                push(format!("psi_multi[{}]", i + 1), c.psi_multi, c.psi_multi_sd);
            }
            s.fixed.push(("nu".into(), estimates::NU));
        }
    }
    s
}

fn load_fitted(dir: &Path, name: &str) -> CliResult<Option<Summary>> {
    let path = dir.join(name);
    if !path.exists() {
        return Ok(None);
    }
    Ok(Some(export::read_summary(&path)?.summary()))
}

fn report(a: ReportArgs, file: &FileConfig) -> CliResult<()> {
    let out = required(a.out, &file.out, "out")?;
    let (timing, counts, names) = if a.published {
        (
            Some(published_summary(Metric::LateBidding)),
            Some(published_summary(Metric::MultipleBidding)),
            estimates::category_names(),
        )
    } else {
        let fits = a.fits.unwrap_or_else(|| out.clone());
        (
            load_fitted(&fits, TIMING_SUMMARY)?,
            load_fitted(&fits, BIDS_SUMMARY)?,
            Vec::new(),
        )
    };
    if timing.is_none() && counts.is_none() {
        return Err(CliError::Data(format!(
            "no {TIMING_SUMMARY} or {BIDS_SUMMARY} to report on"
        )));
    }
    ensure_dir(&out)?;

    let mut rows = Vec::new();
    let mut means = Vec::new();
    for (summary, metric) in [
        (&timing, Metric::LateBidding),
        (&counts, Metric::MultipleBidding),
    ] {
        let Some(summary) = summary else { continue };
        for (by, label) in [(RankBy::Mean, "mean"), (RankBy::Median, "median")] {
            let ranking = rank_categories_by(summary, metric, by)?;
            rows.extend(export::ranking_rows(&ranking, label, &names));
        }
        means.push(auction_bids_core::report::category_means(summary, metric)?);
    }
    export::write_rankings(&out.join(RANKINGS_FILE), rows)?;

    if let [late, multi] = means.as_slice() {
        if late.len() == multi.len() {
            let rho = spearman(late, multi)?;
            export::write_correlation(&out.join(CORRELATION_FILE), late.len(), rho)?;
        }
    }

    if let Some(summary) = &timing {
        let coeffs = timing_point_estimate(summary)?;
        write_timing_tables(&coeffs, a.duration, &out)?;
    }
    Ok(())
}

/// Last- and first-hour probabilities and two-ended tail mass for every
/// category over [`REPORT_LOG_EXP`].
pub fn write_timing_tables(coeffs: &TimingCoeffs, duration: f64, out: &Path) -> CliResult<()> {
    let mut queries = Vec::new();
    let mut tails = Vec::new();
    for c in 1..=coeffs.categories() {
        for le in REPORT_LOG_EXP {
            for window in [Window::LastHours(1.0), Window::FirstHours(1.0)] {
                queries.push(ProbabilityQuery {
                    category: c,
                    log_exp: le,
                    window,
                    duration_hours: duration,
                });
            }
            tails.push((c, le, 0.01, 0.99, tail_mass(coeffs, c, le, 0.01, 0.99)?));
        }
    }
    let probs = probability_report(coeffs, &queries)?;
    export::write_probabilities(&out.join(PROBABILITIES_FILE), &probs)?;
    export::write_tail_mass(&out.join(TAIL_FILE), &tails)
}

fn describe(a: DescribeArgs, file: &FileConfig) -> CliResult<()> {
    let data_dir = required(a.data, &file.data, "data")?;
    let out = required(a.out, &file.out, "out")?;
    let format = a.format.or(file.format).unwrap_or_default();
    let opts = BuildOptions {
        all_bids: a.all_bids || file.all_bids.unwrap_or(false),
    };
    let data = io::load_dataset(&data_dir, format, opts)?;
    ensure_dir(&out)?;
    export::export_descriptives(&data, &out)
}

fn probe(a: ProbeArgs) -> CliResult<()> {
    let coeffs = match &a.summary {
        Some(p) => timing_point_estimate(&export::read_summary(p)?.summary())?,
        None => estimates::timing_coeffs(),
    };
    if a.category == 0 || a.category > coeffs.categories() {
        return Err(CliError::Usage(format!(
            "--category must lie in 1..={}",
            coeffs.categories()
        )));
    }
    let window = match a.window {
        Side::First => Window::FirstHours(a.hours),
        Side::Last => Window::LastHours(a.hours),
    };
    let query = ProbabilityQuery {
        category: a.category,
        log_exp: a.log_exp,
        window,
        duration_hours: a.duration,
    };
    let rows = probability_report(&coeffs, &[query]).map_err(|e| match e {
        auction_bids_core::Error::InvalidParameter(m) => CliError::Usage(m),
        other => other.into(),
    })?;
    println!("{}", export::PROBABILITY_HEADER);
    for r in export::probability_rows(&rows) {
        println!("{r}");
    }
    Ok(())
}
