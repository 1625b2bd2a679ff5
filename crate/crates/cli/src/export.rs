//! Draws, summaries, reports and descriptive tables.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use auction_bids_core::data::Dataset;
use auction_bids_core::mcmc::{ChainConfig, ParamSummary, PosteriorDraws, Summary};
use auction_bids_core::report::{
    bids_frequency, late_shares, ratio_histogram, CategoryRanking, ProbabilityQuery,
};
use auction_bids_core::timing::Window;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const HISTOGRAM_BINS: usize = 50;

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn write_lines(path: &Path, header: &str, rows: impl IntoIterator<Item = String>) -> CliResult<()> {
    let mut out = create(path)?;
    let io = |e| CliError::io(path, e);
    writeln!(out, "{header}").map_err(io)?;
    for r in rows {
        writeln!(out, "{r}").map_err(io)?;
    }
    out.flush().map_err(io)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `chain,iter,<names>`; `iter` counts post-burn-in sweeps.
pub fn write_draws(path: &Path, draws: &PosteriorDraws, thin: usize) -> CliResult<()> {
    let header = ["chain", "iter"]
        .into_iter()
        .map(String::from)
        .chain(draws.names.iter().map(|n| csv_field(n)))
        .collect::<Vec<_>>()
        .join(",");
    let rows = draws.chains.iter().enumerate().flat_map(|(c, chain)| {
        chain.draws.iter().enumerate().map(move |(i, row)| {
            let mut line = format!("{},{}", c + 1, (i + 1) * thin);
            for v in row {
                line.push(',');
                line.push_str(&v.to_string());
            }
            line
        })
    });
    write_lines(path, &header, rows)
}

/// One parameter in the summary file. Non-finite diagnostics are `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamRecord {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    pub q025: f64,
    pub q975: f64,
    pub rhat: Option<f64>,
    pub ess: Option<f64>,
    pub mcse_mean: Option<f64>,
    pub mcse_sd: Option<f64>,
    pub acceptance: f64,
    pub degenerate: bool,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl From<&ParamSummary> for ParamRecord {
    fn from(p: &ParamSummary) -> Self {
        Self {
            name: p.name.clone(),
            mean: p.mean,
            sd: p.sd,
            median: p.median,
            q025: p.q025,
            q975: p.q975,
            rhat: finite(p.rhat),
            ess: finite(p.ess),
            mcse_mean: finite(p.mcse_mean),
            mcse_sd: finite(p.mcse_sd),
            acceptance: p.acceptance,
            degenerate: p.degenerate,
        }
    }
}

impl From<&ParamRecord> for ParamSummary {
    fn from(p: &ParamRecord) -> Self {
        Self {
            name: p.name.clone(),
            mean: p.mean,
            sd: p.sd,
            median: p.median,
            q025: p.q025,
            q975: p.q975,
            rhat: p.rhat.unwrap_or(f64::NAN),
            ess: p.ess.unwrap_or(0.0),
            mcse_mean: p.mcse_mean.unwrap_or(f64::NAN),
            mcse_sd: p.mcse_sd.unwrap_or(f64::NAN),
            acceptance: p.acceptance,
            degenerate: p.degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub model: String,
    pub chains: ChainConfig,
    pub parameters: Vec<ParamRecord>,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl SummaryFile {
    pub fn new(model: &str, cfg: &ChainConfig, summary: &Summary) -> Self {
        Self {
            model: model.to_string(),
            chains: cfg.clone(),
            parameters: summary.params.iter().map(ParamRecord::from).collect(),
            fixed: summary.fixed.iter().cloned().collect(),
            warnings: summary.warnings.clone(),
        }
    }

    pub fn summary(&self) -> Summary {
        Summary {
            params: self.parameters.iter().map(ParamSummary::from).collect(),
            fixed: self.fixed.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            warnings: self.warnings.clone(),
        }
    }
}

pub fn write_summary(path: &Path, file: &SummaryFile) -> CliResult<()> {
    let mut out = create(path)?;
    let text = serde_json::to_string_pretty(file)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    writeln!(out, "{text}").map_err(|e| CliError::io(path, e))?;
    out.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_summary(path: &Path) -> CliResult<SummaryFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        message: e.to_string(),
    })
}

pub const RANKING_HEADER: &str = "metric,order_by,position,category,name,mean,sd,median,rank";

/// Rows of the ranking table. `order_by` is `mean` or `median`.
pub fn ranking_rows(ranking: &CategoryRanking, order_by: &str, names: &[&str]) -> Vec<String> {
    ranking
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let name = names.get(e.category - 1).copied().unwrap_or("");
            format!(
                "{},{order_by},{},{},{},{},{},{},{}",
                ranking.metric.prefix(),
                i + 1,
                e.category,
                csv_field(name),
                e.mean,
                e.sd,
                e.median,
                e.rank
            )
        })
        .collect()
}

pub fn write_rankings(path: &Path, rows: Vec<String>) -> CliResult<()> {
    write_lines(path, RANKING_HEADER, rows)
}

pub const PROBABILITY_HEADER: &str = "category,log_exp,window,hours,duration_hours,probability";

pub fn probability_rows(rows: &[(ProbabilityQuery, f64)]) -> Vec<String> {
    rows.iter()
        .map(|(q, p)| {
            let (side, hours) = match q.window {
                Window::FirstHours(h) => ("first", h),
                Window::LastHours(h) => ("last", h),
            };
            format!(
                "{},{},{side},{hours},{},{p}",
                q.category, q.log_exp, q.duration_hours
            )
        })
        .collect()
}

pub fn write_probabilities(path: &Path, rows: &[(ProbabilityQuery, f64)]) -> CliResult<()> {
    write_lines(path, PROBABILITY_HEADER, probability_rows(rows))
}

pub const TAIL_HEADER: &str = "category,log_exp,lower,upper,tail_mass";

pub fn write_tail_mass(path: &Path, rows: &[(usize, f64, f64, f64, f64)]) -> CliResult<()> {
    write_lines(
        path,
        TAIL_HEADER,
        rows.iter()
            .map(|(c, le, lo, hi, m)| format!("{c},{le},{lo},{hi},{m}")),
    )
}

pub const CORRELATION_HEADER: &str = "x,y,categories,spearman";

pub fn write_correlation(path: &Path, categories: usize, rho: f64) -> CliResult<()> {
    write_lines(
        path,
        CORRELATION_HEADER,
        [format!("psi_late,psi_multi,{categories},{rho}")],
    )
}

pub const HISTOGRAM_FILE: &str = "ratio_histogram.csv";
pub const HISTOGRAM_HEADER: &str = "bin,lower,upper,count";
pub const FREQUENCY_FILE: &str = "bids_per_bidder.csv";
pub const FREQUENCY_HEADER: &str = "bids,pairs";
pub const SHARES_FILE: &str = "late_shares.csv";
pub const SHARES_HEADER: &str =
    "category,final_bids,last_hour,last_minute,last_hour_share,last_minute_share";

/// Concentration-ratio histogram, bids-per-bidder frequencies and late-bid
/// shares (category 0 is all categories combined).
pub fn export_descriptives(data: &Dataset, out: &Path) -> CliResult<()> {
    if data.timing.is_empty() {
        return Err(CliError::Data("dataset has no observations".into()));
    }
    write_lines(
        &out.join(HISTOGRAM_FILE),
        HISTOGRAM_HEADER,
        ratio_histogram(data, HISTOGRAM_BINS)
            .into_iter()
            .enumerate()
            .map(|(i, (lo, hi, n))| format!("{},{lo},{hi},{n}", i + 1)),
    )?;
    write_lines(
        &out.join(FREQUENCY_FILE),
        FREQUENCY_HEADER,
        bids_frequency(data)
            .into_iter()
            .map(|(b, n)| format!("{b},{n}")),
    )?;
    write_lines(
        &out.join(SHARES_FILE),
        SHARES_HEADER,
        late_shares(data).into_iter().map(|s| {
            format!(
                "{},{},{},{},{},{}",
                s.category,
                s.bids,
                s.last_hour,
                s.last_minute,
                s.last_hour_share(),
                s.last_minute_share()
            )
        }),
    )
}
