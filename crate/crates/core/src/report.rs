//! Category rankings, rank correlation, probability tables and
//! descriptive summaries.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::count::CountCoeffs;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::mcmc::Summary;
use crate::special::stable_sum;
use crate::timing::{interval_probability, TimingCoeffs, Window};

/// 1-based ranks, ties sharing the average of the positions they span.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = stable_sum(x.iter().copied()) / n;
    let my = stable_sum(y.iter().copied()) / n;
    let sxy = stable_sum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    let sxx = stable_sum(x.iter().map(|a| (a - mx) * (a - mx)));
    let syy = stable_sum(y.iter().map(|b| (b - my) * (b - my)));
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Spearman rank correlation: Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::Empty("spearman needs at least two pairs"));
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Metric {
    LateBidding,
    MultipleBidding,
}

impl Metric {
    pub fn prefix(self) -> &'static str {
        match self {
            Metric::LateBidding => "psi_late",
            Metric::MultipleBidding => "psi_multi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankBy {
    Mean,
    Median,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RankingEntry {
    pub category: usize,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    pub rank: f64,
}

/// Categories in ascending order of the chosen statistic.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CategoryRanking {
    pub metric: Metric,
    pub entries: Vec<RankingEntry>,
}

impl CategoryRanking {
    pub fn lowest(&self) -> &RankingEntry {
        &self.entries[0]
    }

    pub fn highest(&self) -> &RankingEntry {
        &self.entries[self.entries.len() - 1]
    }
}

/// Rank categories from `(category, mean, sd, median)` records.
pub fn rank_entries(
    metric: Metric,
    rows: Vec<(usize, f64, f64, f64)>,
    by: RankBy,
) -> CategoryRanking {
    let key = |r: &(usize, f64, f64, f64)| match by {
        RankBy::Mean => r.1,
        RankBy::Median => r.3,
    };
    let keys: Vec<f64> = rows.iter().map(key).collect();
    let ranks = average_ranks(&keys);
    let mut entries: Vec<RankingEntry> = rows
        .iter()
        .zip(ranks)
        .map(|(&(category, mean, sd, median), rank)| RankingEntry {
            category,
            mean,
            sd,
            median,
            rank,
        })
        .collect();
    entries.sort_by(|a, b| a.rank.total_cmp(&b.rank).then(a.category.cmp(&b.category)));
    CategoryRanking { metric, entries }
}

/// Rank categories by posterior mean of their intercepts.
pub fn rank_categories(summary: &Summary, metric: Metric) -> Result<CategoryRanking> {
    rank_categories_by(summary, metric, RankBy::Mean)
}

pub fn rank_categories_by(summary: &Summary, metric: Metric, by: RankBy) -> Result<CategoryRanking> {
    let rows = category_rows(summary, metric)?;
    Ok(rank_entries(metric, rows, by))
}

fn category_rows(summary: &Summary, metric: Metric) -> Result<Vec<(usize, f64, f64, f64)>> {
    let mut rows = Vec::new();
    for c in 1.. {
        match summary.get(&format!("{}[{c}]", metric.prefix())) {
            Some(p) => rows.push((c, p.mean, p.sd, p.median)),
            None => break,
        }
    }
    if rows.is_empty() {
        return Err(Error::Empty("summary has no category intercepts"));
    }
    Ok(rows)
}

/// Posterior means of one metric's intercepts, by category.
pub fn category_means(summary: &Summary, metric: Metric) -> Result<Vec<f64>> {
    Ok(category_rows(summary, metric)?
        .into_iter()
        .map(|r| r.1)
        .collect())
}

fn mean_of(summary: &Summary, name: &str) -> Result<f64> {
    summary
        .get(name)
        .map(|p| p.mean)
        .ok_or_else(|| Error::InvalidParameter(format!("summary lacks {name}")))
}

/// Point estimates (posterior means) of the timing coefficients.
pub fn timing_point_estimate(summary: &Summary) -> Result<TimingCoeffs> {
    Ok(TimingCoeffs {
        eta: mean_of(summary, "eta")?,
        theta: mean_of(summary, "theta")?,
        delta: mean_of(summary, "delta")?,
        psi_late: category_means(summary, Metric::LateBidding)?,
    })
}

/// Point estimates of the count coefficients; a fixed `ν` is read from the
/// summary's fixed list.
pub fn count_point_estimate(summary: &Summary) -> Result<CountCoeffs> {
    let fixed_nu = summary
        .fixed
        .iter()
        .find(|(n, _)| n == "nu")
        .map(|(_, v)| *v);
    let nu = match fixed_nu {
        Some(v) => v,
        None => mean_of(summary, "nu")?,
    };
    Ok(CountCoeffs {
        gamma: mean_of(summary, "gamma")?,
        nu,
        psi_multi: category_means(summary, Metric::MultipleBidding)?,
        nu_fixed: fixed_nu.is_some(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbabilityQuery {
    pub category: usize,
    pub log_exp: f64,
    pub window: Window,
    pub duration_hours: f64,
}

/// Interval probabilities for each query.
pub fn probability_report(
    coeffs: &TimingCoeffs,
    queries: &[ProbabilityQuery],
) -> Result<Vec<(ProbabilityQuery, f64)>> {
    queries
        .iter()
        .map(|q| {
            interval_probability(coeffs, q.category, q.log_exp, q.window, q.duration_hours)
                .map(|p| (*q, p))
        })
        .collect()
}

/// Equal-width histogram of concentration ratios over `[0, 1]`.
pub fn ratio_histogram(data: &Dataset, bins: usize) -> Vec<(f64, f64, usize)> {
    let mut counts = vec![0usize; bins];
    for t in &data.timing {
        let b = ((t.r * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, n)| (i as f64 / bins as f64, (i + 1) as f64 / bins as f64, n))
        .collect()
}

/// Number of (auction, bidder) pairs with each bid count `1..=max`.
pub fn bids_frequency(data: &Dataset) -> Vec<(u64, usize)> {
    let max = data.counts.iter().map(|c| c.bids).max().unwrap_or(0);
    let mut freq = vec![0usize; max as usize];
    for c in &data.counts {
        freq[c.bids as usize - 1] += 1;
    }
    freq.into_iter()
        .enumerate()
        .map(|(i, n)| (i as u64 + 1, n))
        .collect()
}

/// Final bids landing in the last hour and last minute of their auction.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LateShares {
    /// 0 for all categories combined.
    pub category: usize,
    pub bids: usize,
    pub last_hour: usize,
    pub last_minute: usize,
}

impl LateShares {
    pub fn last_hour_share(&self) -> f64 {
        if self.bids == 0 {
            0.0
        } else {
            self.last_hour as f64 / self.bids as f64
        }
    }

    pub fn last_minute_share(&self) -> f64 {
        if self.bids == 0 {
            0.0
        } else {
            self.last_minute as f64 / self.bids as f64
        }
    }
}

/// Late-bid counts for all categories combined (category 0) followed by
/// each category `1..=C`, including categories without observations.
pub fn late_shares(data: &Dataset) -> Vec<LateShares> {
    const TOL_HOURS: f64 = 1e-9;
    let mut rows: Vec<LateShares> = (0..=data.categories)
        .map(|category| LateShares {
            category,
            bids: 0,
            last_hour: 0,
            last_minute: 0,
        })
        .collect();
    for t in &data.timing {
        let left = t.r * t.duration_hours;
        let hour = left <= 1.0 + TOL_HOURS;
        let minute = left <= 1.0 / 60.0 + TOL_HOURS;
        for idx in [0, t.category] {
            rows[idx].bids += 1;
            rows[idx].last_hour += hour as usize;
            rows[idx].last_minute += minute as usize;
        }
    }
    rows
}
