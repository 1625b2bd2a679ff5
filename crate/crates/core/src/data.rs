//! Auction logs and the observation sets derived from them.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Concentration ratios are clamped into `[EPS, 1 - EPS]`.
pub const RATIO_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AuctionMeta {
    pub auction_id: String,
    /// 1-based category index.
    pub category_id: usize,
    /// Unix seconds.
    pub start_time: i64,
    /// Unix seconds.
    pub end_time: i64,
}

impl AuctionMeta {
    pub fn duration_secs(&self) -> i64 {
        self.end_time - self.start_time
    }

    pub fn validate(&self) -> Result<()> {
        if self.end_time <= self.start_time {
            return Err(Error::EmptyAuctionWindow(self.auction_id.clone()));
        }
        if self.category_id == 0 {
            return Err(Error::InvalidParameter(alloc::format!(
                "auction {}: category ids are 1-based",
                self.auction_id
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BidEvent {
    pub auction_id: String,
    pub bidder_id: String,
    /// Unix seconds.
    pub bid_time: i64,
    /// Raw net feedback; may be zero or negative.
    pub feedback_score: i64,
}

/// Timing of one bidder's final bid in one auction.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimingObservation {
    pub category: usize,
    /// 0-based position of the auction within the log.
    pub auction: usize,
    /// Fraction of the auction remaining, clamped into the open unit interval.
    pub r: f64,
    pub log_exp: f64,
    pub duration_hours: f64,
}

/// Number of bids one bidder placed in one auction.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CountObservation {
    pub category: usize,
    pub auction: usize,
    pub bids: u64,
    pub log_exp: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dataset {
    pub categories: usize,
    pub timing: Vec<TimingObservation>,
    pub counts: Vec<CountObservation>,
}

impl Dataset {
    pub fn validate(&self) -> Result<()> {
        let check_cat = |c: usize| {
            if c == 0 || c > self.categories {
                Err(Error::CategoryOutOfRange {
                    category: c,
                    categories: self.categories,
                })
            } else {
                Ok(())
            }
        };
        for t in &self.timing {
            check_cat(t.category)?;
            if !(t.r > 0.0 && t.r < 1.0) {
                return Err(Error::OutOfSupport {
                    value: t.r,
                    support: "(0, 1)",
                });
            }
            if !(t.log_exp >= 0.0 && t.log_exp.is_finite()) {
                return Err(Error::OutOfSupport {
                    value: t.log_exp,
                    support: "[0, inf)",
                });
            }
        }
        for c in &self.counts {
            check_cat(c.category)?;
            if c.bids == 0 {
                return Err(Error::OutOfSupport {
                    value: 0.0,
                    support: "{1, 2, ...}",
                });
            }
        }
        Ok(())
    }

    /// Timing observations grouped by category (index `c - 1`).
    pub fn timing_by_category(&self) -> Vec<Vec<TimingObservation>> {
        let mut out = alloc::vec![Vec::new(); self.categories];
        for t in &self.timing {
            out[t.category - 1].push(*t);
        }
        out
    }

    pub fn counts_by_category(&self) -> Vec<Vec<CountObservation>> {
        let mut out = alloc::vec![Vec::new(); self.categories];
        for c in &self.counts {
            out[c.category - 1].push(*c);
        }
        out
    }
}

/// Shift raw feedback scores so the smallest becomes 1.
pub fn rescale_experience(feedback_scores: &[i64]) -> Result<Vec<u64>> {
    let min = *feedback_scores
        .iter()
        .min()
        .ok_or(Error::Empty("feedback scores"))?;
    Ok(feedback_scores
        .iter()
        .map(|&s| (s - min) as u64 + 1)
        .collect())
}

/// `(end - bid) / (end - start)`, clamped into `[RATIO_EPS, 1 - RATIO_EPS]`.
pub fn concentration_ratio(bid_time: i64, auction: &AuctionMeta) -> Result<f64> {
    auction.validate()?;
    if bid_time < auction.start_time || bid_time > auction.end_time {
        return Err(Error::BidOutsideWindow {
            auction_id: auction.auction_id.clone(),
            bid_time,
            start_time: auction.start_time,
            end_time: auction.end_time,
        });
    }
    let r = (auction.end_time - bid_time) as f64 / auction.duration_secs() as f64;
    Ok(clamp_ratio(r))
}

#[inline]
pub fn clamp_ratio(r: f64) -> f64 {
    r.clamp(RATIO_EPS, 1.0 - RATIO_EPS)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Emit a timing observation for every bid instead of only the final one.
    pub all_bids: bool,
}

/// Check that every auction is well formed and every bid lands inside a
/// known auction's window. Returns the index of the offending bid on error.
pub fn validate_log(meta: &[AuctionMeta], events: &[BidEvent]) -> Result<(), (usize, Error)> {
    let index = auction_index(meta).map_err(|e| (0, e))?;
    for (i, ev) in events.iter().enumerate() {
        let a = index
            .get(ev.auction_id.as_str())
            .ok_or_else(|| (i, Error::UnknownAuction(ev.auction_id.clone())))?;
        concentration_ratio(ev.bid_time, &meta[*a]).map_err(|e| (i, e))?;
    }
    Ok(())
}

fn auction_index(meta: &[AuctionMeta]) -> Result<BTreeMap<&str, usize>> {
    let mut index = BTreeMap::new();
    for (i, m) in meta.iter().enumerate() {
        m.validate()?;
        if index.insert(m.auction_id.as_str(), i).is_some() {
            return Err(Error::InvalidParameter(alloc::format!(
                "duplicate auction id {}",
                m.auction_id
            )));
        }
    }
    Ok(index)
}

/// Derive timing and count observations, one pair per (auction, bidder).
///
/// Observations are ordered by auction (log order) and, within an auction,
/// by each bidder's first appearance. The timing observation uses the
/// bidder's last bid (latest `bid_time`, later row on ties) and the
/// experience is the rescaled feedback score attached to that bid.
pub fn build_observations(
    meta: &[AuctionMeta],
    events: &[BidEvent],
    opts: BuildOptions,
) -> Result<Dataset> {
    let index = auction_index(meta)?;
    let categories = meta.iter().map(|m| m.category_id).max().unwrap_or(0);

    let experience = if events.is_empty() {
        Vec::new()
    } else {
        rescale_experience(&events.iter().map(|e| e.feedback_score).collect::<Vec<_>>())?
    };

    // (auction, bidder) -> event indices, keyed for grouping
    let mut groups: BTreeMap<(usize, &str), Vec<usize>> = BTreeMap::new();
    let mut first_seen: Vec<(usize, usize, &str)> = Vec::new();
    for (i, ev) in events.iter().enumerate() {
        let a = *index
            .get(ev.auction_id.as_str())
            .ok_or_else(|| Error::UnknownAuction(ev.auction_id.clone()))?;
        let key = (a, ev.bidder_id.as_str());
        let slot = groups.entry(key).or_default();
        if slot.is_empty() {
            first_seen.push((a, i, ev.bidder_id.as_str()));
        }
        slot.push(i);
    }
    first_seen.sort_by_key(|&(a, i, _)| (a, i));

    let mut timing = Vec::with_capacity(first_seen.len());
    let mut counts = Vec::with_capacity(first_seen.len());
    for &(a, _, bidder) in &first_seen {
        let auction = &meta[a];
        let rows = &groups[&(a, bidder)];
        let last = *rows
            .iter()
            .max_by_key(|&&i| (events[i].bid_time, i))
            .expect("group is non-empty");
        let log_exp = libm::log(experience[last] as f64);
        let duration_hours = auction.duration_secs() as f64 / 3600.0;

        if opts.all_bids {
            let mut ordered = rows.clone();
            ordered.sort_by_key(|&i| (events[i].bid_time, i));
            for i in ordered {
                timing.push(TimingObservation {
                    category: auction.category_id,
                    auction: a,
                    r: concentration_ratio(events[i].bid_time, auction)?,
                    log_exp,
                    duration_hours,
                });
            }
        } else {
            timing.push(TimingObservation {
                category: auction.category_id,
                auction: a,
                r: concentration_ratio(events[last].bid_time, auction)?,
                log_exp,
                duration_hours,
            });
        }
        counts.push(CountObservation {
            category: auction.category_id,
            auction: a,
            bids: rows.len() as u64,
            log_exp,
        });
    }

    Ok(Dataset {
        categories,
        timing,
        counts,
    })
}
