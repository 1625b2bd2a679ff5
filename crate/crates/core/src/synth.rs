//! Synthetic auction datasets drawn from the two models.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Poisson};

use crate::cmp::{CmpParams, CmpSampler};
use crate::count::{link_lambda, CountCoeffs};
use crate::data::{
    clamp_ratio, rescale_experience, AuctionMeta, BidEvent, CountObservation, Dataset,
    TimingObservation,
};
use crate::error::{Error, Result};
use crate::estimates;
use crate::timing::{link_shapes, TimingCoeffs};

/// Number of bidders in each auction.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BidderLaw {
    /// Poisson with the given mean, redrawn until at least `min`.
    TruncatedPoisson { mean: f64, min: u64 },
    Fixed(u64),
}

impl Default for BidderLaw {
    fn default() -> Self {
        BidderLaw::TruncatedPoisson { mean: 5.2, min: 2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SynthConfig {
    pub seed: u64,
    pub n_categories: usize,
    pub auctions_per_category: usize,
    pub bidders: BidderLaw,
    pub duration_hours: f64,
    /// Log-experience is drawn uniformly on `[0, log_exp_max]`.
    pub log_exp_max: f64,
    pub timing: TimingCoeffs,
    pub counts: CountCoeffs,
}

impl SynthConfig {
    /// Published estimates as truth for the first `n_categories` (at most 15)
    /// categories, `ν` fixed at zero.
    pub fn published(seed: u64, n_categories: usize, auctions_per_category: usize) -> Self {
        let n = n_categories.min(estimates::CATEGORIES.len());
        let mut timing = estimates::timing_coeffs();
        timing.psi_late.truncate(n);
        let mut counts = estimates::count_coeffs();
        counts.psi_multi.truncate(n);
        Self {
            seed,
            n_categories: n,
            auctions_per_category,
            bidders: BidderLaw::default(),
            duration_hours: 168.0,
            log_exp_max: 7.0,
            timing,
            counts,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_categories == 0 || self.auctions_per_category == 0 {
            return Err(Error::InvalidParameter(
                "categories and auctions per category must be at least 1".into(),
            ));
        }
        if !(self.duration_hours > 0.0 && self.duration_hours.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "duration must be positive, got {}",
                self.duration_hours
            )));
        }
        if !(self.log_exp_max >= 0.0 && self.log_exp_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "log-experience range must be within [0, inf), got {}",
                self.log_exp_max
            )));
        }
        match self.bidders {
            BidderLaw::TruncatedPoisson { mean, min } => {
                if !(mean > 0.0) || min == 0 {
                    return Err(Error::InvalidParameter(format!(
                        "bidder law needs mean > 0 and min >= 1, got {mean}, {min}"
                    )));
                }
            }
            BidderLaw::Fixed(n) if n == 0 => {
                return Err(Error::InvalidParameter("fixed bidder count must be >= 1".into()))
            }
            BidderLaw::Fixed(_) => {}
        }
        for (found, what) in [
            (self.timing.psi_late.len(), "timing"),
            (self.counts.psi_multi.len(), "count"),
        ] {
            if found != self.n_categories {
                return Err(Error::InvalidParameter(format!(
                    "{what} intercepts: expected {}, found {found}",
                    self.n_categories
                )));
            }
        }
        if !(self.counts.nu >= 0.0) {
            return Err(Error::InvalidParameter(format!("nu = {}", self.counts.nu)));
        }
        // λ is monotone in log-experience, so the range ends bound it
        if self.counts.nu == 0.0 {
            for c in 1..=self.n_categories {
                for le in [0.0, self.log_exp_max] {
                    let lambda = link_lambda(&self.counts, c, le)?;
                    if lambda >= 1.0 {
                        return Err(Error::Divergent { lambda });
                    }
                }
            }
        }
        Ok(())
    }
}

fn draw_bidders<R: Rng>(law: BidderLaw, rng: &mut R) -> Result<u64> {
    match law {
        BidderLaw::Fixed(n) => Ok(n),
        BidderLaw::TruncatedPoisson { mean, min } => {
            let pois = Poisson::new(mean)
                .map_err(|e| Error::InvalidParameter(format!("bidder law: {e}")))?;
            loop {
                let n = pois.sample(rng) as u64;
                if n >= min {
                    return Ok(n);
                }
            }
        }
    }
}

/// Draw a dataset from the generative models.
///
/// Each bidder gets a raw experience score `round(e^u)`, `u` uniform on
/// `[0, log_exp_max]`; scores are then rescaled exactly as ingestion does, so
/// the returned log-experience values survive a round trip through a bid log.
/// Concentration ratios are clamped like ingested ones.
pub fn simulate_dataset(cfg: &SynthConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // (category, auction, raw experience) per bidder
    let mut bidders: Vec<(usize, usize, i64)> = Vec::new();
    for c in 1..=cfg.n_categories {
        for a in 0..cfg.auctions_per_category {
            let auction = (c - 1) * cfg.auctions_per_category + a;
            let n = draw_bidders(cfg.bidders, &mut rng)?;
            for _ in 0..n {
                let u = rng.random::<f64>() * cfg.log_exp_max;
                bidders.push((c, auction, libm::round(libm::exp(u)) as i64));
            }
        }
    }
    let raw: Vec<i64> = bidders.iter().map(|b| b.2).collect();
    let experience = rescale_experience(&raw)?;

    let mut timing = Vec::with_capacity(bidders.len());
    let mut counts = Vec::with_capacity(bidders.len());
    for (&(category, auction, _), &exp) in bidders.iter().zip(&experience) {
        let log_exp = libm::log(exp as f64);
        let shape = link_shapes(&cfg.timing, category, log_exp)?;
        let beta = Beta::new(shape.alpha, shape.beta)
            .map_err(|e| Error::InvalidParameter(format!("beta shapes: {e}")))?;
        let r = clamp_ratio(beta.sample(&mut rng));

        let lambda = link_lambda(&cfg.counts, category, log_exp)?;
        let sampler = CmpSampler::new(&CmpParams::new(lambda, cfg.counts.nu)?)?;
        let bids = 1 + sampler.draw(&mut rng);

        timing.push(TimingObservation {
            category,
            auction,
            r,
            log_exp,
            duration_hours: cfg.duration_hours,
        });
        counts.push(CountObservation {
            category,
            auction,
            bids,
            log_exp,
        });
    }

    Ok(Dataset {
        categories: cfg.n_categories,
        timing,
        counts,
    })
}

/// First auction start time in emitted logs (2003-01-01T00:00:00Z).
pub const LOG_EPOCH: i64 = 1_041_379_200;

/// Reconstruct auction and bid records that ingest back into `data`.
///
/// Expects a final-bid dataset whose timing and count observations are
/// paired index by index and whose smallest experience is 1, as produced by
/// [`simulate_dataset`]. The final bid of each bidder lands at the time
/// implied by its concentration ratio; earlier bids are spread uniformly
/// between the auction start and that final bid.
pub fn bid_log_from_dataset(data: &Dataset, seed: u64) -> Result<(Vec<AuctionMeta>, Vec<BidEvent>)> {
    if data.timing.len() != data.counts.len() {
        return Err(Error::DimensionMismatch {
            expected: data.counts.len(),
            found: data.timing.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);

    let mut meta: Vec<AuctionMeta> = Vec::new();
    let mut events = Vec::new();
    let mut bidder_in_auction = 0usize;
    for (t, c) in data.timing.iter().zip(&data.counts) {
        if t.auction != c.auction || t.category != c.category {
            return Err(Error::InvalidParameter(
                "timing and count observations are not paired".into(),
            ));
        }
        if meta.len() <= t.auction {
            if t.auction != meta.len() {
                return Err(Error::InvalidParameter(format!(
                    "auction {} has no observations",
                    meta.len()
                )));
            }
            let duration = libm::round(t.duration_hours * 3600.0) as i64;
            let start = LOG_EPOCH + t.auction as i64 * 86_400;
            meta.push(AuctionMeta {
                auction_id: format!("A{:06}", t.auction),
                category_id: t.category,
                start_time: start,
                end_time: start + duration,
            });
            bidder_in_auction = 0;
        }
        let auction = &meta[t.auction];
        let duration = auction.duration_secs();
        let final_time = auction.end_time - libm::round(t.r * duration as f64) as i64;
        let feedback = libm::round(libm::exp(t.log_exp)) as i64;
        let bidder_id = format!("B{:06}-{:03}", t.auction, bidder_in_auction);
        bidder_in_auction += 1;

        let mut times: Vec<i64> = (1..c.bids)
            .map(|_| rng.random_range(auction.start_time..=final_time))
            .collect();
        times.sort_unstable();
        times.push(final_time);
        for bid_time in times {
            events.push(BidEvent {
                auction_id: auction.auction_id.clone(),
                bidder_id: bidder_id.clone(),
                bid_time,
                feedback_score: feedback,
            });
        }
    }
    Ok((meta, events))
}
