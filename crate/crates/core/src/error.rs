use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("COM-Poisson normalizer diverges for nu = 0 and lambda = {lambda} (needs lambda < 1)")]
    Divergent { lambda: f64 },

    #[error("COM-Poisson series did not converge within {cap} terms")]
    TruncationCap { cap: usize },

    #[error("value {value} outside the support {support}")]
    OutOfSupport { value: f64, support: &'static str },

    #[error("category {category} out of range 1..={categories}")]
    CategoryOutOfRange { category: usize, categories: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("bid at {bid_time} outside auction {auction_id} window [{start_time}, {end_time}]")]
    BidOutsideWindow {
        auction_id: String,
        bid_time: i64,
        start_time: i64,
        end_time: i64,
    },

    #[error("auction {0}: end_time must be after start_time")]
    EmptyAuctionWindow(String),

    #[error("bid references unknown auction {0}")]
    UnknownAuction(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite log posterior: {0}")]
    NonFinite(String),

    #[error("not enough draws for diagnostics: {0}")]
    TooFewDraws(String),

    #[error("zero rank variance")]
    ZeroVariance,
}

impl Error {
    /// Errors that stem from numerical evaluation rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Divergent { .. } | Error::TruncationCap { .. } | Error::NonFinite(_)
        )
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
