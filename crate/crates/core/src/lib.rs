//! Hierarchical models of online-auction bidding behaviour.
//!
//! Two models share a bidder-experience covariate:
//!
//! * a bid-timing model, where the fraction of the auction remaining at a
//!   bidder's final bid follows a beta distribution whose two shapes are
//!   log-linear in log-experience (with a category-specific intercept on
//!   the second shape), and
//! * a bid-multiplicity model, where the number of bids a bidder places in
//!   one auction follows a Conway–Maxwell–Poisson law whose rate is
//!   log-linear in log-experience with a category-specific intercept.
//!
//! The crate is `no_std` (with `alloc`). File formats, thread-parallel
//! chains and the command-line front end live in the `auction-bids` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod count;
pub mod data;
pub mod error;
pub mod estimates;
pub mod mcmc;
pub mod report;
pub mod special;
pub mod synth;
pub mod timing;

pub mod cmp;

pub use error::{Error, Result};
