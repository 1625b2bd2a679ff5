use std::collections::HashMap;

use auction_bids_core::data::{
    build_observations, concentration_ratio, rescale_experience, validate_log, AuctionMeta,
    BidEvent, BuildOptions,
};
use auction_bids_core::Error;
use proptest::prelude::*;

fn auction(id: &str, cat: usize, start: i64, end: i64) -> AuctionMeta {
    AuctionMeta {
        auction_id: id.to_string(),
        category_id: cat,
        start_time: start,
        end_time: end,
    }
}

fn bid(a: &str, b: &str, t: i64, fb: i64) -> BidEvent {
    BidEvent {
        auction_id: a.to_string(),
        bidder_id: b.to_string(),
        bid_time: t,
        feedback_score: fb,
    }
}

/// Random log: a handful of auctions, bidders drawn from a small pool so
/// that the same bidder shows up in several auctions.
fn arb_log() -> impl Strategy<Value = (Vec<AuctionMeta>, Vec<BidEvent>)> {
    (1usize..6).prop_flat_map(|n_auctions| {
        let meta: Vec<AuctionMeta> = (0..n_auctions)
            .map(|i| auction(&format!("a{i}"), 1 + i % 3, 1000 * i as i64, 1000 * i as i64 + 600))
            .collect();
        let events = prop::collection::vec(
            (0..n_auctions, 0usize..5, 0i64..=600, -50i64..500),
            1..60,
        )
        .prop_map(move |rows| {
            rows.into_iter()
                .map(|(a, b, off, fb)| bid(&format!("a{a}"), &format!("u{b}"), 1000 * a as i64 + off, fb))
                .collect::<Vec<_>>()
        });
        (Just(meta), events)
    })
}

#[test]
fn three_bids_one_bidder() {
    let meta = [auction("a", 1, 0, 100)];
    let events = [bid("a", "x", 10, 4), bid("a", "x", 60, 4), bid("a", "x", 30, 4)];
    let d = build_observations(&meta, &events, BuildOptions::default()).unwrap();
    assert_eq!(d.counts.len(), 1);
    assert_eq!(d.counts[0].bids, 3);
    assert!((d.timing[0].r - 0.4).abs() < 1e-15);
}

#[test]
fn two_single_bidders() {
    let meta = [auction("a", 2, 0, 100)];
    let events = [bid("a", "x", 10, 4), bid("a", "y", 60, 9)];
    let d = build_observations(&meta, &events, BuildOptions::default()).unwrap();
    assert_eq!((d.timing.len(), d.counts.len(), d.categories), (2, 2, 2));
    assert!((d.counts[1].log_exp - 6f64.ln()).abs() < 1e-15);
}

#[test]
fn all_bids_keeps_every_timing_row() {
    let meta = [auction("a", 1, 0, 100)];
    let events = [bid("a", "x", 10, 0), bid("a", "x", 60, 0), bid("a", "y", 30, 0)];
    let d = build_observations(&meta, &events, BuildOptions { all_bids: true }).unwrap();
    assert_eq!(d.timing.len(), 3);
    assert_eq!(d.counts.len(), 2);
}

#[test]
fn errors_point_at_offending_row() {
    let meta = [auction("a", 1, 0, 100)];
    let events = [bid("a", "x", 10, 0), bid("a", "x", 101, 0)];
    let (row, e) = validate_log(&meta, &events).unwrap_err();
    assert_eq!(row, 1);
    assert!(matches!(e, Error::BidOutsideWindow { .. }));
    let (row, e) = validate_log(&meta, &[bid("b", "x", 1, 0)]).unwrap_err();
    assert_eq!(row, 0);
    assert!(matches!(e, Error::UnknownAuction(_)));
    assert!(matches!(
        validate_log(&[auction("a", 1, 5, 5)], &[]),
        Err((_, Error::EmptyAuctionWindow(_)))
    ));
}

proptest! {
    #[test]
    fn rescale_is_shift_invariant(xs in prop::collection::vec(-1000i64..1000, 1..50), k in -10_000i64..10_000) {
        let shifted: Vec<i64> = xs.iter().map(|x| x + k).collect();
        let a = rescale_experience(&xs).unwrap();
        prop_assert_eq!(&a, &rescale_experience(&shifted).unwrap());
        prop_assert_eq!(*a.iter().min().unwrap(), 1);
    }

    #[test]
    fn ratio_strictly_decreasing_in_time(start in -10_000i64..10_000, len in 2i64..1_000_000, f in 0.0f64..1.0) {
        let a = auction("a", 1, start, start + len);
        let t1 = start + ((len - 1) as f64 * f) as i64;
        let r1 = concentration_ratio(t1, &a).unwrap();
        let r2 = concentration_ratio(t1 + 1, &a).unwrap();
        let unclamped = |t: i64| (a.end_time - t) as f64 / len as f64;
        prop_assert!(unclamped(t1) > unclamped(t1 + 1));
        prop_assert!(r1 >= r2);
        prop_assert!(r1 > 0.0 && r1 < 1.0);
    }

    #[test]
    fn counts_match_brute_force_tally((meta, events) in arb_log()) {
        let d = build_observations(&meta, &events, BuildOptions::default()).unwrap();
        let mut tally: HashMap<(String, String), (u64, i64, usize)> = HashMap::new();
        for (i, e) in events.iter().enumerate() {
            let slot = tally.entry((e.auction_id.clone(), e.bidder_id.clone())).or_insert((0, i64::MIN, 0));
            slot.0 += 1;
            if e.bid_time >= slot.1 {
                slot.1 = e.bid_time;
                slot.2 = i;
            }
        }
        prop_assert_eq!(d.counts.len(), tally.len());
        prop_assert_eq!(d.timing.len(), tally.len());
        let total: u64 = d.counts.iter().map(|c| c.bids).sum();
        prop_assert_eq!(total, events.len() as u64);

        let min_fb = events.iter().map(|e| e.feedback_score).min().unwrap();
        let mut expected: Vec<(usize, u64, f64, f64)> = tally
            .iter()
            .map(|((a, _), &(n, t, i))| {
                let ai = meta.iter().position(|m| &m.auction_id == a).unwrap();
                let m = &meta[ai];
                let r = ((m.end_time - t) as f64 / (m.end_time - m.start_time) as f64).clamp(1e-6, 1.0 - 1e-6);
                let le = ((events[i].feedback_score - min_fb + 1) as f64).ln();
                (ai, n, r, le)
            })
            .collect();
        let mut got: Vec<(usize, u64, f64, f64)> = d
            .counts
            .iter()
            .zip(&d.timing)
            .map(|(c, t)| (c.auction, c.bids, t.r, c.log_exp))
            .collect();
        // log_exp may differ in the last bit between log implementations
        let key = |v: &(usize, u64, f64, f64)| (v.0, v.1, v.2.to_bits(), (v.3 * 1e9).round() as i64);
        expected.sort_by_key(key);
        got.sort_by_key(key);
        for (g, e) in got.iter().zip(&expected) {
            prop_assert_eq!((g.0, g.1, g.2), (e.0, e.1, e.2));
            prop_assert!((g.3 - e.3).abs() < 1e-12);
        }
    }
}
