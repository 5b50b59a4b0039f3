use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rho::QueueModel;

use super::{EventKind, LobEvent, Side};

/// Minimum number of best-quote events for rate estimation.
pub const MIN_LEVEL1_EVENTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateOptions {
    /// Gaps between consecutive events longer than this (seconds) are not
    /// counted as active time.
    pub max_gap: f64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self { max_gap: 60.0 }
    }
}

/// Best-quote order-flow rates in batches per second, with standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEstimates {
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub dep_a: f64,
    pub dep_b: f64,
    pub lambda_a_se: f64,
    pub lambda_b_se: f64,
    pub dep_a_se: f64,
    pub dep_b_se: f64,
    /// Empirical pmf of the best-ask size once the spread recloses after a
    /// downward price change; `f_a[i - 1]` is the weight of `i` batches.
    pub f_a: Vec<f64>,
    /// Mean size of the best bid exposed by a downward price change.
    pub mean_bid_after_drop: Option<f64>,
    pub active_seconds: f64,
    pub level1_events: usize,
    pub refills: usize,
    /// Names of rates estimated as zero.
    pub degenerate: Vec<String>,
}

impl RateEstimates {
    pub fn is_degenerate(&self) -> bool {
        !self.degenerate.is_empty()
    }
}

#[derive(Default)]
struct Flow {
    total: f64,
    squares: f64,
}

impl Flow {
    fn add(&mut self, size: u32) {
        let s = size as f64;
        self.total += s;
        self.squares += s * s;
    }

    fn rate(&self, seconds: f64) -> (f64, f64) {
        (self.total / seconds, self.squares.sqrt() / seconds)
    }
}

/// Estimates best-quote rates and the refill distribution.
///
/// After a `price_change` that opens the spread to two or more ticks, the
/// next level-1 `add` on the opposite side is the refill that recloses it;
/// it is recorded as a refill size and not counted as an arrival.
pub fn estimate_rates(events: &[LobEvent], opts: &EstimateOptions) -> Result<RateEstimates> {
    if !(opts.max_gap > 0.0) {
        return Err(Error::InvalidInput(format!(
            "max_gap must be positive, got {}",
            opts.max_gap
        )));
    }
    let level1 = events
        .iter()
        .filter(|e| e.level == 1 && e.event != EventKind::PriceChange)
        .count();
    if level1 < MIN_LEVEL1_EVENTS {
        return Err(Error::InsufficientData(format!(
            "{level1} best-quote events, need at least {MIN_LEVEL1_EVENTS}"
        )));
    }
    let mut active = 0.0;
    for w in events.windows(2) {
        let gap = w[1].timestamp - w[0].timestamp;
        if gap <= opts.max_gap {
            active += gap;
        }
    }
    if !(active > 0.0) {
        return Err(Error::InsufficientData("log spans no active time".into()));
    }

    let (mut add_a, mut add_b, mut dep_a, mut dep_b) =
        (Flow::default(), Flow::default(), Flow::default(), Flow::default());
    let mut refills: Vec<u32> = Vec::new();
    let mut exposed_bids: Vec<u32> = Vec::new();
    // side whose refill is pending after a widening price change
    let mut pending: Option<Side> = None;
    for e in events {
        match (e.event, e.side) {
            (EventKind::PriceChange, side) => {
                if side == Side::Bid {
                    exposed_bids.push(e.size);
                }
                pending = (e.level >= 2).then_some(match side {
                    Side::Bid => Side::Ask,
                    Side::Ask => Side::Bid,
                });
            }
            (EventKind::Add, side) if e.level == 1 && pending == Some(side) => {
                if side == Side::Ask {
                    refills.push(e.size);
                }
                pending = None;
            }
            _ if e.level != 1 => {}
            (EventKind::Add, Side::Ask) => add_a.add(e.size),
            (EventKind::Add, Side::Bid) => add_b.add(e.size),
            (_, Side::Ask) => dep_a.add(e.size),
            (_, Side::Bid) => dep_b.add(e.size),
        }
    }

    let f_a = if refills.is_empty() {
        Vec::new()
    } else {
        let max = *refills.iter().max().unwrap() as usize;
        let mut hist = vec![0.0; max];
        for &s in &refills {
            hist[s as usize - 1] += 1.0;
        }
        let n = refills.len() as f64;
        hist.iter().map(|c| c / n).collect()
    };
    let mean_bid_after_drop = (!exposed_bids.is_empty())
        .then(|| exposed_bids.iter().map(|&s| s as f64).sum::<f64>() / exposed_bids.len() as f64);

    let (la, la_se) = add_a.rate(active);
    let (lb, lb_se) = add_b.rate(active);
    let (da, da_se) = dep_a.rate(active);
    let (db, db_se) = dep_b.rate(active);
    let degenerate = [("lambda_a", la), ("lambda_b", lb), ("dep_a", da), ("dep_b", db)]
        .iter()
        .filter(|(_, v)| *v == 0.0)
        .map(|(n, _)| n.to_string())
        .collect();
    Ok(RateEstimates {
        lambda_a: la,
        lambda_b: lb,
        dep_a: da,
        dep_b: db,
        lambda_a_se: la_se,
        lambda_b_se: lb_se,
        dep_a_se: da_se,
        dep_b_se: db_se,
        f_a,
        mean_bid_after_drop,
        active_seconds: active,
        level1_events: level1,
        refills: refills.len(),
        degenerate,
    })
}

/// Assembles a queue model from estimates, cancellation rates for levels
/// `2, 3, …`, and an optional initial bid depth profile (empty when absent).
pub fn build_queue_model(
    est: &RateEstimates,
    theta: Option<&[f64]>,
    depth_profile: Option<&[u32]>,
    tick: f64,
) -> Result<QueueModel> {
    let theta = match theta {
        Some(t) if !t.is_empty() => t.to_vec(),
        _ => {
            return Err(Error::InvalidInput(
                "no cancellation rates beyond the best quote were supplied".into(),
            ))
        }
    };
    if est.f_a.is_empty() {
        return Err(Error::InvalidInput(
            "refill distribution is empty: no refills were observed".into(),
        ));
    }
    let q = QueueModel {
        lambda_a: est.lambda_a,
        lambda_b: est.lambda_b,
        dep_a: est.dep_a,
        dep_b: est.dep_b,
        theta,
        f_a: est.f_a.clone(),
        depth_profile: depth_profile.map(<[u32]>::to_vec).unwrap_or_default(),
        tick,
        best_ask: None,
    };
    q.validate()?;
    Ok(q)
}
