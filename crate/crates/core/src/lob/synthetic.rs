use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};

use super::{EventKind, LobEvent, Side};

/// Independent Poisson flows at the best quotes, with occasional downward
/// price changes followed by a refill drawn from `f_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticLogConfig {
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub dep_a: f64,
    pub dep_b: f64,
    /// Downward price changes per second.
    pub drop_rate: f64,
    pub f_a: Vec<f64>,
    /// Size of the bid exposed by each price change.
    pub exposed_bid: u32,
    /// Number of best-quote flow events to generate.
    pub events: usize,
    pub seed: u64,
}

impl SyntheticLogConfig {
    /// Reference rates with a geometric refill of mean 6.
    pub fn reference(events: usize, seed: u64) -> Self {
        Self {
            lambda_a: 21.78,
            lambda_b: 21.98,
            dep_a: 19.32,
            dep_b: 18.68,
            drop_rate: 0.5,
            f_a: crate::rho::geometric_refill(6.0),
            exposed_bid: 38,
            events,
            seed,
        }
    }
}

pub fn synthetic_log(cfg: &SyntheticLogConfig) -> Result<Vec<LobEvent>> {
    let rates = [cfg.lambda_a, cfg.dep_a, cfg.lambda_b, cfg.dep_b];
    let total: f64 = rates.iter().sum();
    if !(total > 0.0) || rates.iter().any(|r| !(*r >= 0.0)) || !(cfg.drop_rate >= 0.0) {
        return Err(Error::InvalidInput(
            "synthetic rates must be non-negative with a positive total".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let flow_clock = Exp::new(total).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let pick = WeightedIndex::new(rates).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let refill = (cfg.drop_rate > 0.0)
        .then(|| WeightedIndex::new(&cfg.f_a))
        .transpose()
        .map_err(|e| Error::InvalidInput(format!("f_a: {e}")))?;
    let mut next_drop = if cfg.drop_rate > 0.0 {
        -rng.random::<f64>().ln() / cfg.drop_rate
    } else {
        f64::INFINITY
    };
    let mut out = Vec::with_capacity(cfg.events + cfg.events / 20);
    let mut clock = 0.0;
    let mut produced = 0;
    while produced < cfg.events {
        let next = clock + flow_clock.sample(&mut rng);
        if next_drop < next {
            let i = refill.as_ref().map(|w| w.sample(&mut rng) as u32 + 1).unwrap_or(1);
            out.push(LobEvent {
                timestamp: next_drop,
                side: Side::Bid,
                event: EventKind::PriceChange,
                level: 2,
                size: cfg.exposed_bid,
            });
            out.push(LobEvent {
                timestamp: next_drop,
                side: Side::Ask,
                event: EventKind::Add,
                level: 1,
                size: i,
            });
            clock = next_drop;
            next_drop += -rng.random::<f64>().ln() / cfg.drop_rate;
            continue;
        }
        clock = next;
        let (side, event) = match pick.sample(&mut rng) {
            0 => (Side::Ask, EventKind::Add),
            1 => (
                Side::Ask,
                if rng.random::<bool>() {
                    EventKind::Cancel
                } else {
                    EventKind::Execute
                },
            ),
            2 => (Side::Bid, EventKind::Add),
            _ => (
                Side::Bid,
                if rng.random::<bool>() {
                    EventKind::Cancel
                } else {
                    EventKind::Execute
                },
            ),
        };
        out.push(LobEvent {
            timestamp: clock,
            side,
            event,
            level: 1,
            size: 1,
        });
        produced += 1;
    }
    Ok(out)
}
