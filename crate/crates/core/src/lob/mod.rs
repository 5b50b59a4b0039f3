//! Level-I order book event logs and queue-model estimation.

mod estimate;
mod parse;
mod synthetic;

pub use estimate::{build_queue_model, estimate_rates, EstimateOptions, RateEstimates, MIN_LEVEL1_EVENTS};
pub use parse::{parse_events, parse_events_from_reader, write_events, Malformed, ParsedLog, MAX_MALFORMED_FRACTION};
pub use synthetic::{synthetic_log, SyntheticLogConfig};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bid,
    Ask,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Add,
    Cancel,
    Execute,
    /// The best queue on `side` emptied and the quote moved away; `level`
    /// is the resulting spread in ticks and `size` the newly exposed queue.
    PriceChange,
}

/// One row of an event log. `level` counts ticks from the opposite best
/// quote, so level 1 is the best quote on `side`. Sizes are in batches of
/// 100 shares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LobEvent {
    pub timestamp: f64,
    pub side: Side,
    pub event: EventKind,
    pub level: u32,
    pub size: u32,
}
