//! Fixtures shared by the benchmarks.

use placekit::{HittingModel, MarketParams, PriceModel, QueueModel};

/// Drift −0.25, volatility 0.2, round-trip cost 0.006.
pub fn bachelier_params() -> MarketParams {
    MarketParams::new(-0.25, 0.2, 50.0, 0.003, 0.003).expect("valid parameters")
}

/// Drift −0.1, volatility 0.2, initial price 50, round-trip cost 0.006.
pub fn black_scholes_params() -> MarketParams {
    MarketParams::new(-0.1, 0.2, 50.0, 0.003, 0.003).expect("valid parameters")
}

/// Driftless per-second price with the reference order flow.
pub fn queue_setup() -> (QueueModel, HittingModel) {
    let market = MarketParams::new(0.0, 0.2, 50.0, 0.0, 0.0).expect("valid parameters");
    let hitting = HittingModel::new(PriceModel::Bachelier, market).expect("valid hitting model");
    (QueueModel::reference(), hitting)
}
