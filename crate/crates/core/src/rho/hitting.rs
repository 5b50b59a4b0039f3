//! First passage of the best ask to the placement level.

use crate::error::{Error, Result};
use crate::market::{MarketParams, PriceModel};
use crate::numerics::{ln_mills_ratio, ln_normal_pdf};

/// The price model whose first passage below the initial best ask is needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HittingModel {
    pub kind: PriceModel,
    pub params: MarketParams,
}

impl HittingModel {
    pub fn new(kind: PriceModel, params: MarketParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { kind, params })
    }

    /// Drift of the driving Brownian motion (log-price drift for Black-Scholes).
    pub fn drift(&self) -> f64 {
        match self.kind {
            PriceModel::Bachelier => self.params.mu,
            PriceModel::BlackScholes => self.params.mu - 0.5 * self.params.sigma * self.params.sigma,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.params.sigma
    }

    /// Price distance below the initial best ask for a model depth.
    pub fn price_depth(&self, depth: f64) -> f64 {
        match self.kind {
            PriceModel::Bachelier => depth,
            PriceModel::BlackScholes => -self.params.s0 * (-depth).exp_m1(),
        }
    }

    /// Model depth for a price distance below the initial best ask.
    pub fn model_depth(&self, price_depth: f64) -> Result<f64> {
        match self.kind {
            PriceModel::Bachelier => Ok(price_depth),
            PriceModel::BlackScholes => {
                if price_depth >= self.params.s0 {
                    return Err(Error::InvalidInput(format!(
                        "price depth {price_depth} reaches below zero price"
                    )));
                }
                Ok(-(-price_depth / self.params.s0).ln_1p())
            }
        }
    }

    /// `ln P(τ < t)` for the level at `depth`.
    pub fn ln_hit_probability(&self, depth: f64, t: f64) -> f64 {
        let m = self.drift();
        let s = self.sigma() * t.sqrt();
        let a = (depth + m * t) / s;
        let b = (-depth + m * t) / s;
        let (ra, rb) = (ln_mills_ratio(a), ln_mills_ratio(-b));
        let hi = ra.max(rb);
        ln_normal_pdf(a) + hi + ((ra - hi).exp() + (rb - hi).exp()).ln()
    }

    pub fn hit_probability(&self, depth: f64, t: f64) -> f64 {
        self.ln_hit_probability(depth, t).exp()
    }

    /// Log of the (unconditional) first-passage density at time `s`.
    pub fn ln_passage_density(&self, depth: f64, s: f64) -> f64 {
        let m = self.drift();
        let sigma = self.sigma();
        depth.ln() - sigma.ln() - 1.5 * s.ln() + ln_normal_pdf((depth + m * s) / (sigma * s.sqrt()))
    }
}

/// Density of the hitting time at `s` conditional on hitting before `t`.
pub fn hitting_density(h: &HittingModel, depth: f64, t: f64, s: f64) -> Result<f64> {
    if !(depth > 0.0 && t > 0.0) || !depth.is_finite() || !t.is_finite() {
        return Err(Error::InvalidInput(format!(
            "depth and horizon must be positive, got {depth}, {t}"
        )));
    }
    if !(s > 0.0 && s < t) {
        return Err(Error::InvalidInput(format!("s = {s} must lie in (0, {t})")));
    }
    let ln_p = h.ln_hit_probability(depth, t);
    if !ln_p.is_finite() {
        return Err(Error::Underflow(format!(
            "probability of reaching depth {depth} before {t} is not representable"
        )));
    }
    Ok((h.ln_passage_density(depth, s) - ln_p).exp())
}

/// Points where the conditional density changes character, for quadrature.
pub(crate) fn density_breakpoints(h: &HittingModel, depth: f64, t: f64) -> Vec<f64> {
    let sigma = h.sigma();
    let mut pts = vec![0.0, t];
    // boundary layer below t for levels far beyond σ√t
    let w = 2.0 * sigma * sigma * t * t / (depth * depth);
    for m in [1.0, 10.0, 100.0] {
        pts.push(t - m * w);
    }
    let mode = depth * depth / (3.0 * sigma * sigma);
    pts.push(mode);
    pts.push(0.5 * mode);
    pts.push(2.0 * mode);
    pts.retain(|&p| p >= 0.0 && p <= t && p.is_finite());
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * t);
    pts
}
