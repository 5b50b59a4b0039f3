//! Market parameters and the standardized arguments used by both price models.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};

/// Drift, volatility, initial best ask, rebate and fee.
///
/// `mu` and `sigma` are per unit of time; for the Bachelier model they are
/// in price units, for Black-Scholes they are log-return rates. Time units
/// are whatever the caller uses consistently (days in the analytic examples,
/// seconds for queue-backed execution probabilities, see [`MarketParams::rescale_time`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketParams {
    pub mu: f64,
    pub sigma: f64,
    pub s0: f64,
    pub rebate: f64,
    pub fee: f64,
}

impl MarketParams {
    pub fn new(mu: f64, sigma: f64, s0: f64, rebate: f64, fee: f64) -> Result<Self> {
        let p = Self {
            mu,
            sigma,
            s0,
            rebate,
            fee,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("mu", self.mu)?;
        ensure_positive("sigma", self.sigma)?;
        ensure_positive("s0", self.s0)?;
        ensure_finite("rebate", self.rebate)?;
        ensure_finite("fee", self.fee)?;
        if self.rebate < 0.0 || self.fee < 0.0 {
            return Err(Error::InvalidInput(format!(
                "rebate and fee must be non-negative, got r = {}, f = {}",
                self.rebate, self.fee
            )));
        }
        Ok(())
    }

    /// Rebate plus fee, the spread earned by a filled limit order over a market order.
    pub fn c(&self) -> f64 {
        self.rebate + self.fee
    }

    /// Same parameters expressed in a time unit `factor` times shorter
    /// (for example `factor = 86_400` turns per-day rates into per-second rates).
    pub fn rescale_time(&self, factor: f64) -> Result<Self> {
        ensure_positive("time rescale factor", factor)?;
        Ok(Self {
            mu: self.mu / factor,
            sigma: self.sigma / factor.sqrt(),
            ..*self
        })
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        Self { sigma, ..*self }
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        Self { mu, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriceModel {
    /// Arithmetic Brownian motion with drift.
    Bachelier,
    /// Geometric Brownian motion.
    BlackScholes,
}

/// Standardized arguments of the Bachelier formulas at depth `x`, horizon `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardizedArgs {
    pub alpha_t: f64,
    pub beta_t: f64,
    pub a_t: f64,
}

impl StandardizedArgs {
    pub fn new(p: &MarketParams, x: f64, t: f64) -> Self {
        let s = p.sigma * t.sqrt();
        Self {
            alpha_t: (x + p.mu * t) / s,
            beta_t: (-x + p.mu * t) / s,
            a_t: p.mu * t.sqrt() / p.sigma,
        }
    }
}

/// Drift combinations of the Black-Scholes formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbmArgs {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl GbmArgs {
    pub fn new(p: &MarketParams) -> Self {
        let half_var = 0.5 * p.sigma * p.sigma;
        Self {
            alpha_plus: p.mu + half_var,
            alpha_minus: p.mu - half_var,
            alpha: (p.mu - half_var) / p.sigma,
            beta: (p.mu + half_var) / p.sigma,
        }
    }
}
