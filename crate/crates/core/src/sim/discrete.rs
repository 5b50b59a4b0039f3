use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec_prob::{checked_rho, ExecProbability};
use crate::market::{MarketParams, PriceModel};

use super::{collect_paths, run_paths, McEstimate, Noise, SimConfig};

/// How a discrete-tick path ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscreteCase {
    /// Level never reached; market order at `t`.
    NotReached,
    /// Order filled at the level.
    Filled,
    /// Not filled, price ticked back up before `t`; bought two ticks above the level.
    Rebound,
    /// Not filled, no further price change by `t`; bought one tick above the level.
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DiscreteCaseCounts {
    pub not_reached: usize,
    pub filled: usize,
    pub rebound: usize,
    pub stalled: usize,
}

struct TickWalk {
    ticks_to_level: i64,
    p_up: f64,
    mean_gap: f64,
    eps: f64,
    x: f64,
    fill: f64,
}

impl TickWalk {
    fn new(
        p: &MarketParams,
        rho: &dyn ExecProbability,
        model: PriceModel,
        x: f64,
        t: f64,
        delta: f64,
        eps: f64,
    ) -> Result<Self> {
        p.validate()?;
        if model != PriceModel::Bachelier {
            return Err(Error::InvalidInput(
                "the tick simulator moves the price additively; use the Bachelier model".into(),
            ));
        }
        if !(eps > 0.0 && delta > 0.0 && t > 0.0) || !(eps * delta * t).is_finite() {
            return Err(Error::InvalidInput(format!(
                "tick size, mean time between changes and horizon must be positive (eps {eps}, delta {delta}, t {t})"
            )));
        }
        let k = (x / eps).round();
        if k < 1.0 || (x / eps - k).abs() > 1e-9 * k.max(1.0) {
            return Err(Error::InvalidInput(format!(
                "depth {x} must be a positive multiple of the tick {eps}"
            )));
        }
        Ok(Self {
            ticks_to_level: k as i64 - 1,
            p_up: (0.5 * (1.0 + p.mu * delta / eps)).clamp(0.0, 1.0),
            mean_gap: delta,
            eps,
            x,
            fill: checked_rho(rho, x, t)?,
        })
    }

    fn run(&self, noise: &mut Noise, p: &MarketParams, t: f64) -> (f64, DiscreteCase) {
        let rate = 1.0 / self.mean_gap;
        let mut clock = 0.0;
        let mut ticks: i64 = 0;
        let reached = loop {
            if ticks <= -self.ticks_to_level {
                break true;
            }
            clock += noise.exponential(rate);
            if clock > t {
                break false;
            }
            ticks += if noise.uniform() < self.p_up { 1 } else { -1 };
        };
        if !reached {
            return (ticks as f64 * self.eps + p.fee, DiscreteCase::NotReached);
        }
        if noise.uniform() < self.fill {
            return (-self.x - p.rebate, DiscreteCase::Filled);
        }
        if clock + noise.exponential(rate) <= t {
            (-self.x + p.fee + 2.0 * self.eps, DiscreteCase::Rebound)
        } else {
            (-self.x + self.eps + p.fee, DiscreteCase::Stalled)
        }
    }
}

/// Expected cost of the tick-level strategy: the best ask moves by `±eps` at
/// exponential times with mean `delta`, with up-probability `½(1 + μδ/ε)`.
///
/// Execution at the level is a coin with probability `rho(x, t)`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_cost_discrete(
    p: &MarketParams,
    rho: &dyn ExecProbability,
    model: PriceModel,
    x: f64,
    t: f64,
    delta: f64,
    eps: f64,
    cfg: &SimConfig,
) -> Result<McEstimate> {
    let walk = TickWalk::new(p, rho, model, x, t, delta, eps)?;
    run_paths(cfg, |noise| walk.run(noise, p, t).0)
}

/// Frequencies of the four outcomes of [`simulate_cost_discrete`].
#[allow(clippy::too_many_arguments)]
pub fn simulate_discrete_cases(
    p: &MarketParams,
    rho: &dyn ExecProbability,
    model: PriceModel,
    x: f64,
    t: f64,
    delta: f64,
    eps: f64,
    cfg: &SimConfig,
) -> Result<DiscreteCaseCounts> {
    cfg.validate()?;
    let walk = TickWalk::new(p, rho, model, x, t, delta, eps)?;
    let cases = collect_paths(cfg.n_paths, cfg.seed, |noise| walk.run(noise, p, t).1);
    let mut out = DiscreteCaseCounts::default();
    for c in cases {
        match c {
            DiscreteCase::NotReached => out.not_reached += 1,
            DiscreteCase::Filled => out.filled += 1,
            DiscreteCase::Rebound => out.rebound += 1,
            DiscreteCase::Stalled => out.stalled += 1,
        }
    }
    Ok(out)
}
