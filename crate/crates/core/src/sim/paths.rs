use crate::error::{Error, Result};
use crate::exec_prob::{checked_rho, ExecProbability};
use crate::market::{MarketParams, PriceModel};
use crate::rho::HittingModel;

use super::{collect_paths, run_paths, Noise, SimConfig};

/// Substeps used to locate a crossing inside a coarse step.
const REFINE: usize = 64;
/// Coarse steps whose crossing probability is below this are skipped by the sampler.
const NEGLIGIBLE_CROSSING: f64 = 1e-14;

/// Driving Brownian motion of the price model: the price itself (Bachelier)
/// or the log-price (Black-Scholes).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Driver {
    drift: f64,
    sigma: f64,
}

impl Driver {
    fn new(p: &MarketParams, model: PriceModel) -> Self {
        let drift = match model {
            PriceModel::Bachelier => p.mu,
            PriceModel::BlackScholes => p.mu - 0.5 * p.sigma * p.sigma,
        };
        Self { drift, sigma: p.sigma }
    }

    /// Endpoint and exact bridge minimum of one step from `a`.
    fn step(&self, noise: &mut Noise, a: f64, dt: f64) -> (f64, f64) {
        let b = a + self.drift * dt + self.sigma * dt.sqrt() * noise.normal();
        let u = noise.uniform();
        let d = a - b;
        let min = 0.5 * (a + b - (d * d - 2.0 * self.sigma * self.sigma * dt * u.ln()).sqrt());
        (b, min)
    }

    /// Probability that a bridge from `a` to `b` over `dt` touches `-level`.
    fn crossing_probability(&self, a: f64, b: f64, level: f64, dt: f64) -> f64 {
        let (ga, gb) = (a + level, b + level);
        if ga <= 0.0 || gb <= 0.0 {
            return 1.0;
        }
        (-2.0 * ga * gb / (self.sigma * self.sigma * dt)).exp()
    }
}

fn check_depth_and_horizon(depth: f64, t: f64) -> Result<()> {
    if !(depth > 0.0) || !depth.is_finite() {
        return Err(Error::InvalidInput(format!("depth must be positive, got {depth}")));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("horizon must be positive, got {t}")));
    }
    Ok(())
}

/// Whether the driver reaches `-level` by `t`, and its terminal value when it does not.
fn run_to_level(noise: &mut Noise, drv: &Driver, level: f64, t: f64, steps: usize) -> Option<f64> {
    let dt = t / steps as f64;
    let mut a = 0.0;
    let mut reached = false;
    for _ in 0..steps {
        let (b, min) = drv.step(noise, a, dt);
        if !reached && min <= -level {
            reached = true;
        }
        a = b;
    }
    if reached {
        None
    } else {
        Some(a)
    }
}

/// Monte Carlo estimate of the expected cost of a limit order at `depth`.
///
/// Per path: if the level is never reached the order is replaced by a market
/// order at `t` (cost `S_t − S_0 + f`); if it is reached, the order fills with
/// probability `ρ(depth, t)` (cost `−x − r`) and otherwise is cancelled and
/// bought at the level plus fee (cost `−x + f`). Here `x` is the price
/// distance to the level. The hit branch then has expectation
/// `−x − ρ(r + f) + f`, matching the closed-form cost.
pub fn simulate_cost_continuous(
    p: &MarketParams,
    rho: &dyn ExecProbability,
    model: PriceModel,
    depth: f64,
    t: f64,
    cfg: &SimConfig,
) -> Result<crate::sim::McEstimate> {
    p.validate()?;
    check_depth_and_horizon(depth, t)?;
    let fill = checked_rho(rho, depth, t)?;
    let steps = cfg.steps_for(t)?;
    let drv = Driver::new(p, model);
    let price_gap = match model {
        PriceModel::Bachelier => depth,
        PriceModel::BlackScholes => -p.s0 * (-depth).exp_m1(),
    };
    run_paths(cfg, |noise| {
        let end = run_to_level(noise, &drv, depth, t, steps);
        let coin = noise.uniform();
        match end {
            Some(a) => {
                let move_ = match model {
                    PriceModel::Bachelier => a,
                    PriceModel::BlackScholes => p.s0 * a.exp_m1(),
                };
                move_ + p.fee
            }
            None if coin < fill => -price_gap - p.rebate,
            None => -price_gap + p.fee,
        }
    })
}

/// Monte Carlo estimate of `P(min_{s≤t} X_s ≤ −depth)` with the exact bridge minimum.
pub fn simulate_hit_probability(
    p: &MarketParams,
    model: PriceModel,
    depth: f64,
    t: f64,
    cfg: &SimConfig,
) -> Result<crate::sim::McEstimate> {
    p.validate()?;
    check_depth_and_horizon(depth, t)?;
    let steps = cfg.steps_for(t)?;
    let drv = Driver::new(p, model);
    run_paths(cfg, |noise| {
        if run_to_level(noise, &drv, depth, t, steps).is_none() {
            1.0
        } else {
            0.0
        }
    })
}

/// First passage time to `-level` before `t`, if any.
///
/// Coarse steps with a non-negligible crossing probability are refined into
/// bridge substeps; the crossing substep is located by exact per-substep
/// crossing draws and the time is placed uniformly inside it.
pub(crate) fn first_passage(noise: &mut Noise, drv: &Driver, level: f64, t: f64, steps: usize) -> Option<f64> {
    let dt = t / steps as f64;
    let sub = dt / REFINE as f64;
    let mut a = 0.0;
    for k in 0..steps {
        let b = a + drv.drift * dt + drv.sigma * dt.sqrt() * noise.normal();
        if drv.crossing_probability(a, b, level, dt) > NEGLIGIBLE_CROSSING {
            // Brownian bridge from a to b, filled in sequentially
            let mut prev = a;
            for j in 0..REFINE {
                let remaining = (REFINE - j) as f64 * sub;
                let next = if j + 1 == REFINE {
                    b
                } else {
                    let mean = prev + (b - prev) * sub / remaining;
                    let var = drv.sigma * drv.sigma * sub * (remaining - sub) / remaining;
                    mean + var.sqrt() * noise.normal()
                };
                let u = noise.uniform();
                if u < drv.crossing_probability(prev, next, level, sub) {
                    let start = k as f64 * dt + j as f64 * sub;
                    return Some(start + noise.uniform() * sub);
                }
                prev = next;
            }
        }
        a = b;
    }
    None
}

pub(crate) fn driver_for(h: &HittingModel) -> Driver {
    Driver::new(&h.params, h.kind)
}

/// Draws a hitting time conditional on hitting before `t`, by rejection.
pub(crate) fn conditional_passage(
    noise: &mut Noise,
    drv: &Driver,
    level: f64,
    t: f64,
    steps: usize,
    max_attempts: usize,
) -> Option<f64> {
    (0..max_attempts).find_map(|_| first_passage(noise, drv, level, t, steps))
}

/// `n` hitting times of the level at `depth`, conditional on hitting before `t`.
pub fn sample_hitting_times(
    h: &HittingModel,
    depth: f64,
    t: f64,
    n: usize,
    seed: u64,
    steps: usize,
) -> Result<Vec<f64>> {
    check_depth_and_horizon(depth, t)?;
    let p_hit = h.hit_probability(depth, t);
    if p_hit < 1e-4 {
        return Err(Error::InvalidInput(format!(
            "hit probability {p_hit:.3e} is too small for rejection sampling"
        )));
    }
    let drv = driver_for(h);
    let attempts = (200.0 / p_hit).ceil() as usize;
    let out: Vec<Option<f64>> = collect_paths(n, seed, |noise| {
        conditional_passage(noise, &drv, depth, t, steps.max(100), attempts)
    });
    out.into_iter()
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| Error::Degenerate("rejection sampler exhausted its attempts".into()))
}
