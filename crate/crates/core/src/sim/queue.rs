use crate::error::{Error, Result};
use crate::rho::{HittingModel, QueueModel};

use super::paths::{conditional_passage, driver_for};
use super::{run_paths, McEstimate, Noise, SimConfig};

/// One race: does the bid queue through position `ell` empty before the ask
/// queue of `i` batches, and before `u`?
fn race_once(noise: &mut Noise, q: &QueueModel, u: f64, i: u32, ell: u32) -> bool {
    if u <= 0.0 {
        return false;
    }
    let bid_done: f64 = (0..ell).map(|_| noise.exponential(q.dep_b)).sum();
    if bid_done >= u {
        return false;
    }
    let rate = q.lambda_a + q.dep_a;
    let p_down = q.dep_a / rate;
    let (mut clock, mut size) = (0.0, i);
    loop {
        clock += noise.exponential(rate);
        if clock >= bid_done {
            return true;
        }
        if noise.uniform() < p_down {
            size -= 1;
            if size == 0 {
                return false;
            }
        } else {
            size += 1;
        }
    }
}

/// Fraction of simulated races won by the bid queue within `u`.
pub fn simulate_queue_race(q: &QueueModel, u: f64, i: u32, ell: u32, cfg: &SimConfig) -> Result<McEstimate> {
    q.validate()?;
    if i == 0 || ell == 0 {
        return Err(Error::InvalidInput("queue positions start at 1".into()));
    }
    run_paths(cfg, |noise| if race_once(noise, q, u, i, ell) { 1.0 } else { 0.0 })
}

/// Discrete-event estimate of `ρ(depth, t)`: simulated first passage, Poisson
/// cancellations ahead, a refill size drawn from `f_a`, then the race.
pub fn simulate_rho(q: &QueueModel, h: &HittingModel, depth: f64, t: f64, cfg: &SimConfig) -> Result<McEstimate> {
    q.validate()?;
    if !(depth >= 0.0 && t > 0.0) || !depth.is_finite() || !t.is_finite() {
        return Err(Error::InvalidInput(format!("invalid depth {depth} or horizon {t}")));
    }
    let k = (h.price_depth(depth) / q.tick).round().max(0.0) as u32;
    let ask_size = |noise: &mut Noise| match q.best_ask {
        Some(a) if k <= 1 => a,
        _ => noise.categorical(&q.f_a) as u32 + 1,
    };
    if k <= 1 {
        let ell = q.queue_at(1) + 1;
        return run_paths(cfg, |noise| {
            let i = ask_size(noise);
            if race_once(noise, q, t, i, ell) {
                1.0
            } else {
                0.0
            }
        });
    }
    let p_hit = h.hit_probability(depth, t);
    if p_hit < 1e-4 {
        return Err(Error::InvalidInput(format!(
            "hit probability {p_hit:.3e} is too small for the path oracle"
        )));
    }
    let steps = cfg.steps_for(t)?;
    let attempts = (200.0 / p_hit).ceil() as usize;
    let drv = driver_for(h);
    let ahead = q.queue_at(k);
    let theta = q.theta_at(k);
    run_paths(cfg, |noise| {
        let Some(tau) = conditional_passage(noise, &drv, depth, t, steps, attempts) else {
            return f64::NAN;
        };
        let cancelled = noise.poisson_capped(theta * tau, ahead);
        let i = ask_size(noise);
        if race_once(noise, q, t - tau, i, ahead - cancelled + 1) {
            1.0
        } else {
            0.0
        }
    })
}

/// Fraction of best-ask queues of `i` batches that empty by `horizon`.
pub fn simulate_ask_depletion(q: &QueueModel, i: u32, horizon: f64, cfg: &SimConfig) -> Result<McEstimate> {
    q.validate()?;
    if i == 0 {
        return Err(Error::InvalidInput("ask queue size must be at least 1".into()));
    }
    let rate = q.lambda_a + q.dep_a;
    let p_down = q.dep_a / rate;
    run_paths(cfg, |noise| {
        let (mut clock, mut size) = (0.0, i);
        loop {
            clock += noise.exponential(rate);
            if clock > horizon {
                return 0.0;
            }
            if noise.uniform() < p_down {
                size -= 1;
                if size == 0 {
                    return 1.0;
                }
            } else {
                size += 1;
            }
        }
    })
}
