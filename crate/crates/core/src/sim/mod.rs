//! Monte Carlo oracles for the placement cost and the queue race.
//!
//! Every path draws from its own ChaCha8 stream keyed by `(seed, path index)`,
//! and paths are reduced in fixed-size chunks in index order, so estimates do
//! not depend on the thread count.

mod discrete;
mod noise;
mod paths;
mod queue;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use discrete::{simulate_cost_discrete, simulate_discrete_cases, DiscreteCase, DiscreteCaseCounts};
pub use paths::{sample_hitting_times, simulate_cost_continuous, simulate_hit_probability};
pub use queue::{simulate_ask_depletion, simulate_queue_race, simulate_rho};

pub(crate) use noise::Noise;

/// Paths per reduction chunk.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n_paths: usize,
    /// Time step; `None` uses `t / 200`. Must not exceed `t / 100`.
    #[serde(default)]
    pub dt: Option<f64>,
    pub seed: u64,
    /// Pair each path with its mirror image (`z → −z`, `U → 1 − U`).
    /// `n_paths` counts both members of a pair.
    #[serde(default)]
    pub antithetic: bool,
}

impl SimConfig {
    pub fn new(n_paths: usize, seed: u64) -> Self {
        Self {
            n_paths,
            dt: None,
            seed,
            antithetic: false,
        }
    }

    pub fn with_antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 || (self.antithetic && self.n_paths < 2) {
            return Err(Error::InvalidInput(
                "need at least one path (two with antithetics)".into(),
            ));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
            }
        }
        Ok(())
    }

    /// Number of time steps for horizon `t`.
    pub fn steps_for(&self, t: f64) -> Result<usize> {
        self.validate()?;
        match self.dt {
            None => Ok(200),
            Some(dt) if dt <= t / 100.0 * (1.0 + 1e-12) => Ok((t / dt).round().max(100.0) as usize),
            Some(dt) => Err(Error::InvalidInput(format!(
                "dt = {dt} is coarser than t/100 = {} for horizon {t}",
                t / 100.0
            ))),
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// Independent samples behind the estimate (pairs when antithetic).
    pub n: usize,
}

impl McEstimate {
    /// `(mean − target) / std_error`; infinite when the error is zero and the mean is off.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = self.mean - target;
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }

    /// `|mean − target| ≤ k·std_error`. A sample with no spread cannot
    /// resolve differences below `1/n`, so that is used as the floor.
    pub fn within(&self, target: f64, k: f64) -> bool {
        let d = (self.mean - target).abs();
        d <= k * self.std_error || (self.std_error == 0.0 && d <= 1.0 / self.n.max(1) as f64)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64,
        }
    }

    fn estimate(&self) -> McEstimate {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        McEstimate {
            mean: self.mean,
            std_error: (var / self.n as f64).sqrt(),
            n: self.n,
        }
    }
}

/// Runs `sample` once per path (or mirrored pair) and reduces deterministically.
pub(crate) fn run_paths<F>(cfg: &SimConfig, sample: F) -> Result<McEstimate>
where
    F: Fn(&mut Noise) -> f64 + Sync,
{
    cfg.validate()?;
    let units = if cfg.antithetic { cfg.n_paths / 2 } else { cfg.n_paths };
    let chunks = units.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut m = Moments::default();
            let mut tape = Vec::new();
            for idx in c * CHUNK..((c + 1) * CHUNK).min(units) {
                let mut noise = Noise::recording(cfg.seed, idx as u64, cfg.antithetic, &mut tape);
                let v = sample(&mut noise);
                let v = if cfg.antithetic {
                    let rng = noise.into_rng();
                    let mut mirror = Noise::mirror(rng, &tape);
                    0.5 * (v + sample(&mut mirror))
                } else {
                    v
                };
                m.push(v);
            }
            m
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let est = total.estimate();
    if !est.mean.is_finite() {
        return Err(Error::Degenerate("simulation produced a non-finite mean".into()));
    }
    Ok(est)
}

/// Collects one value per path (no antithetics), in path order.
pub(crate) fn collect_paths<T, F>(n: usize, seed: u64, sample: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut Noise) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let sample = &sample;
            (c * CHUNK..((c + 1) * CHUNK).min(n)).map(move |idx| {
                let mut tape = Vec::new();
                let mut noise = Noise::recording(seed, idx as u64, false, &mut tape);
                sample(&mut noise)
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_merge_matches_single_pass() {
        let data: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut all = Moments::default();
        data.iter().for_each(|v| all.push(*v));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        data[..313].iter().for_each(|v| a.push(*v));
        data[313..].iter().for_each(|v| b.push(*v));
        let m = a.merge(b);
        assert!((m.mean - all.mean).abs() < 1e-12);
        assert!((m.m2 - all.m2).abs() < 1e-8 * all.m2);
    }

    #[test]
    fn step_count_respects_horizon() {
        let cfg = SimConfig::new(10, 1).with_dt(0.01);
        assert_eq!(cfg.steps_for(2.0).unwrap(), 200);
        assert!(cfg.steps_for(0.5).is_err());
        assert_eq!(SimConfig::new(10, 1).steps_for(3.0).unwrap(), 200);
    }
}
