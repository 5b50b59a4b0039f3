use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Poisson order-flow rates at the best quotes and behind the placement level.
///
/// Rates are per second and sizes are in batches. `theta[k - 2]` is the
/// cancellation rate at `k` ticks below the initial best ask (the last entry
/// applies to every deeper level). `depth_profile[k - 1]` is the bid queue
/// size at `k` ticks when the order is placed; missing levels are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueueModel {
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub dep_a: f64,
    pub dep_b: f64,
    #[serde(default)]
    pub theta: Vec<f64>,
    /// `f_a[i - 1]` is the probability that a refilled best ask holds `i` batches.
    pub f_a: Vec<f64>,
    #[serde(default)]
    pub depth_profile: Vec<u32>,
    pub tick: f64,
    /// Size of the best ask when the order is placed; the stationary refill
    /// distribution `f_a` is used when absent.
    #[serde(default)]
    pub best_ask: Option<u32>,
}

/// Cancellation rates at 2..=5 ticks from Cont, Stoikov and Talreja (2010), in events per second.
pub const DEFAULT_THETA: [f64; 4] = [0.81, 0.68, 0.56, 0.47];

impl QueueModel {
    /// Rates estimated for the reference stock, with a geometric refill distribution of mean 6.
    pub fn reference() -> Self {
        Self {
            lambda_a: 21.78,
            lambda_b: 21.98,
            dep_a: 19.32,
            dep_b: 18.68,
            theta: DEFAULT_THETA.to_vec(),
            f_a: geometric_refill(6.0),
            depth_profile: Vec::new(),
            tick: 0.01,
            best_ask: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("lambda_a", self.lambda_a),
            ("lambda_b", self.lambda_b),
            ("dep_a", self.dep_a),
            ("dep_b", self.dep_b),
        ];
        for (name, v) in rates {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInput(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(self.dep_a > 0.0 && self.dep_b > 0.0) {
            return Err(Error::InvalidInput("depletion rates must be positive".into()));
        }
        if let Some(v) = self.theta.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidInput(format!("cancellation rate {v} is invalid")));
        }
        if self.f_a.is_empty() || self.f_a.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(
                "f_a must be a non-empty list of non-negative probabilities".into(),
            ));
        }
        let total: f64 = self.f_a.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("f_a sums to {total}, expected 1")));
        }
        if self.best_ask == Some(0) {
            return Err(Error::InvalidInput("best_ask must be at least 1 batch".into()));
        }
        if !(self.tick > 0.0 && self.tick.is_finite()) {
            return Err(Error::InvalidInput(format!("tick must be positive, got {}", self.tick)));
        }
        Ok(())
    }

    /// Cancellation rate at `k ≥ 2` ticks; zero if no rates are configured.
    pub fn theta_at(&self, k: u32) -> f64 {
        if k < 2 || self.theta.is_empty() {
            return 0.0;
        }
        let idx = ((k - 2) as usize).min(self.theta.len() - 1);
        self.theta[idx]
    }

    /// Bid queue size at `k ≥ 1` ticks when the order is placed.
    pub fn queue_at(&self, k: u32) -> u32 {
        if k == 0 {
            return 0;
        }
        self.depth_profile.get(k as usize - 1).copied().unwrap_or(0)
    }

    pub fn max_queue(&self) -> u32 {
        self.depth_profile.iter().copied().max().unwrap_or(0)
    }

    /// `(size, probability)` pairs of `f_a` up to cumulative mass `1 − tail`,
    /// renormalized to sum to one.
    pub fn refill_support(&self, tail: f64) -> Vec<(u32, f64)> {
        let mut out = Vec::new();
        let mut cum = 0.0;
        for (k, &p) in self.f_a.iter().enumerate() {
            if p > 0.0 {
                out.push((k as u32 + 1, p));
            }
            cum += p;
            if cum >= 1.0 - tail {
                break;
            }
        }
        let total: f64 = out.iter().map(|p| p.1).sum();
        for p in out.iter_mut() {
            p.1 /= total;
        }
        out
    }

    /// [`Self::refill_support`] as a pmf vector indexed by `size − 1`.
    pub fn refill_pmf(&self, tail: f64) -> Vec<f64> {
        let support = self.refill_support(tail);
        let mut v = vec![0.0; support.last().map(|p| p.0 as usize).unwrap_or(1)];
        for (i, f) in support {
            v[i as usize - 1] = f;
        }
        v
    }

    pub fn mean_refill(&self) -> f64 {
        self.f_a.iter().enumerate().map(|(k, p)| (k + 1) as f64 * p).sum()
    }
}

/// Geometric distribution on `1, 2, …` with the given mean, truncated where the
/// tail drops below 1e-13 and renormalized.
pub fn geometric_refill(mean: f64) -> Vec<f64> {
    let p = 1.0 / mean.max(1.0);
    let mut out = Vec::new();
    let mut mass = p;
    let mut tail = 1.0;
    while tail > 1e-13 && out.len() < 10_000 {
        out.push(mass);
        tail -= mass;
        mass *= 1.0 - p;
        if p >= 1.0 {
            break;
        }
    }
    let total: f64 = out.iter().sum();
    out.iter().map(|v| v / total).collect()
}

/// Point mass at `size`.
pub fn fixed_refill(size: u32) -> Vec<f64> {
    let mut out = vec![0.0; size.max(1) as usize];
    out[size.max(1) as usize - 1] = 1.0;
    out
}
