//! Finite-grid diagnostics for the tail conditions on ρ.

use crate::exec_prob::ExecProbability;
use crate::market::PriceModel;

use super::hitting::HittingModel;
use super::queue::QueueModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    /// Largest probed depth; defaults to 500 (Bachelier) or 50 (log-depth).
    pub ceiling: Option<f64>,
    pub points: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            ceiling: None,
            points: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbePoint {
    pub depth: f64,
    pub rho: f64,
    pub slope: f64,
    /// `x²ρ` (Bachelier) or `e^y y² ρ` (log-depth).
    pub tail: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub t: f64,
    pub points: Vec<ProbePoint>,
    pub max_abs_slope: f64,
    pub slope_at_ceiling: f64,
    /// Minimum of the tail metric over the upper half of the grid.
    pub tail_min: f64,
    pub tail_at_ceiling: f64,
    /// `2 g_b^1(0) σ² t²`.
    pub tail_bound: f64,
    /// `ρ(2ε, t) − ρ(ε, t)`.
    pub d_proxy: f64,
    /// `D` at `t/4`, `t/2`, `t`.
    pub d_series: Vec<(f64, f64)>,
    pub d_increasing: bool,
    pub warnings: Vec<String>,
}

fn d_proxy(rho: &dyn ExecProbability, h: &HittingModel, tick: f64, t: f64) -> f64 {
    let depth = |price: f64| h.model_depth(price).unwrap_or(f64::NAN);
    rho.value(depth(2.0 * tick), t) - rho.value(depth(tick), t)
}

/// Evaluates slope and tail behaviour of `rho` on a geometric depth grid at horizon `t`.
pub fn condition_probe(
    rho: &dyn ExecProbability,
    h: &HittingModel,
    q: &QueueModel,
    t: f64,
    opts: &ProbeOptions,
) -> ProbeReport {
    let log_depth = h.kind == PriceModel::BlackScholes;
    let step = if log_depth { q.tick / h.params.s0 } else { q.tick };
    let ceiling = opts.ceiling.unwrap_or(if log_depth { 50.0 } else { 500.0 });
    let lo = 2.0 * step;
    let n = opts.points.max(2);
    let ratio = (ceiling / lo).powf(1.0 / (n - 1) as f64);
    let mut points = Vec::with_capacity(n);
    let mut warnings = Vec::new();
    for k in 0..n {
        let depth = lo * ratio.powi(k as i32);
        let v = rho.value(depth, t);
        let slope = (rho.value(depth + step, t) - rho.value(depth - step, t)) / (2.0 * step);
        let tail = if log_depth {
            depth.exp() * depth * depth * v
        } else {
            depth * depth * v
        };
        if !v.is_finite() {
            warnings.push(format!("ρ not available at depth {depth}"));
        }
        points.push(ProbePoint {
            depth,
            rho: v,
            slope,
            tail,
        });
    }
    let finite = |v: f64| if v.is_finite() { v } else { f64::NAN };
    let max_abs_slope = points
        .iter()
        .map(|p| p.slope.abs())
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let last = *points.last().unwrap();
    let tail_min = points[n / 2..]
        .iter()
        .map(|p| p.tail)
        .filter(|v| v.is_finite())
        .fold(f64::INFINITY, f64::min);
    let sigma = h.params.sigma;
    let tail_bound = 2.0 * q.dep_b * sigma * sigma * t * t;
    if last.tail < tail_bound {
        warnings.push(format!(
            "tail metric {} at depth {} is below the asymptotic bound {}",
            last.tail, last.depth, tail_bound
        ));
    }
    let d_series: Vec<(f64, f64)> = [0.25, 0.5, 1.0]
        .iter()
        .map(|f| (f * t, d_proxy(rho, h, q.tick, f * t)))
        .collect();
    let d_increasing = d_series.windows(2).all(|w| w[1].1 >= w[0].1);
    let d = d_series.last().unwrap().1;
    if d <= 0.0 {
        warnings.push(format!("D({t}) = {d} is not positive"));
    }
    ProbeReport {
        t,
        points,
        max_abs_slope,
        slope_at_ceiling: finite(last.slope),
        tail_min,
        tail_at_ceiling: finite(last.tail),
        tail_bound,
        d_proxy: d,
        d_series,
        d_increasing,
        warnings,
    }
}
