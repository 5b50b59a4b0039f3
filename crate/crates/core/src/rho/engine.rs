use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::exec_prob::{ExecKind, ExecProbability};
use crate::market::PriceModel;
use crate::numerics::quad::kronrod_nodes;
use crate::numerics::{
    bessel_i_scaled_all, erlang_pdf, forward_first, forward_second, gamma_p, integrate_detailed, QuadratureSpec,
};

use super::hitting::{density_breakpoints, HittingModel};
use super::queue::QueueModel;
use super::race::{alpha_infinity, alpha_race, ask_density_from_bessel, cancellation_weight, rho_limit_0plus};

/// Cumulative mass at which the refill distribution is truncated.
pub const REFILL_TAIL: f64 = 1e-6;

type Nodes = [(f64, f64); 15];

/// Race probabilities `A_ℓ(u) = Σ_i f(i) α_u(i, ℓ)` tabulated on a graded grid
/// of `u`, with cubic Hermite interpolation between knots.
///
/// Uses `A_ℓ(u) = ∫₀ᵘ P_b^ℓ ḡ + P_b^ℓ(u) S̄(u)` where `ḡ` is the refill-mixed
/// ask depletion density and `S̄` its survival; `A_ℓ' = g_b^ℓ S̄`.
#[derive(Debug)]
pub struct AlphaTable {
    dep_b: f64,
    knots: Vec<f64>,
    panels: Vec<Nodes>,
    survival: Vec<f64>,
    cache: Vec<OnceLock<Vec<[f64; 2]>>>,
}

impl AlphaTable {
    /// Table covering `[0, horizon]`, caching positions `1..=max_ell`.
    pub fn new(q: &QueueModel, horizon: f64, max_ell: u32) -> Result<Self> {
        q.validate()?;
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidInput(format!(
                "table horizon must be positive, got {horizon}"
            )));
        }
        let support = q.refill_support(REFILL_TAIL);
        let max_i = support.last().map(|p| p.0).unwrap_or(1);
        let fastest = q.lambda_a + q.dep_a + q.dep_b;
        let first = (0.1 / fastest).min(0.002);
        let widest = (0.5 / q.dep_a.max(q.dep_b)).min(0.05);

        let mut knots = vec![0.0];
        let mut w = first;
        while *knots.last().unwrap() < horizon {
            let next = knots.last().unwrap() + w;
            knots.push(next);
            w = (w * 1.15).min(widest);
        }

        let mut buf = Vec::new();
        let mixed = |s: f64, buf: &mut Vec<f64>| -> f64 {
            if q.lambda_a == 0.0 {
                return support.iter().map(|&(i, f)| f * erlang_pdf(i, q.dep_a, s)).sum();
            }
            let z = 2.0 * (q.lambda_a * q.dep_a).sqrt() * s;
            bessel_i_scaled_all(max_i, z, buf);
            support
                .iter()
                .map(|&(i, f)| f * ask_density_from_bessel(q, i, s, buf[i as usize]))
                .sum()
        };
        let mut panels = Vec::with_capacity(knots.len() - 1);
        let mut survival = Vec::with_capacity(knots.len());
        let mut cum = 0.0;
        survival.push(1.0);
        for k in knots.windows(2) {
            let mut nodes = kronrod_nodes(k[0], k[1]);
            for node in nodes.iter_mut() {
                node.1 *= mixed(node.0, &mut buf);
                cum += node.1;
            }
            panels.push(nodes);
            survival.push((1.0 - cum).max(0.0));
        }
        let cache = (0..max_ell.max(1)).map(|_| OnceLock::new()).collect();
        Ok(Self {
            dep_b: q.dep_b,
            knots,
            panels,
            survival,
            cache,
        })
    }

    pub fn horizon(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    /// Probability that the refilled ask has not emptied by the knot nearest `u`.
    pub fn survival_at(&self, u: f64) -> f64 {
        let k = self.knots.partition_point(|&x| x <= u).saturating_sub(1);
        self.survival[k]
    }

    fn build(&self, ell: u32) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.knots.len());
        out.push([0.0, erlang_pdf(ell, self.dep_b, 0.0)]);
        let mut head = 0.0;
        for (k, nodes) in self.panels.iter().enumerate() {
            for &(s, wg) in nodes {
                head += wg * gamma_p(ell, self.dep_b * s);
            }
            let u = self.knots[k + 1];
            let sv = self.survival[k + 1];
            out.push([
                head + gamma_p(ell, self.dep_b * u) * sv,
                erlang_pdf(ell, self.dep_b, u) * sv,
            ]);
        }
        out
    }

    fn interpolate(&self, values: &[[f64; 2]], u: f64) -> f64 {
        let k = self.knots.partition_point(|&x| x <= u).clamp(1, self.knots.len() - 1) - 1;
        let (u0, u1) = (self.knots[k], self.knots[k + 1]);
        let h = u1 - u0;
        let s = (u - u0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let v = (2.0 * s3 - 3.0 * s2 + 1.0) * values[k][0]
            + (s3 - 2.0 * s2 + s) * h * values[k][1]
            + (-2.0 * s3 + 3.0 * s2) * values[k + 1][0]
            + (s3 - s2) * h * values[k + 1][1];
        v.clamp(0.0, 1.0)
    }

    /// `A_ℓ(u)`.
    pub fn alpha(&self, ell: u32, u: f64) -> Result<f64> {
        if ell == 0 {
            return Err(Error::InvalidInput("queue positions start at 1".into()));
        }
        if !(u >= 0.0) || u > self.horizon() {
            return Err(Error::InvalidInput(format!(
                "race horizon {u} outside the tabulated range [0, {}]",
                self.horizon()
            )));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        match self.cache.get(ell as usize - 1) {
            Some(cell) => Ok(self.interpolate(cell.get_or_init(|| self.build(ell)), u)),
            None => Ok(self.interpolate(&self.build(ell), u)),
        }
    }
}

/// Execution probability from the queue model, for one price model.
#[derive(Debug)]
pub struct RhoEngine {
    queue: QueueModel,
    hitting: HittingModel,
    table: AlphaTable,
    rho0: f64,
    spec: QuadratureSpec,
}

impl RhoEngine {
    /// Engine answering queries with `t` up to `horizon` (plus a 1% margin for differencing).
    pub fn new(queue: QueueModel, hitting: HittingModel, horizon: f64) -> Result<Self> {
        queue.validate()?;
        hitting.params.validate()?;
        let front = queue.queue_at(1) + 1;
        let max_ell = queue.max_queue().max(front - 1) + 1;
        let table = AlphaTable::new(&queue, 1.01 * horizon, max_ell)?;
        let rho0 = match queue.best_ask {
            Some(a) => alpha_infinity(&queue, a, front)?,
            None => rho_limit_0plus(&queue, &queue.refill_pmf(REFILL_TAIL), front)?,
        };
        let spec = QuadratureSpec {
            abs_tol: 1e-11,
            rel_tol: 1e-9,
            max_subdivisions: 2000,
        };
        Ok(Self {
            queue,
            hitting,
            table,
            rho0,
            spec,
        })
    }

    pub fn queue(&self) -> &QueueModel {
        &self.queue
    }

    pub fn hitting(&self) -> &HittingModel {
        &self.hitting
    }

    pub fn horizon(&self) -> f64 {
        self.table.horizon()
    }

    pub fn table(&self) -> &AlphaTable {
        &self.table
    }

    /// `ρ(0⁺)` for an order joining the back of the best bid queue.
    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    /// Depth coordinate spanning one tick near the initial quote.
    pub fn depth_step(&self) -> f64 {
        match self.hitting.kind {
            PriceModel::Bachelier => self.queue.tick,
            PriceModel::BlackScholes => self.queue.tick / self.hitting.params.s0,
        }
    }

    /// Tick index of a model depth below the initial best ask.
    pub fn tick_level(&self, depth: f64) -> u32 {
        let ticks = (self.hitting.price_depth(depth) / self.queue.tick).round();
        ticks.clamp(0.0, u32::MAX as f64) as u32
    }

    /// `ρ(depth, t)`. Levels within half a tick of the best bid use the race at the best bid.
    pub fn rho(&self, depth: f64, t: f64) -> Result<f64> {
        if !(depth >= 0.0) || !depth.is_finite() {
            return Err(Error::InvalidInput(format!(
                "depth must be finite and >= 0, got {depth}"
            )));
        }
        if !(t > 0.0) || t > self.horizon() {
            return Err(Error::InvalidInput(format!(
                "t = {t} outside (0, {}] covered by this engine",
                self.horizon()
            )));
        }
        let k = self.tick_level(depth);
        if k <= 1 {
            let front = self.queue.queue_at(1) + 1;
            return match self.queue.best_ask {
                Some(a) => alpha_race(&self.queue, t, a, front),
                None => self.table.alpha(front, t),
            };
        }
        let ahead = self.queue.queue_at(k);
        let theta = self.queue.theta_at(k);
        let ln_p = self.hitting.ln_hit_probability(depth, t);
        if !ln_p.is_finite() {
            return Err(Error::Underflow(format!(
                "probability of reaching depth {depth} before {t} is not representable"
            )));
        }
        let integrand = |s: f64| -> f64 {
            if s <= 0.0 || s >= t {
                return 0.0;
            }
            let dens = (self.hitting.ln_passage_density(depth, s) - ln_p).exp();
            if dens == 0.0 {
                return 0.0;
            }
            let u = t - s;
            let mut race = 0.0;
            for j in 0..=ahead {
                let w = cancellation_weight(theta * s, j, ahead);
                if w > 0.0 {
                    race += w * self.table.alpha(ahead - j + 1, u).unwrap_or(f64::NAN);
                }
            }
            dens * race
        };
        let pts = density_breakpoints(&self.hitting, depth, t);
        let r = integrate_detailed(integrand, &pts, &self.spec)?;
        if !r.value.is_finite() {
            return Err(Error::Degenerate(format!("ρ({depth}, {t}) evaluated to {}", r.value)));
        }
        Ok(r.value.clamp(0.0, 1.0))
    }
}

/// `ρ(depth, t)` from a one-off engine.
pub fn rho(q: &QueueModel, h: &HittingModel, depth: f64, t: f64) -> Result<f64> {
    RhoEngine::new(q.clone(), *h, t)?.rho(depth, t)
}

/// Execution probability of an order joining a best bid of `qb0` orders
/// against a best ask of `qa0` orders, within `t`.
pub fn rho_0plus_of_t(q: &QueueModel, t: f64, qa0: u32, qb0: u32) -> Result<f64> {
    if qa0 == 0 {
        return Ok(0.0);
    }
    alpha_race(q, t, qa0, qb0 + 1)
}

/// [`ExecProbability`] backed by a [`RhoEngine`], with finite-difference partials.
#[derive(Debug, Clone)]
pub struct QueueRho {
    engine: Arc<RhoEngine>,
}

impl QueueRho {
    pub fn new(engine: Arc<RhoEngine>) -> Self {
        Self { engine }
    }

    pub fn engine(&self) -> &RhoEngine {
        &self.engine
    }

    fn eval(&self, depth: f64, t: f64) -> f64 {
        self.engine.rho(depth.max(0.0), t).unwrap_or(f64::NAN)
    }

    fn time_step(&self, t: f64) -> (f64, bool) {
        let h = 1e-3 * t;
        (h, t + h <= self.engine.horizon())
    }
}

impl ExecProbability for QueueRho {
    fn kind(&self) -> ExecKind {
        ExecKind::QueueBacked
    }

    fn value(&self, depth: f64, t: f64) -> f64 {
        self.eval(depth, t)
    }

    fn d_depth(&self, depth: f64, t: f64) -> f64 {
        let h = self.engine.depth_step();
        if depth > h {
            (self.eval(depth + h, t) - self.eval(depth - h, t)) / (2.0 * h)
        } else {
            forward_first(|d| self.eval(d, t), depth, h)
        }
    }

    fn d_time(&self, depth: f64, t: f64) -> f64 {
        let (h, central) = self.time_step(t);
        if central {
            (self.eval(depth, t + h) - self.eval(depth, t - h)) / (2.0 * h)
        } else {
            (self.eval(depth, t) - self.eval(depth, t - h)) / h
        }
    }

    fn d2_depth(&self, depth: f64, t: f64) -> f64 {
        let h = self.engine.depth_step();
        if depth > h {
            (self.eval(depth + h, t) - 2.0 * self.eval(depth, t) + self.eval(depth - h, t)) / (h * h)
        } else {
            forward_second(|d| self.eval(d, t), depth, h)
        }
    }

    fn d2_time_depth(&self, depth: f64, t: f64) -> f64 {
        let (ht, central) = self.time_step(t);
        let (t_hi, t_lo) = if central { (t + ht, t - ht) } else { (t, t - ht) };
        let dt = t_hi - t_lo;
        (self.d_depth(depth, t_hi) - self.d_depth(depth, t_lo)) / dt
    }

    fn rho0(&self) -> f64 {
        self.engine.rho0
    }
}
