//! Race between the bid queue ahead of the order and the refilled best ask.

use crate::error::{Error, Result};
use crate::numerics::{
    bessel_i_scaled_all, erlang_pdf, gamma_p, integrate_detailed, integrate_to_infinity, poisson_pmf, QuadratureSpec,
};

use super::queue::QueueModel;

fn race_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_subdivisions: 4000,
    }
}

/// Density of the time for a best-ask queue of `i` batches to empty, as a
/// birth-death process with arrival rate `lambda_a` and depletion rate `dep_a`.
///
/// Defective when `lambda_a > dep_a`: total mass is `(dep_a / lambda_a)^i`.
pub fn depletion_density_ask(q: &QueueModel, i: u32, s: f64) -> Result<f64> {
    if i == 0 {
        return Err(Error::InvalidInput("ask queue size must be at least 1".into()));
    }
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidInput(format!("time must be finite and >= 0, got {s}")));
    }
    let mut buf = Vec::new();
    Ok(ask_density_with(q, i, s, &mut buf))
}

pub(crate) fn ask_density_with(q: &QueueModel, i: u32, s: f64, buf: &mut Vec<f64>) -> f64 {
    let (lam, dep) = (q.lambda_a, q.dep_a);
    if lam == 0.0 {
        return erlang_pdf(i, dep, s);
    }
    if s == 0.0 {
        return if i == 1 { dep } else { 0.0 };
    }
    let z = 2.0 * (lam * dep).sqrt() * s;
    bessel_i_scaled_all(i, z, buf);
    ask_density_from_bessel(q, i, s, buf[i as usize])
}

/// Density given the scaled Bessel value `I_i(z)·e^{−z}` at `z = 2√(λd)s`.
pub(crate) fn ask_density_from_bessel(q: &QueueModel, i: u32, s: f64, scaled: f64) -> f64 {
    if scaled <= 0.0 {
        return 0.0;
    }
    let (lam, dep) = (q.lambda_a, q.dep_a);
    let gap = lam.sqrt() - dep.sqrt();
    let ln = (i as f64).ln() - s.ln() + 0.5 * i as f64 * (dep / lam).ln() + scaled.ln() - s * gap * gap;
    ln.exp()
}

/// Density of the time for the bid queue to deplete through position `ell`.
pub fn depletion_density_bid(q: &QueueModel, ell: u32, s: f64) -> f64 {
    erlang_pdf(ell, q.dep_b, s)
}

/// `P(σ_b ≤ s)` for the order at position `ell`.
pub fn bid_depletion_cdf(q: &QueueModel, ell: u32, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    gamma_p(ell, q.dep_b * s)
}

fn ask_breakpoints(q: &QueueModel, i: u32, u: f64) -> Vec<f64> {
    let scale = (i as f64 / (q.lambda_a + q.dep_a)).max(1e-6);
    let mut pts = vec![0.0];
    let mut p = 0.05 * scale;
    while p < u {
        pts.push(p);
        p *= 2.0;
    }
    pts.push(u);
    pts
}

/// `∫₀ᵘ g_a^i(s) ds`.
pub fn ask_depletion_cdf(q: &QueueModel, i: u32, u: f64) -> Result<f64> {
    if u <= 0.0 {
        return Ok(0.0);
    }
    let mut buf = Vec::new();
    let r = integrate_detailed(
        |s| ask_density_with(q, i, s, &mut buf),
        &ask_breakpoints(q, i, u),
        &race_spec(),
    )?;
    Ok(r.value.min(1.0))
}

/// Total mass of the ask depletion density, by quadrature over `[0, ∞)`.
pub fn ask_depletion_mass(q: &QueueModel, i: u32) -> Result<f64> {
    let split = 10.0 * i as f64 / (q.lambda_a + q.dep_a);
    let mut buf = Vec::new();
    let head = ask_depletion_cdf(q, i, split)?;
    let tail = integrate_to_infinity(|s| ask_density_with(q, i, s, &mut buf), split, &race_spec())?;
    Ok((head + tail).min(1.0))
}

/// `min(1, (dep_a / lambda_a)^i)`.
pub fn ask_depletion_mass_exact(q: &QueueModel, i: u32) -> f64 {
    if q.lambda_a <= q.dep_a {
        1.0
    } else {
        (q.dep_a / q.lambda_a).powi(i as i32)
    }
}

/// Probability that the bid queue through the order empties before the ask
/// queue of `i` batches does, and within `u`.
pub fn alpha_race(q: &QueueModel, u: f64, i: u32, ell: u32) -> Result<f64> {
    q.validate()?;
    if ell == 0 || i == 0 {
        return Err(Error::InvalidInput("queue positions start at 1".into()));
    }
    if !(u >= 0.0) || !u.is_finite() {
        return Err(Error::InvalidInput(format!(
            "race horizon must be finite and >= 0, got {u}"
        )));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let mut buf = Vec::new();
    let mut pts = ask_breakpoints(q, i, u);
    let bid_mean = ell as f64 / q.dep_b;
    for m in [0.5, 1.0, 1.5] {
        let p = m * bid_mean;
        if p > 0.0 && p < u {
            pts.push(p);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let spec = race_spec();
    let head = integrate_detailed(
        |s| bid_depletion_cdf(q, ell, s) * ask_density_with(q, i, s, &mut buf),
        &pts,
        &spec,
    )?;
    let mass = integrate_detailed(|s| ask_density_with(q, i, s, &mut buf), &pts, &spec)?;
    let survive = (1.0 - mass.value).max(0.0);
    Ok((head.value + bid_depletion_cdf(q, ell, u) * survive).clamp(0.0, 1.0))
}

/// `lim_{u→∞} α(u, i, ell)`, including the event that the ask never empties.
pub fn alpha_infinity(q: &QueueModel, i: u32, ell: u32) -> Result<f64> {
    q.validate()?;
    if ell == 0 || i == 0 {
        return Err(Error::InvalidInput("queue positions start at 1".into()));
    }
    let split = 10.0 * (i as f64 / (q.lambda_a + q.dep_a) + ell as f64 / q.dep_b);
    let spec = race_spec();
    let mut buf = Vec::new();
    let mut pts = ask_breakpoints(q, i, split);
    let bid_mean = ell as f64 / q.dep_b;
    pts.extend([0.5 * bid_mean, bid_mean, 1.5 * bid_mean]);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let both = |s: f64, buf: &mut Vec<f64>| bid_depletion_cdf(q, ell, s) * ask_density_with(q, i, s, buf);
    let head = integrate_detailed(|s| both(s, &mut buf), &pts, &spec)?.value;
    let tail = integrate_to_infinity(|s| both(s, &mut buf), split, &spec)?;
    let mass = ask_depletion_mass(q, i)?;
    Ok((head + tail + 1.0 - mass).clamp(0.0, 1.0))
}

/// Execution probability for an order placed at the best bid as the
/// horizon shrinks to zero: `Σ_i f(i) α_∞(i, ell)` for a refill pmf `refill`
/// (`refill[i − 1]` is the weight of `i` batches).
pub fn rho_limit_0plus(q: &QueueModel, refill: &[f64], ell: u32) -> Result<f64> {
    let mut total = 0.0;
    for (k, &w) in refill.iter().enumerate() {
        if w > 0.0 {
            total += w * alpha_infinity(q, k as u32 + 1, ell)?;
        }
    }
    Ok(total)
}

/// Probability that `j` of the `Q` orders ahead at `k` ticks have cancelled
/// by time `s`; `j = Q` carries the whole Poisson tail.
pub fn cancellations_ahead(q: &QueueModel, k: u32, s: f64, j: u32) -> Result<f64> {
    let cap = q.queue_at(k);
    if j > cap {
        return Err(Error::InvalidInput(format!(
            "{j} cancellations requested but only {cap} orders are queued at level {k}"
        )));
    }
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidInput(format!("time must be finite and >= 0, got {s}")));
    }
    Ok(cancellation_weight(q.theta_at(k) * s, j, cap))
}

pub(crate) fn cancellation_weight(mean: f64, j: u32, cap: u32) -> f64 {
    if j < cap {
        poisson_pmf(j, mean)
    } else if j == 0 {
        1.0
    } else {
        gamma_p(j, mean)
    }
}
