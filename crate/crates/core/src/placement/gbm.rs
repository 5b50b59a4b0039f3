//! Expected cost and optimal depth when the best ask follows a geometric Brownian motion.
//!
//! Depth is measured in log units: an order at log-depth `y` rests at price
//! `S₀e^{−y}`. The log-price has drift `μ − σ²/2`, so the standardized
//! arguments below mix both drift combinations of [`GbmArgs`].

use crate::error::{ensure_finite, Error, Result};
use crate::exec_prob::{checked_rho, ExecProbability};
use crate::market::{GbmArgs, MarketParams};
use crate::numerics::{
    ln_mills_ratio, ln_normal_pdf, normal_cdf, normal_partial_expectation, normal_pdf, normal_sf, LogTerms,
};

use super::bm::solve_in_log_time;
use super::{
    expansion_coefficients, locate_minimum, BoundaryCase, ExpansionBase, Located, NearCriticalExpansion,
    PlacementSolution, SolverOptions,
};

/// Optimal placement in log-depth together with its price level.
#[derive(Debug, Clone, PartialEq)]
pub struct GbmPlacement {
    pub y_star: f64,
    /// `S₀e^{−y*}`; equals `S₀` at the trivial boundary and `0` when unbounded.
    pub price_level: f64,
    pub cost: f64,
    pub boundary_case: BoundaryCase,
    pub solution: PlacementSolution,
    /// Whether `ρ(0⁺,t) < a·S₀|μ|t/(r+f)` holds (the sufficient condition for an interior optimum).
    pub interior_condition: bool,
}

/// Log-depth of the order resting at `price` when the best ask starts at `s0`.
pub fn log_depth_from_price(s0: f64, price: f64) -> Result<f64> {
    if !(price > 0.0 && price < s0) {
        return Err(Error::InvalidInput(format!(
            "price level {price} must lie in (0, {s0})"
        )));
    }
    Ok((s0 / price).ln())
}

/// Price distance `S₀(1 − e^{−y})` of an order at log-depth `y`.
pub fn price_depth(s0: f64, y: f64) -> f64 {
    -s0 * (-y).exp_m1()
}

fn check_depth_time(y: f64, t: f64) -> Result<()> {
    ensure_finite("log-depth", y)?;
    ensure_finite("horizon", t)?;
    if y <= 0.0 || t <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "log-depth and horizon must be positive, got y = {y}, t = {t}"
        )));
    }
    Ok(())
}

fn check_horizon(t: f64) -> Result<()> {
    ensure_finite("horizon", t)?;
    if t <= 0.0 {
        return Err(Error::InvalidInput(format!("horizon must be positive, got {t}")));
    }
    Ok(())
}

struct Logs {
    pdf: f64,
    ln_y: f64,
    // ln R at d, −f₋, −e₋ and d + σ√t
    r_d: f64,
    r_f: f64,
    r_e: f64,
    r_d2: f64,
}

fn logs(p: &MarketParams, y: f64, t: f64) -> Logs {
    let g = GbmArgs::new(p);
    let s = p.sigma * t.sqrt();
    let d = (y + g.alpha_minus * t) / s;
    Logs {
        pdf: ln_normal_pdf(d),
        ln_y: -y,
        r_d: ln_mills_ratio(d),
        r_f: ln_mills_ratio((y - g.alpha_minus * t) / s),
        r_e: ln_mills_ratio((y - g.alpha_plus * t) / s),
        r_d2: ln_mills_ratio(d + s),
    }
}

/// Expected cost without domain checks (analytic in `y`).
pub fn cost_gbm_closed_form(p: &MarketParams, rho: &dyn ExecProbability, y: f64, t: f64) -> f64 {
    let cr = p.c() * rho.value(y, t);
    let l = logs(p, y, t);
    let s0 = p.s0;
    let mut terms = LogTerms::new();
    let ey = l.pdf + l.ln_y;
    terms.push(s0, ey + l.r_d);
    terms.push(s0, ey + l.r_f);
    terms.push(-cr, l.pdf + l.r_d);
    terms.push(-cr, l.pdf + l.r_f);
    terms.push(-s0, ey + l.r_d2);
    terms.push(-s0, ey + l.r_e);
    s0 * (p.mu * t).exp_m1() + p.fee + terms.value()
}

/// Expected cost of a limit order at log-depth `y` with horizon `t`.
pub fn cost_gbm(p: &MarketParams, rho: &dyn ExecProbability, y: f64, t: f64) -> Result<f64> {
    check_depth_time(y, t)?;
    checked_rho(rho, y, t)?;
    Ok(cost_gbm_closed_form(p, rho, y, t))
}

fn dc_dy_terms(p: &MarketParams, rho: &dyn ExecProbability, y: f64, t: f64) -> LogTerms {
    let c = p.c();
    let cr = c * rho.value(y, t);
    let cr_y = c * rho.d_depth(y, t);
    let s2 = p.sigma * p.sigma;
    let k = 2.0 * p.mu / s2;
    let l = logs(p, y, t);
    let s0 = p.s0;
    let ey = l.pdf + l.ln_y;
    let mut terms = LogTerms::new();
    terms.push(-s0 * k, ey + l.r_f);
    terms.push(s0 * k, ey + l.r_e);
    terms.push(s0, ey + l.r_e);
    terms.push(-s0, ey + l.r_d);
    terms.push(2.0 * cr / (p.sigma * t.sqrt()), l.pdf);
    terms.push(-cr * (1.0 - k), l.pdf + l.r_f);
    terms.push(-cr_y, l.pdf + l.r_d);
    terms.push(-cr_y, l.pdf + l.r_f);
    terms
}

/// `∂C/∂y` from the closed form, without domain checks.
pub fn dc_dy_gbm_closed_form(p: &MarketParams, rho: &dyn ExecProbability, y: f64, t: f64) -> f64 {
    dc_dy_terms(p, rho, y, t).value()
}

pub fn dc_dy_gbm(p: &MarketParams, rho: &dyn ExecProbability, y: f64, t: f64) -> Result<f64> {
    check_depth_time(y, t)?;
    checked_rho(rho, y, t)?;
    Ok(dc_dy_gbm_closed_form(p, rho, y, t))
}

/// `∂²C/∂y²` from the closed form, without domain checks.
///
/// Every term of the first derivative is `coef·exp(E)`; its derivative is
/// `(coef·E' + coef')·exp(E)`, where `ln φ(d)` contributes `−d/s`, the
/// factor `e^{−y}` contributes `−1` and `ln R(a)` contributes `(a − 1/R(a))/s`.
pub fn d2c_dy2_gbm_closed_form(p: &MarketParams, rho: &dyn ExecProbability, y: f64, t: f64) -> f64 {
    let c = p.c();
    let cr = c * rho.value(y, t);
    let cr_y = c * rho.d_depth(y, t);
    let cr_yy = c * rho.d2_depth(y, t);
    let s2 = p.sigma * p.sigma;
    let k = 2.0 * p.mu / s2;
    let g = GbmArgs::new(p);
    let s = p.sigma * t.sqrt();
    let d = (y + g.alpha_minus * t) / s;
    let a_f = (y - g.alpha_minus * t) / s;
    let a_e = (y - g.alpha_plus * t) / s;
    let l = logs(p, y, t);
    let s0 = p.s0;
    let ey = l.pdf + l.ln_y;
    let dpdf = -d / s;
    let dr = |a: f64, r: f64| (a - (-r).exp()) / s;
    let (df, de, dd) = (dr(a_f, l.r_f), dr(a_e, l.r_e), dr(d, l.r_d));

    let mut terms = LogTerms::new();
    terms.push(-s0 * k * (dpdf - 1.0 + df), ey + l.r_f);
    terms.push(s0 * (k + 1.0) * (dpdf - 1.0 + de), ey + l.r_e);
    terms.push(-s0 * (dpdf - 1.0 + dd), ey + l.r_d);
    terms.push((2.0 * cr * dpdf + 2.0 * cr_y) / s, l.pdf);
    terms.push(-(1.0 - k) * (cr * (dpdf + df) + cr_y), l.pdf + l.r_f);
    terms.push(-(cr_y * (dpdf + dd) + cr_yy), l.pdf + l.r_d);
    terms.push(-(cr_y * (dpdf + df) + cr_yy), l.pdf + l.r_f);
    terms.value()
}

pub fn d2c_dy2_gbm(p: &MarketParams, rho: &dyn ExecProbability, y: f64, t: f64) -> Result<f64> {
    check_depth_time(y, t)?;
    checked_rho(rho, y, t)?;
    Ok(d2c_dy2_gbm_closed_form(p, rho, y, t))
}

struct AtZero {
    st: f64,
    args: GbmArgs,
    rho: f64,
    // E[(Z + α√t)⁺]
    partial_exp: f64,
}

fn at_zero(p: &MarketParams, rho: &dyn ExecProbability, t: f64) -> Result<AtZero> {
    check_horizon(t)?;
    let args = GbmArgs::new(p);
    let st = t.sqrt();
    Ok(AtZero {
        st,
        args,
        rho: checked_rho(rho, 0.0, t)?,
        partial_exp: normal_partial_expectation(args.alpha * st),
    })
}

/// `∂C/∂y` at the best quote.
pub fn dc_dy_gbm_at0(p: &MarketParams, rho: &dyn ExecProbability, t: f64) -> Result<f64> {
    let z = at_zero(p, rho, t)?;
    let (sigma, s0, c) = (p.sigma, p.s0, p.c());
    Ok((2.0 * c * z.rho / (sigma * z.st)) * z.partial_exp - s0 * drift_inequality_lhs(p, t) - c * rho.d_depth(0.0, t))
}

/// `∂²C/∂t∂y` at the best quote.
pub fn d2c_dtdy_gbm_at0(p: &MarketParams, rho: &dyn ExecProbability, t: f64) -> Result<f64> {
    let z = at_zero(p, rho, t)?;
    let (mu, sigma, s0, c) = (p.mu, p.sigma, p.s0, p.c());
    let g = &z.args;
    let a_st = g.alpha * z.st;
    let sst = sigma * z.st;
    Ok(s0 * (2.0 * mu / sst) * normal_pdf(a_st)
        + (2.0 * s0 * g.beta / sigma) * mu * (mu * t).exp() * normal_cdf(g.beta * z.st)
        - c * z.rho * normal_pdf(a_st) / (sst * t)
        + 2.0 * c * z.partial_exp * rho.d_time(0.0, t) / sst
        - c * rho.d2_time_depth(0.0, t))
}

/// `∂²C/∂y²` at the best quote.
pub fn d2c_dy2_gbm_at0(p: &MarketParams, rho: &dyn ExecProbability, t: f64) -> Result<f64> {
    let z = at_zero(p, rho, t)?;
    let (mu, sigma, s0, c) = (p.mu, p.sigma, p.s0, p.c());
    let s2 = sigma * sigma;
    let g = &z.args;
    let a_st = g.alpha * z.st;
    let k = 2.0 * mu / s2;
    Ok(
        s0 * k * k * normal_cdf(a_st) - (4.0 * s0 * g.beta * g.beta / s2) * (mu * t).exp() * normal_cdf(g.beta * z.st)
            + s0 * normal_sf(a_st)
            - (4.0 * g.alpha / (s2 * z.st)) * c * z.rho * z.partial_exp
            + (4.0 * c * rho.d_depth(0.0, t) / (sigma * z.st)) * z.partial_exp
            - c * rho.d2_depth(0.0, t),
    )
}

/// Left-hand side `1 + (2α/σ)N(α√t) − (2β/σ)e^{μt}N(β√t)` of the drift inequality.
pub fn drift_inequality_lhs(p: &MarketParams, t: f64) -> f64 {
    let g = GbmArgs::new(p);
    let st = t.sqrt();
    1.0 + (2.0 * g.alpha / p.sigma) * normal_cdf(g.alpha * st)
        - (2.0 * g.beta / p.sigma) * (p.mu * t).exp() * normal_cdf(g.beta * st)
}

/// `a = 1` if `μ ≤ −σ²/2`, else `2`.
pub fn drift_regime_factor(p: &MarketParams) -> f64 {
    if p.mu <= -0.5 * p.sigma * p.sigma {
        1.0
    } else {
        2.0
    }
}

/// Both sides of the inequality `lhs > φ(α√t)·2a|μ|√t/σ` for a negative drift.
pub fn drift_inequality(p: &MarketParams, t: f64) -> (f64, f64) {
    let g = GbmArgs::new(p);
    let st = t.sqrt();
    let rhs = normal_pdf(g.alpha * st) * 2.0 * drift_regime_factor(p) * p.mu.abs() * st / p.sigma;
    (drift_inequality_lhs(p, t), rhs)
}

fn search_ceiling(p: &MarketParams, t: f64) -> f64 {
    let s2 = p.sigma * p.sigma;
    10.0 * ((p.mu.abs() + 1.5 * s2) * t + 6.0 * p.sigma * t.sqrt())
}

pub fn optimal_y_gbm(p: &MarketParams, rho: &dyn ExecProbability, t: f64) -> Result<GbmPlacement> {
    optimal_y_gbm_with(p, rho, t, &SolverOptions::default())
}

pub fn optimal_y_gbm_with(
    p: &MarketParams,
    rho: &dyn ExecProbability,
    t: f64,
    opts: &SolverOptions,
) -> Result<GbmPlacement> {
    check_horizon(t)?;
    let d0 = dc_dy_gbm_at0(p, rho, t)?;
    let ceiling = opts.ceiling.unwrap_or_else(|| search_ceiling(p, t));
    let start = 1e-8 * p.sigma * t.sqrt();
    let located = locate_minimum(|y| dc_dy_terms(p, rho, y, t).normalized(), d0, start, ceiling, opts)?;
    let far = p.s0 * (p.mu * t).exp_m1() + p.fee;
    let mut diagnostics = Vec::new();
    let rho_zero = rho.value(0.0, t);
    let interior_condition = p.mu < 0.0 && rho_zero < drift_regime_factor(p) * p.s0 * p.mu.abs() * t / p.c();
    let solution = match located {
        Located::Trivial { degenerate } => {
            if degenerate {
                diagnostics.push("derivative vanishes at the best quote".into());
            }
            PlacementSolution {
                depth: 0.0,
                cost: p.fee - p.c() * rho_zero,
                bracket: None,
                iterations: 0,
                boundary_case: BoundaryCase::TrivialZero,
                second_order_ok: true,
                diagnostics,
            }
        }
        Located::NoSignChange => {
            diagnostics.push(format!("no sign change of the log-depth derivative below {ceiling}"));
            PlacementSolution {
                depth: f64::INFINITY,
                cost: far,
                bracket: None,
                iterations: 0,
                boundary_case: BoundaryCase::Unbounded,
                second_order_ok: true,
                diagnostics,
            }
        }
        Located::Root {
            depth,
            bracket,
            iterations,
        } => {
            let curv = d2c_dy2_gbm(p, rho, depth, t)?;
            let scale = dc_dy_terms(p, rho, depth, t).scale().exp() / (p.sigma * t.sqrt());
            let ok = curv >= -1e-6 * scale;
            if !ok {
                diagnostics.push(format!("second derivative {curv} at the root is negative"));
            }
            let cost = cost_gbm_closed_form(p, rho, depth, t);
            if far < cost {
                diagnostics.push(format!("far-field cost {far} is below the local minimum {cost}"));
            }
            PlacementSolution {
                depth,
                cost,
                bracket: Some(bracket),
                iterations,
                boundary_case: BoundaryCase::Interior,
                second_order_ok: ok,
                diagnostics,
            }
        }
    };
    Ok(GbmPlacement {
        y_star: solution.depth,
        price_level: p.s0 * (-solution.depth).exp(),
        cost: solution.cost,
        boundary_case: solution.boundary_case,
        solution,
        interior_condition,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalTimeGbm {
    pub t0_star: f64,
    /// `ρ(0⁺)(r+f)/(2|μ|S₀)`, the small-cost asymptote.
    pub bar_t: f64,
    /// `2·bar_t`, an upper bound in the strong-drift regime.
    pub tilde_t: f64,
    pub lower: f64,
    /// Upper bound used in the ordering check (`tilde_t` if `μ < −σ²/2`, else `bar_t`).
    pub upper: f64,
    /// The square root in the lower bound left the real domain; `lower` is reported as 0.
    pub lower_clamped: bool,
    pub ordering_holds: bool,
}

/// The lower-bound map `z ↦ t̲(z)` for a negative argument `z`.
///
/// Returns `None` when the square root leaves the real domain.
pub fn lower_bound_map(p: &MarketParams, rho0: f64, z: f64) -> Option<f64> {
    let rc = rho0 * p.c();
    let s2 = p.sigma * p.sigma;
    let am = p.mu - 0.5 * s2;
    let phi0 = normal_pdf(0.0);
    let disc = am * am - 32.0 * s2 * phi0 * p.s0 * z / rc;
    if disc < 0.0 {
        return None;
    }
    let q = (-am - disc.sqrt()) / (8.0 * p.sigma * p.s0 * z);
    Some(rc * rc * q * q)
}

pub fn critical_time_gbm(p: &MarketParams, rho: &dyn ExecProbability) -> Result<CriticalTimeGbm> {
    if p.mu >= 0.0 {
        return Err(Error::InvalidInput(format!(
            "critical time requires a negative drift, got mu = {}",
            p.mu
        )));
    }
    let rho0 = rho.rho0();
    let bar_t = rho0 * p.c() / (2.0 * p.mu.abs() * p.s0);
    if !(bar_t > 0.0) {
        return Err(Error::InvalidInput("critical time needs rho(0+) * (r + f) > 0".into()));
    }
    let tilde_t = 2.0 * bar_t;
    let g = |t: f64| dc_dy_gbm_at0(p, rho, t).unwrap_or(f64::NAN);
    let t0_star = solve_in_log_time(g, bar_t, "the at-zero log-depth derivative")?;
    let s2 = p.sigma * p.sigma;
    let phi0 = normal_pdf(0.0);
    let strong_drift = p.mu < -0.5 * s2;
    let z = if strong_drift {
        p.mu * phi0
    } else {
        let beta = (p.mu + 0.5 * s2) / p.sigma;
        p.mu * phi0 - beta * (-p.mu / 2.0).sqrt() * (-0.5f64).exp()
    };
    let (lower, lower_clamped) = match lower_bound_map(p, rho0, z) {
        Some(v) => (v, false),
        None => (0.0, true),
    };
    let upper = if strong_drift { tilde_t } else { bar_t };
    Ok(CriticalTimeGbm {
        t0_star,
        bar_t,
        tilde_t,
        lower,
        upper,
        lower_clamped,
        ordering_holds: lower < t0_star && t0_star < upper,
    })
}

pub fn approx_ystar_near_t0(
    p: &MarketParams,
    rho: &dyn ExecProbability,
    t: f64,
    base: ExpansionBase,
) -> Result<NearCriticalExpansion> {
    check_horizon(t)?;
    let ct = critical_time_gbm(p, rho)?;
    let t_base = match base {
        ExpansionBase::CriticalTime => {
            if t < ct.t0_star * (1.0 - 1e-12) {
                return Err(Error::InvalidInput(format!(
                    "horizon {t} is below the critical time {}",
                    ct.t0_star
                )));
            }
            ct.t0_star
        }
        ExpansionBase::UpperBound => ct.bar_t,
    };
    let (slope, curvature) = near_critical_coefficients(p, rho, t_base)?;
    let dt = t - t_base;
    Ok(NearCriticalExpansion {
        first_order: slope * dt,
        second_order: slope * dt + curvature * dt * dt,
        slope,
        curvature,
        base_time: t_base,
    })
}

/// Expansion coefficients at `t_base`.
///
/// The pure third log-depth derivative comes from a one-sided second
/// difference of the analytic first derivative (no general closed form for
/// the second derivative is used); the mixed ones from central differences
/// in time of the at-zero second partials.
pub fn near_critical_coefficients(p: &MarketParams, rho: &dyn ExecProbability, t_base: f64) -> Result<(f64, f64)> {
    let c_yy = d2c_dy2_gbm_at0(p, rho, t_base)?;
    let c_ty = d2c_dtdy_gbm_at0(p, rho, t_base)?;
    let h = 1e-3 * p.sigma * t_base.sqrt();
    let g = |y: f64| dc_dy_gbm_closed_form(p, rho, y, t_base);
    let c_yyy = (2.0 * g(0.0) - 5.0 * g(h) + 4.0 * g(2.0 * h) - g(3.0 * h)) / (h * h);
    let ht = 1e-5 * t_base;
    let c_tyy = (d2c_dy2_gbm_at0(p, rho, t_base + ht)? - d2c_dy2_gbm_at0(p, rho, t_base - ht)?) / (2.0 * ht);
    let c_ytt = (d2c_dtdy_gbm_at0(p, rho, t_base + ht)? - d2c_dtdy_gbm_at0(p, rho, t_base - ht)?) / (2.0 * ht);
    expansion_coefficients(c_yy, c_ty, c_yyy, c_tyy, c_ytt)
}

/// Long-horizon behaviour of the optimal log-depth for a constant ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeHorizonGbm {
    /// `lim y*(t)/t = −μ + 3σ²/2 − σ√(−2μ + 2σ²)`.
    pub limit_slope: f64,
    /// Coefficient of the `ln t / t` correction to `y*(t)/t`.
    pub log_coefficient: f64,
    /// `limit_slope + log_coefficient·ln t/t`.
    pub second_order_slope: f64,
    /// `t · second_order_slope`.
    pub second_order_depth: f64,
}

pub fn ystar_large_t_gbm(p: &MarketParams, t: f64) -> Result<LargeHorizonGbm> {
    check_horizon(t)?;
    if p.mu >= 0.0 {
        return Err(Error::InvalidInput(format!(
            "large-horizon asymptotics need a negative drift, got {}",
            p.mu
        )));
    }
    let s2 = p.sigma * p.sigma;
    let root = (-2.0 * p.mu + 2.0 * s2).sqrt();
    let limit_slope = -p.mu + 1.5 * s2 - p.sigma * root;
    let log_coefficient = p.sigma / (2.0 * root);
    let second_order_slope = limit_slope + log_coefficient * t.ln() / t;
    Ok(LargeHorizonGbm {
        limit_slope,
        log_coefficient,
        second_order_slope,
        second_order_depth: t * second_order_slope,
    })
}

/// Small-volatility behaviour of the optimal log-depth for a constant ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallSigmaGbm {
    /// `−μt − √(2σ²t·ln(1/σ))`.
    pub first_order: f64,
    /// First order plus `a/(2 ln(1/σ))·√(2σ²t·ln(1/σ))`.
    pub approx: f64,
    /// `a = ln S₀ + μt + ½ln t − ln(ρ(r+f)) + ½ln 2π`.
    pub a_const: f64,
}

/// Small-σ expansion evaluated at volatility `sigma` (overriding `p.sigma`).
pub fn ystar_small_sigma(p: &MarketParams, rho_const: f64, sigma: f64, t: f64) -> Result<SmallSigmaGbm> {
    check_horizon(t)?;
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::InvalidInput(format!(
            "small-volatility expansion needs sigma in (0, 1), got {sigma}"
        )));
    }
    if p.mu >= 0.0 {
        return Err(Error::InvalidInput(format!(
            "small-volatility expansion needs a negative drift, got {}",
            p.mu
        )));
    }
    let rc = rho_const * p.c();
    if !(rc > 0.0) {
        return Err(Error::InvalidInput("rho * (r + f) must be positive".into()));
    }
    let l = (1.0 / sigma).ln();
    let spread = (2.0 * sigma * sigma * t * l).sqrt();
    let a_const = p.s0.ln() + p.mu * t + 0.5 * t.ln() - rc.ln() + 0.5 * (2.0 * std::f64::consts::PI).ln();
    let first_order = -p.mu * t - spread;
    Ok(SmallSigmaGbm {
        first_order,
        approx: first_order + a_const / (2.0 * l) * spread,
        a_const,
    })
}
