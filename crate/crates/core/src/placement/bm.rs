//! Expected cost and optimal depth when the best ask follows a Brownian motion with drift.
//!
//! Depth `x` is the price distance of the limit order below the initial best
//! ask. Every closed form is a combination of `φ(α)·R(·)` products (`R` the
//! Mills ratio), accumulated in log space so that deep orders and long
//! horizons neither overflow nor lose the sign of the derivative.

use crate::error::{ensure_finite, Error, Result};
use crate::exec_prob::{checked_rho, ExecProbability};
use crate::market::{MarketParams, StandardizedArgs};
use crate::numerics::{
    find_root_detailed, ln_mills_ratio, ln_normal_pdf, normal_cdf, normal_partial_expectation, normal_pdf, LogTerms,
    RootBracket,
};

use super::{
    expansion_coefficients, locate_minimum, BoundaryCase, ExpansionBase, Located, NearCriticalExpansion,
    PlacementSolution, SolverOptions,
};

fn check_depth_time(x: f64, t: f64) -> Result<()> {
    ensure_finite("depth", x)?;
    ensure_finite("horizon", t)?;
    if x <= 0.0 || t <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "depth and horizon must be positive, got x = {x}, t = {t}"
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
    // ln φ(α) + ln R(α) = ln N(−α)
    lower: f64,
    // ln φ(α) + ln R(−β) = ln(e^{−2μx/σ²} N(β))
    reflected: f64,
}

fn logs(p: &MarketParams, x: f64, t: f64) -> Logs {
    let a = StandardizedArgs::new(p, x, t);
    let pdf = ln_normal_pdf(a.alpha_t);
    Logs {
        pdf,
        lower: pdf + ln_mills_ratio(a.alpha_t),
        reflected: pdf + ln_mills_ratio(-a.beta_t),
    }
}

/// Expected cost without domain checks, valid as an analytic function of `x`
/// (including `x ≤ 0`). Used for finite-difference checks at the best quote.
pub fn cost_bm_closed_form(p: &MarketParams, rho: &dyn ExecProbability, x: f64, t: f64) -> f64 {
    let cr = p.c() * rho.value(x, t);
    let mt = p.mu * t;
    let l = logs(p, x, t);
    let mut terms = LogTerms::new();
    terms.push(-x - cr - mt, l.lower);
    terms.push(x - cr - mt, l.reflected);
    mt + p.fee + terms.value()
}

/// Expected cost of a limit order at depth `x` with horizon `t`.
pub fn cost_bm(p: &MarketParams, rho: &dyn ExecProbability, x: f64, t: f64) -> Result<f64> {
    check_depth_time(x, t)?;
    checked_rho(rho, x, t)?;
    Ok(cost_bm_closed_form(p, rho, x, t))
}

fn dc_dx_terms(p: &MarketParams, rho: &dyn ExecProbability, x: f64, t: f64) -> LogTerms {
    let c = p.c();
    let cr = c * rho.value(x, t);
    let cr_x = c * rho.d_depth(x, t);
    let (mu, s2) = (p.mu, p.sigma * p.sigma);
    let mt = mu * t;
    let l = logs(p, x, t);
    let mut terms = LogTerms::new();
    terms.push(2.0 * (cr + mt) / (p.sigma * t.sqrt()), l.pdf);
    terms.push((2.0 / s2) * (-mu * (x - mt) + mu * cr + 0.5 * s2) - cr_x, l.reflected);
    terms.push(-1.0 - cr_x, l.lower);
    terms
}

/// `∂C/∂x` from the closed form, without domain checks.
pub fn dc_dx_bm_closed_form(p: &MarketParams, rho: &dyn ExecProbability, x: f64, t: f64) -> f64 {
    dc_dx_terms(p, rho, x, t).value()
}

pub fn dc_dx_bm(p: &MarketParams, rho: &dyn ExecProbability, x: f64, t: f64) -> Result<f64> {
    check_depth_time(x, t)?;
    checked_rho(rho, x, t)?;
    Ok(dc_dx_bm_closed_form(p, rho, x, t))
}

/// `∂²C/∂x²` from the closed form, without domain checks.
pub fn d2c_dx2_bm_closed_form(p: &MarketParams, rho: &dyn ExecProbability, x: f64, t: f64) -> f64 {
    let c = p.c();
    let cr = c * rho.value(x, t);
    let cr_x = c * rho.d_depth(x, t);
    let cr_xx = c * rho.d2_depth(x, t);
    let (mu, sigma) = (p.mu, p.sigma);
    let s2 = sigma * sigma;
    let st = t.sqrt();
    let mt = mu * t;
    let l = logs(p, x, t);
    let mut terms = LogTerms::new();
    terms.push(
        -(2.0 * cr * x + 4.0 * mt * (cr + mt)) / (s2 * sigma * t * st) + 4.0 * cr_x / (sigma * st),
        l.pdf,
    );
    terms.push(
        (4.0 * mu / (s2 * s2)) * (mu * (x - mt) - mu * cr - s2) - cr_xx + 4.0 * cr_x * mu / s2,
        l.reflected,
    );
    terms.push(-cr_xx, l.lower);
    terms.value()
}

pub fn d2c_dx2_bm(p: &MarketParams, rho: &dyn ExecProbability, x: f64, t: f64) -> Result<f64> {
    check_depth_time(x, t)?;
    checked_rho(rho, x, t)?;
    Ok(d2c_dx2_bm_closed_form(p, rho, x, t))
}

struct AtZero {
    a: f64,
    partial_exp: f64,
    rho: f64,
}

fn at_zero(p: &MarketParams, rho: &dyn ExecProbability, t: f64) -> Result<AtZero> {
    check_horizon(t)?;
    let a = p.mu * t.sqrt() / p.sigma;
    Ok(AtZero {
        a,
        partial_exp: normal_partial_expectation(a),
        rho: checked_rho(rho, 0.0, t)?,
    })
}

/// `∂C/∂x` at the best quote (`x = 0⁺`).
pub fn dc_dx_bm_at0(p: &MarketParams, rho: &dyn ExecProbability, t: f64) -> Result<f64> {
    let z = at_zero(p, rho, t)?;
    let c = p.c();
    let st = t.sqrt();
    Ok(z.partial_exp * (2.0 / p.sigma) * (c * z.rho / st + p.mu * st)
        + libm::erf(z.a * std::f64::consts::FRAC_1_SQRT_2)
        - c * rho.d_depth(0.0, t))
}

/// `∂²C/∂t∂x` at the best quote.
pub fn d2c_dtdx_bm_at0(p: &MarketParams, rho: &dyn ExecProbability, t: f64) -> Result<f64> {
    let z = at_zero(p, rho, t)?;
    let c = p.c();
    let sst = p.sigma * t.sqrt();
    Ok(-normal_pdf(z.a) * c * z.rho / (sst * t)
        + 2.0 * p.mu * z.partial_exp / sst
        + 2.0 * c * z.partial_exp * rho.d_time(0.0, t) / sst
        - c * rho.d2_time_depth(0.0, t))
}

/// `∂²C/∂x²` at the best quote.
pub fn d2c_dx2_bm_at0(p: &MarketParams, rho: &dyn ExecProbability, t: f64) -> Result<f64> {
    let z = at_zero(p, rho, t)?;
    let c = p.c();
    let (mu, sigma) = (p.mu, p.sigma);
    let st = t.sqrt();
    Ok(-z.partial_exp
        * (4.0 * mu * (c * z.rho + mu * t) / (sigma.powi(3) * st) - 4.0 * c * rho.d_depth(0.0, t) / (sigma * st))
        - normal_cdf(z.a) * 4.0 * mu / (sigma * sigma)
        - c * rho.d2_depth(0.0, t))
}

/// `θ₀ = √(1 − 2σ²/(μ·ρ·c))`, the large-horizon slope multiplier for a constant ρ.
pub fn theta0(p: &MarketParams, rho_const: f64) -> Result<f64> {
    require_negative_drift(p)?;
    let rc = rho_const * p.c();
    if !(rc > 0.0) {
        return Err(Error::InvalidInput(format!("rho * (r + f) must be positive, got {rc}")));
    }
    Ok((1.0 - 2.0 * p.sigma * p.sigma / (p.mu * rc)).sqrt())
}

fn require_negative_drift(p: &MarketParams) -> Result<()> {
    if p.mu < 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "requires a negative drift, got mu = {}",
            p.mu
        )))
    }
}

/// Sandwich for the optimal depth at long horizons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeTimeBounds {
    pub lower: f64,
    pub upper: f64,
    /// The lower bound is proven for horizons beyond this value.
    pub valid_from: f64,
    pub in_window: bool,
}

pub fn xstar_bounds_large_t(p: &MarketParams, rho_const: f64, t: f64) -> Result<LargeTimeBounds> {
    check_horizon(t)?;
    let th = theta0(p, rho_const)?;
    let rc = rho_const * p.c();
    let valid_from = (rc / -p.mu).max(p.sigma * p.sigma / (p.mu * p.mu * (th - 1.0).powi(2)));
    Ok(LargeTimeBounds {
        lower: -p.sigma * t.sqrt() - p.mu * t * th,
        upper: -p.mu * th * t,
        valid_from,
        in_window: t > valid_from,
    })
}

/// The three bracketed terms of the second-order large-horizon coefficient and its prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta1Parts {
    pub prefactor: f64,
    pub terms: [f64; 3],
}

impl Theta1Parts {
    pub fn value(&self) -> f64 {
        self.prefactor * self.terms.iter().sum::<f64>()
    }
}

pub fn theta1_components(p: &MarketParams, rho_const: f64) -> Result<Theta1Parts> {
    let th = theta0(p, rho_const)?;
    let rc = rho_const * p.c();
    let s2 = p.sigma * p.sigma;
    Ok(Theta1Parts {
        prefactor: s2 * s2 / (2.0 * rc * p.mu.abs() * th),
        terms: [
            -6.0 * (th - 1.0) / (th + 1.0).powi(2),
            (1.0 + 2.0 * p.mu * rc / s2) * (th - 1.0) / (th + 1.0),
            -(th + 1.0).powi(2) / (th - 1.0).powi(2),
        ],
    })
}

/// Limit of `t·(x*(t)²/t² − μ²θ₀²)` as `t → ∞`.
pub fn theta1_large_t(p: &MarketParams, rho_const: f64) -> Result<f64> {
    theta1_components(p, rho_const).map(|c| c.value())
}

fn search_ceiling(p: &MarketParams, rho: &dyn ExecProbability, t: f64) -> f64 {
    let sst = p.sigma * t.sqrt();
    let drift = p.mu.abs() * t;
    if rho.is_constant() && p.mu < 0.0 {
        if let Ok(th) = theta0(p, rho.rho0()) {
            return 10.0 * (drift * th + sst);
        }
    }
    10.0 * (drift + 6.0 * sst)
}

/// Optimal depth with default solver options.
pub fn optimal_x_bm(p: &MarketParams, rho: &dyn ExecProbability, t: f64) -> Result<PlacementSolution> {
    optimal_x_bm_with(p, rho, t, &SolverOptions::default())
}

pub fn optimal_x_bm_with(
    p: &MarketParams,
    rho: &dyn ExecProbability,
    t: f64,
    opts: &SolverOptions,
) -> Result<PlacementSolution> {
    check_horizon(t)?;
    let d0 = dc_dx_bm_at0(p, rho, t)?;
    let ceiling = opts.ceiling.unwrap_or_else(|| search_ceiling(p, rho, t));
    let start = 1e-8 * p.sigma * t.sqrt();
    let located = locate_minimum(|x| dc_dx_terms(p, rho, x, t).normalized(), d0, start, ceiling, opts)?;
    let mut diagnostics = Vec::new();
    let sol = match located {
        Located::Trivial { degenerate } => {
            if degenerate {
                diagnostics.push("derivative vanishes at the best quote (t equals the critical time)".into());
            }
            PlacementSolution {
                depth: 0.0,
                cost: p.fee - p.c() * rho.value(0.0, t),
                bracket: None,
                iterations: 0,
                boundary_case: BoundaryCase::TrivialZero,
                second_order_ok: true,
                diagnostics,
            }
        }
        Located::NoSignChange => {
            diagnostics.push(format!(
                "no sign change of the depth derivative below {ceiling}; growth conditions on rho may fail"
            ));
            PlacementSolution {
                depth: f64::INFINITY,
                cost: p.mu * t + p.fee,
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
            let curv = d2c_dx2_bm_closed_form(p, rho, depth, t);
            let ok = curv >= -1e-8 * curv.abs().max(1.0);
            if !ok {
                diagnostics.push(format!("second derivative {curv} at the root is negative"));
            }
            let cost = cost_bm_closed_form(p, rho, depth, t);
            let far = p.mu * t + p.fee;
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
    Ok(sol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalTimeBm {
    /// Smallest horizon at which resting below the best quote pays.
    pub t0: f64,
    /// Closed-form upper bound `ρ(0⁺)(r+f)/(2|μ|)`.
    pub bar_t0: f64,
    pub within_bound: bool,
}

/// `ρ(0⁺)(r+f)/(2|μ|)`.
pub fn critical_time_bound_bm(p: &MarketParams, rho0: f64) -> Result<f64> {
    require_negative_drift(p)?;
    Ok(rho0 * p.c() / (2.0 * p.mu.abs()))
}

/// Root in `t` of the at-zero depth derivative.
pub fn critical_time_bm(p: &MarketParams, rho: &dyn ExecProbability) -> Result<CriticalTimeBm> {
    let bar_t0 = critical_time_bound_bm(p, rho.rho0())?;
    if !(bar_t0 > 0.0) {
        return Err(Error::InvalidInput("critical time needs rho(0+) * (r + f) > 0".into()));
    }
    let g = |t: f64| dc_dx_bm_at0(p, rho, t).unwrap_or(f64::NAN);
    let t0 = solve_in_log_time(g, bar_t0, "the at-zero depth derivative")?;
    Ok(CriticalTimeBm {
        t0,
        bar_t0,
        within_bound: t0 > 0.0 && t0 <= bar_t0 * (1.0 + 1e-12),
    })
}

/// Root of a function positive at short horizons and negative past `guess`.
pub(crate) fn solve_in_log_time<F: Fn(f64) -> f64>(g: F, guess: f64, what: &str) -> Result<f64> {
    let mut hi = guess;
    let mut g_hi = g(hi);
    let mut grow = 0;
    while g_hi > 0.0 && grow < 40 {
        hi *= 2.0;
        g_hi = g(hi);
        grow += 1;
    }
    let mut lo = guess * 1e-4;
    let mut g_lo = g(lo);
    let mut shrink = 0;
    while g_lo <= 0.0 && shrink < 20 {
        lo *= 1e-2;
        g_lo = g(lo);
        shrink += 1;
    }
    if !(g_lo > 0.0 && g_hi <= 0.0) {
        return Err(Error::NoSignChange(format!(
            "{what} does not change sign between t = {lo:e} ({g_lo:e}) and t = {hi:e} ({g_hi:e})"
        )));
    }
    let bracket = RootBracket {
        lo: lo.ln(),
        hi: hi.ln(),
        f_lo: g_lo,
        f_hi: g_hi,
    };
    let r = find_root_detailed(|u| g(u.exp()), bracket, 1e-13, 0.0)?;
    Ok(r.root.exp())
}

/// Expansion of the optimal depth around the critical time.
pub fn approx_xstar_near_t0(
    p: &MarketParams,
    rho: &dyn ExecProbability,
    t: f64,
    base: ExpansionBase,
) -> Result<NearCriticalExpansion> {
    check_horizon(t)?;
    let ct = critical_time_bm(p, rho)?;
    let t_base = match base {
        ExpansionBase::CriticalTime => {
            if t < ct.t0 * (1.0 - 1e-12) {
                return Err(Error::InvalidInput(format!(
                    "horizon {t} is below the critical time {}",
                    ct.t0
                )));
            }
            ct.t0
        }
        ExpansionBase::UpperBound => ct.bar_t0,
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

/// First- and second-order expansion coefficients at base time `t_base`.
pub fn near_critical_coefficients(p: &MarketParams, rho: &dyn ExecProbability, t_base: f64) -> Result<(f64, f64)> {
    let c_xx = d2c_dx2_bm_at0(p, rho, t_base)?;
    let c_tx = d2c_dtdx_bm_at0(p, rho, t_base)?;
    let hx = 1e-5 * p.sigma * t_base.sqrt();
    let c_xxx = (d2c_dx2_bm_closed_form(p, rho, hx, t_base) - d2c_dx2_bm_closed_form(p, rho, -hx, t_base)) / (2.0 * hx);
    let ht = 1e-5 * t_base;
    let c_txx = (d2c_dx2_bm_at0(p, rho, t_base + ht)? - d2c_dx2_bm_at0(p, rho, t_base - ht)?) / (2.0 * ht);
    let c_xtt = (d2c_dtdx_bm_at0(p, rho, t_base + ht)? - d2c_dtdx_bm_at0(p, rho, t_base - ht)?) / (2.0 * ht);
    expansion_coefficients(c_xx, c_tx, c_xxx, c_txx, c_xtt)
}
