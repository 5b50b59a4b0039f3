//! Optimal placement depth under the two price models.

pub mod bm;
pub mod gbm;

use crate::error::{Error, Result};
use crate::numerics::{find_root_detailed, RootBracket, Tolerances};

/// Where the minimizer of the expected cost sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCase {
    /// A finite positive depth with vanishing derivative.
    Interior,
    /// Cost is minimized at the best quote (depth 0⁺): a market-like order.
    TrivialZero,
    /// No sign change of the derivative below the search ceiling.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementSolution {
    /// Optimal depth; `0` for [`BoundaryCase::TrivialZero`], `+∞` for [`BoundaryCase::Unbounded`].
    pub depth: f64,
    pub cost: f64,
    /// Bracket in depth coordinates handed to the root finder.
    pub bracket: Option<RootBracket>,
    pub iterations: usize,
    pub boundary_case: BoundaryCase,
    /// Second derivative at the root is non-negative (vacuous unless interior).
    pub second_order_ok: bool,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: Tolerances,
    /// Search ceiling for the depth; model-specific default when absent.
    pub ceiling: Option<f64>,
    /// Geometric growth ratio of the sign-change scan.
    pub scan_ratio: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            ceiling: None,
            scan_ratio: 1.05,
        }
    }
}

/// Two-term expansion of the optimal depth just after the critical time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearCriticalExpansion {
    pub first_order: f64,
    pub second_order: f64,
    /// Coefficient of `(t − base)`.
    pub slope: f64,
    /// Coefficient of `(t − base)²`.
    pub curvature: f64,
    /// Expansion point: the critical time or its closed-form upper bound.
    pub base_time: f64,
}

/// Which time the near-critical expansion is centred on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpansionBase {
    #[default]
    CriticalTime,
    /// The closed-form bound on the critical time, used when solving for it is undesirable.
    UpperBound,
}

/// Combines at-zero partials into the expansion coefficients.
///
/// `c_xx`, `c_tx` are second partials at the base point; `c_xxx`, `c_txx`,
/// `c_xtt` the third partials.
pub(crate) fn expansion_coefficients(c_xx: f64, c_tx: f64, c_xxx: f64, c_txx: f64, c_xtt: f64) -> Result<(f64, f64)> {
    if !(c_xx > 0.0) {
        return Err(Error::Degenerate(format!(
            "second depth derivative at the best quote is {c_xx}, expected positive"
        )));
    }
    let slope = -c_tx / c_xx;
    if !(slope > 0.0) {
        return Err(Error::Degenerate(format!(
            "first-order expansion coefficient is {slope}, expected positive"
        )));
    }
    let curvature = -(0.5 * c_xxx * slope * slope + c_txx * slope + 0.5 * c_xtt) / c_xx;
    Ok((slope, curvature))
}

pub(crate) enum Located {
    Trivial {
        degenerate: bool,
    },
    Root {
        depth: f64,
        bracket: RootBracket,
        iterations: usize,
    },
    NoSignChange,
}

/// Finds the first − to + sign change of `deriv` on `(0, ceiling]` and
/// refines it in log-depth.
///
/// `deriv` only needs the correct sign and a smooth dependence on depth; the
/// solvers pass derivatives normalized by their largest term so that the
/// sign survives underflow of every individual term.
pub(crate) fn locate_minimum<F: Fn(f64) -> f64>(
    deriv: F,
    deriv_at_zero: f64,
    start: f64,
    ceiling: f64,
    opts: &SolverOptions,
) -> Result<Located> {
    if !deriv_at_zero.is_finite() {
        return Err(Error::InvalidInput(format!(
            "derivative at the best quote is {deriv_at_zero}"
        )));
    }
    if deriv_at_zero >= 0.0 {
        return Ok(Located::Trivial {
            degenerate: deriv_at_zero == 0.0,
        });
    }
    if !(start > 0.0 && ceiling > start) {
        return Err(Error::InvalidInput(format!("invalid scan range ({start}, {ceiling}]")));
    }
    let ratio = opts.scan_ratio.max(1.0001);
    let mut lo = start;
    let mut f_lo = deriv(lo);
    if f_lo >= 0.0 {
        // the root lies below the first scan point
        let (hi, f_hi) = (lo, f_lo);
        let lo = start * 1e-6;
        let f_lo = deriv(lo);
        if f_lo >= 0.0 {
            return Ok(Located::Trivial { degenerate: true });
        }
        return refine(&deriv, lo, hi, f_lo, f_hi, opts);
    }
    loop {
        let hi = (lo * ratio).min(ceiling);
        let f_hi = deriv(hi);
        if !f_hi.is_finite() {
            return Err(Error::InvalidInput(format!("derivative is {f_hi} at depth {hi}")));
        }
        if f_hi >= 0.0 {
            return refine(&deriv, lo, hi, f_lo, f_hi, opts);
        }
        if hi >= ceiling {
            return Ok(Located::NoSignChange);
        }
        lo = hi;
        f_lo = f_hi;
    }
}

fn refine<F: Fn(f64) -> f64>(
    deriv: &F,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    opts: &SolverOptions,
) -> Result<Located> {
    let bracket = RootBracket {
        lo: lo.ln(),
        hi: hi.ln(),
        f_lo,
        f_hi,
    };
    // |f| here is relative to the largest term, so the x tolerance does the work.
    let r = find_root_detailed(
        |u| deriv(u.exp()),
        bracket,
        opts.tol.root,
        1e-3 * opts.tol.root * opts.tol.root,
    )?;
    Ok(Located::Root {
        depth: r.root.exp(),
        bracket: RootBracket { lo, hi, f_lo, f_hi },
        iterations: r.iterations,
    })
}
