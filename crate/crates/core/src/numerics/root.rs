//! Bracketed root finding (Brent's method).

use crate::error::{Error, Result};

/// An interval with function values of opposite (or zero) sign at its ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl RootBracket {
    /// Evaluates `f` at both ends and validates the sign change.
    pub fn new<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64) -> Result<Self> {
        let b = Self {
            lo,
            hi,
            f_lo: f(lo),
            f_hi: f(hi),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lo < self.hi && self.f_lo.is_finite() && self.f_hi.is_finite() && self.f_lo * self.f_hi <= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidBracket {
                lo: self.lo,
                hi: self.hi,
                f_lo: self.f_lo,
                f_hi: self.f_hi,
            })
        }
    }
}

const MAX_ITER: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult {
    pub root: f64,
    pub iterations: usize,
}

/// Root of `f` inside `bracket`.
///
/// Stops when `|f(x)| ≤ tol` or the bracket is narrower than
/// `tol·max(1, |x|)`. Interpolation steps are accepted only while they stay
/// inside the bracket and shrink it fast enough; otherwise it bisects.
pub fn find_root<F: FnMut(f64) -> f64>(f: F, bracket: RootBracket, tol: f64) -> Result<f64> {
    find_root_detailed(f, bracket, tol, tol).map(|r| r.root)
}

/// [`find_root`] with separate tolerances on the bracket width and on `|f|`.
pub fn find_root_detailed<F: FnMut(f64) -> f64>(
    mut f: F,
    bracket: RootBracket,
    x_tol: f64,
    f_tol: f64,
) -> Result<RootResult> {
    bracket.validate()?;
    if !(x_tol > 0.0) || !(f_tol >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "root tolerances must be positive, got {x_tol}, {f_tol}"
        )));
    }
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (bracket.f_lo, bracket.f_hi);
    if fa == 0.0 {
        return Ok(RootResult { root: a, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(RootResult { root: b, iterations: 0 });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iter in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let width_tol = 0.5 * x_tol * b.abs().max(1.0);
        let m = 0.5 * (c - b);
        if fb.abs() <= f_tol || m.abs() <= width_tol {
            return Ok(RootResult {
                root: b,
                iterations: iter,
            });
        }
        if e.abs() >= width_tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (width_tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > width_tol { d } else { width_tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::InvalidInput(format!("function is {fb} at {b}")));
        }
    }
    Err(Error::RootNonConvergence {
        iterations: MAX_ITER,
        last_x: b,
    })
}
