#![allow(dead_code)]

use placekit::exec_prob::{ExecKind, ExecProbability};

/// ρ = 0.7 + 0.2·tanh(3d)(1 − e^{−t}) − 0.1d², smooth in both arguments,
/// constant in t at d = 0.
pub struct SmoothRho;

fn sech2(v: f64) -> f64 {
    let c = v.cosh();
    1.0 / (c * c)
}

impl ExecProbability for SmoothRho {
    fn kind(&self) -> ExecKind {
        ExecKind::Tabulated
    }
    fn value(&self, d: f64, t: f64) -> f64 {
        0.7 + 0.2 * (3.0 * d).tanh() * (1.0 - (-t).exp()) - 0.1 * d * d
    }
    fn d_depth(&self, d: f64, t: f64) -> f64 {
        0.6 * sech2(3.0 * d) * (1.0 - (-t).exp()) - 0.2 * d
    }
    fn d_time(&self, d: f64, t: f64) -> f64 {
        0.2 * (3.0 * d).tanh() * (-t).exp()
    }
    fn d2_depth(&self, d: f64, t: f64) -> f64 {
        -3.6 * sech2(3.0 * d) * (3.0 * d).tanh() * (1.0 - (-t).exp()) - 0.2
    }
    fn d2_time_depth(&self, d: f64, t: f64) -> f64 {
        0.6 * sech2(3.0 * d) * (-t).exp()
    }
    fn rho0(&self) -> f64 {
        0.7
    }
}

/// Relative difference with an absolute floor.
pub fn rel_diff(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

pub fn grid_argmin<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    let mut best = (lo, f(lo));
    for k in 1..=n {
        let x = lo + (hi - lo) * k as f64 / n as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}
