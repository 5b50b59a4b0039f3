//! Modified Bessel functions of the first kind, integer order.

use crate::error::{Error, Result};

pub const MAX_ORDER: u32 = 500;
pub const MAX_UNSCALED_ARG: f64 = 1e4;

/// `I_n(z)`.
pub fn bessel_i(order: u32, z: f64) -> Result<f64> {
    check(order, z)?;
    if z > MAX_UNSCALED_ARG {
        return Err(Error::InvalidInput(format!(
            "unscaled Bessel argument {z} above {MAX_UNSCALED_ARG}; use bessel_i_scaled"
        )));
    }
    let scaled = bessel_i_scaled(order, z)?;
    let v = scaled * z.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("I_{order}({z}) exceeds f64 range")))
    }
}

/// `I_n(z)·e^{−z}`, finite for every admissible argument.
pub fn bessel_i_scaled(order: u32, z: f64) -> Result<f64> {
    check(order, z)?;
    let mut out = Vec::new();
    bessel_i_scaled_all(order, z, &mut out);
    Ok(out[order as usize])
}

fn check(order: u32, z: f64) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::InvalidInput(format!("Bessel order {order} above {MAX_ORDER}")));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::InvalidInput(format!(
            "Bessel argument must be finite and >= 0, got {z}"
        )));
    }
    Ok(())
}

/// Fills `out[0..=max_order]` with `I_n(z)·e^{−z}`.
///
/// Downward (Miller) recurrence normalized by `I_0 + 2 Σ I_k = e^z`, so one
/// pass gives every order at once. No order or argument limit is enforced.
pub fn bessel_i_scaled_all(max_order: u32, z: f64, out: &mut Vec<f64>) {
    let n = max_order as usize;
    out.clear();
    out.resize(n + 1, 0.0);
    if z == 0.0 {
        out[0] = 1.0;
        return;
    }
    if z < 1e-3 {
        series_scaled(z, out);
        return;
    }
    let start = n + 20 + (80.0 * z).sqrt().ceil() as usize;
    let two_over_z = 2.0 / z;
    let mut next = 0.0; // v_{k+1}
    let mut cur = 1e-280; // v_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = next + (k as f64) * two_over_z * cur; // v_{k-1}
        if k <= n {
            out[k] = cur;
        }
        norm += 2.0 * cur;
        next = cur;
        cur = prev;
        if cur > 1e250 {
            let r = 1e-250;
            cur *= r;
            next *= r;
            norm *= r;
            for v in out.iter_mut() {
                *v *= r;
            }
        }
    }
    out[0] = cur;
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
}

fn series_scaled(z: f64, out: &mut [f64]) {
    let q = 0.25 * z * z;
    let lz = (0.5 * z).ln();
    for (n, slot) in out.iter_mut().enumerate() {
        let lead = n as f64 * lz - libm::lgamma(n as f64 + 1.0) - z;
        if lead < -745.0 {
            *slot = 0.0;
            continue;
        }
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..20 {
            term *= q / (k as f64 * (n + k) as f64);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        *slot = lead.exp() * sum;
    }
}
