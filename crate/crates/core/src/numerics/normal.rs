//! Standard normal density, distribution and Mills ratio, accurate in the tails.

use crate::error::{Error, Result};

pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

const TAIL_SWITCH: f64 = 8.0;
const MILLS_CF_SWITCH: f64 = 3.0;

/// Standard normal density.
///
/// The square is split into a 16-bit-rounded head and a tail so that the
/// exponent is formed without the rounding error of `z * z` for large `|z|`.
pub fn normal_pdf(z: f64) -> f64 {
    if z.abs() > 39.0 {
        return 0.0;
    }
    let head = (z * 65536.0).round() / 65536.0;
    let tail = z - head;
    FRAC_1_SQRT_2PI * (-0.5 * head * head).exp() * (-0.5 * (2.0 * head + tail) * tail).exp()
}

pub fn ln_normal_pdf(z: f64) -> f64 {
    -0.5 * z * z - LN_SQRT_2PI
}

/// Upper tail `P(Z > z)`.
pub fn normal_sf(z: f64) -> f64 {
    if z > TAIL_SWITCH {
        normal_pdf(z) * mills_cf(z)
    } else if z < -TAIL_SWITCH {
        1.0 - normal_pdf(z) * mills_cf(-z)
    } else {
        0.5 * libm::erfc(z * std::f64::consts::FRAC_1_SQRT_2)
    }
}

pub fn normal_cdf(z: f64) -> f64 {
    normal_sf(-z)
}

/// `ln P(Z > z)`, finite for every finite `z`.
pub fn ln_normal_sf(z: f64) -> f64 {
    if z > TAIL_SWITCH {
        ln_normal_pdf(z) + mills_cf(z).ln()
    } else if z < -TAIL_SWITCH {
        (-normal_sf(-z)).ln_1p()
    } else {
        normal_sf(z).ln()
    }
}

pub fn ln_normal_cdf(z: f64) -> f64 {
    ln_normal_sf(-z)
}

/// Mills ratio `R(z) = P(Z > z) / φ(z)`.
pub fn mills_ratio(z: f64) -> f64 {
    if z >= MILLS_CF_SWITCH {
        mills_cf(z)
    } else {
        ln_mills_ratio(z).exp()
    }
}

/// `ln R(z)`; stays finite where `R` itself would overflow (very negative `z`).
pub fn ln_mills_ratio(z: f64) -> f64 {
    if z >= MILLS_CF_SWITCH {
        mills_cf(z).ln()
    } else {
        ln_normal_sf(z) - ln_normal_pdf(z)
    }
}

// R(z) = 1/(z + K(z, 1)).
fn mills_cf(z: f64) -> f64 {
    1.0 / (z + cf_tail(z, 1))
}

// K(z, m) = m/(z + (m+1)/(z + (m+2)/(z + ...))), modified Lentz; needs z ≳ 3.
fn cf_tail(z: f64, m: u32) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = TINY;
    let mut c = f;
    let mut d = 0.0;
    for k in 0..500u32 {
        let a = (m + k) as f64;
        d = z + a * d;
        if d == 0.0 {
            d = TINY;
        }
        c = z + a / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f
}

/// `E[(Z + a)⁺] = φ(a) + a·N(a)`, without cancellation for very negative `a`.
pub fn normal_partial_expectation(a: f64) -> f64 {
    if a >= -MILLS_CF_SWITCH {
        normal_pdf(a) + a * normal_cdf(a)
    } else {
        let z = -a;
        let k = cf_tail(z, 1);
        normal_pdf(z) * k / (z + k)
    }
}

/// The sandwich `φ(z)(1/z − 1/z³) ≤ φ(z)z/(z²+1) ≤ N(−z) ≤ φ(z)/z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MillsBounds {
    pub lower: f64,
    pub middle: f64,
    pub value: f64,
    pub upper: f64,
    pub holds: bool,
}

pub fn mills_bounds_check(z: f64) -> Result<MillsBounds> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::InvalidInput(format!("Mills bounds need finite z >= 0, got {z}")));
    }
    let value = normal_sf(z);
    if z == 0.0 {
        return Ok(MillsBounds {
            lower: f64::NEG_INFINITY,
            middle: 0.0,
            value,
            upper: f64::INFINITY,
            holds: true,
        });
    }
    let pdf = normal_pdf(z);
    let lower = pdf * (1.0 / z - 1.0 / (z * z * z));
    let middle = pdf * z / (z * z + 1.0);
    let upper = pdf / z;
    let holds = lower <= middle && middle <= value && value <= upper;
    Ok(MillsBounds {
        lower,
        middle,
        value,
        upper,
        holds,
    })
}
