//! Gamma and Poisson helpers for integer shape parameters.

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn ln_factorial(n: u32) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Regularized lower incomplete gamma `P(n, x)` for integer `n ≥ 1`.
pub fn gamma_p(n: u32, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if x <= 0.0 {
        return 0.0;
    }
    if x < n as f64 + 1.0 {
        series_p(n, x)
    } else {
        1.0 - erlang_q(n, x)
    }
}

/// Regularized upper incomplete gamma `Q(n, x) = 1 − P(n, x)`.
pub fn gamma_q(n: u32, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if x <= 0.0 {
        return 1.0;
    }
    if x < n as f64 + 1.0 {
        1.0 - series_p(n, x)
    } else {
        erlang_q(n, x)
    }
}

// P(n,x) = e^{-x} x^n / n! · Σ_k x^k / ((n+1)…(n+k))
fn series_p(n: u32, x: f64) -> f64 {
    let a = n as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while k < 1000.0 {
        term *= x / (a + k);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
        k += 1.0;
    }
    (a * x.ln() - x - ln_factorial(n) + sum.ln()).exp()
}

// Q(n,x) = e^{-x} Σ_{k<n} x^k/k!, terms summed in log space.
fn erlang_q(n: u32, x: f64) -> f64 {
    let lx = x.ln();
    let top = (0..n)
        .map(|k| k as f64 * lx - ln_factorial(k))
        .fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = (0..n).map(|k| (k as f64 * lx - ln_factorial(k) - top).exp()).sum();
    (top - x + s.ln()).exp()
}

/// Density of a sum of `n` independent exponentials with the given rate.
pub fn erlang_pdf(n: u32, rate: f64, s: f64) -> f64 {
    if n == 0 || s < 0.0 {
        return 0.0;
    }
    if s == 0.0 {
        return if n == 1 { rate } else { 0.0 };
    }
    let nf = n as f64;
    (nf * rate.ln() + (nf - 1.0) * s.ln() - rate * s - ln_factorial(n - 1)).exp()
}

pub fn poisson_pmf(j: u32, mean: f64) -> f64 {
    if mean <= 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    (-mean + j as f64 * mean.ln() - ln_factorial(j)).exp()
}
