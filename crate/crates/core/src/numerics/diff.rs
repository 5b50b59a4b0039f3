/// Which derivative a finite-difference stencil approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

/// Central-difference estimate of `f'(x)` or `f''(x)` with step `h`.
pub fn finite_diff<F: FnMut(f64) -> f64>(mut f: F, x: f64, order: DerivativeOrder, h: f64) -> f64 {
    match order {
        DerivativeOrder::First => (f(x + h) - f(x - h)) / (2.0 * h),
        DerivativeOrder::Second => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
    }
}

/// Forward second-order-accurate first derivative, for use at a boundary.
pub fn forward_first<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)
}

/// Forward second-order-accurate second derivative.
pub fn forward_second<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (2.0 * f(x) - 5.0 * f(x + h) + 4.0 * f(x + 2.0 * h) - f(x + 3.0 * h)) / (h * h)
}
