//! Special functions, quadrature, root finding and finite differences.

pub mod bessel;
pub mod diff;
pub mod gamma;
pub mod logsum;
pub mod normal;
pub mod quad;
pub mod root;

pub use bessel::{bessel_i, bessel_i_scaled, bessel_i_scaled_all};
pub use diff::{finite_diff, forward_first, forward_second, DerivativeOrder};
pub use gamma::{erlang_pdf, gamma_p, gamma_q, poisson_pmf};
pub use logsum::LogTerms;
pub use normal::{
    ln_mills_ratio, ln_normal_cdf, ln_normal_pdf, ln_normal_sf, mills_bounds_check, mills_ratio, normal_cdf,
    normal_partial_expectation, normal_pdf, normal_sf, MillsBounds,
};
pub use quad::{integrate, integrate_detailed, integrate_to_infinity, QuadResult, QuadratureSpec};
pub use root::{find_root, find_root_detailed, RootBracket, RootResult};

/// Default tolerances used by the solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
    pub root: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-8,
            root: 1e-10,
        }
    }
}
