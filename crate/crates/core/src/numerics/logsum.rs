/// Signed sum of terms `coef · exp(ln_mag)` kept in log space.
///
/// Cost and derivative formulas are sums of `φ(·)·R(·)` products whose
/// individual factors under- or overflow long before the sum does. Terms are
/// accumulated as (coefficient, log-magnitude) pairs and rescaled by the
/// largest magnitude only when a value is requested.
#[derive(Debug, Clone, Default)]
pub struct LogTerms {
    terms: Vec<(f64, f64)>,
}

impl LogTerms {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, coef: f64, ln_mag: f64) {
        if coef != 0.0 && ln_mag > f64::NEG_INFINITY {
            self.terms.push((coef, ln_mag));
        }
    }

    /// Largest `ln|coef| + ln_mag`, or `-inf` for an empty sum.
    pub fn scale(&self) -> f64 {
        self.terms
            .iter()
            .map(|&(c, l)| c.abs().ln() + l)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The sum divided by `exp(scale())`. Same sign as the sum, of order one.
    pub fn normalized(&self) -> f64 {
        let s = self.scale();
        if s == f64::NEG_INFINITY {
            return 0.0;
        }
        self.terms.iter().map(|&(c, l)| c * (l - s).exp()).sum()
    }

    pub fn value(&self) -> f64 {
        let s = self.scale();
        if s == f64::NEG_INFINITY {
            return 0.0;
        }
        self.normalized() * s.exp()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_survives_underflow() {
        let mut t = LogTerms::new();
        t.push(1.0, -2000.0);
        t.push(-2.0, -2000.5);
        assert_eq!(t.value(), 0.0);
        let big = 2.0 * (-0.5f64).exp();
        let expect = (1.0 - big) / big;
        assert!((t.normalized() - expect).abs() < 1e-13);
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(LogTerms::new().value(), 0.0);
    }
}
