use std::sync::OnceLock;

use super::MollifierError;

/// `∫_{−1}^{1} exp(−1/(1−t²)) dt`, computed once by the trapezoid rule. The
/// integrand is flat to all orders at `±1`, so the rule converges faster than
/// any power of the step.
fn bump_integral() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| {
        let n = 1 << 14;
        let h = 2.0 / n as f64;
        (1..n).map(|i| bump(-1.0 + i as f64 * h)).sum::<f64>() * h
    })
}

fn bump(t: f64) -> f64 {
    let s = 1.0 - t * t;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// Unit-mass even bump `k(t) = C exp(−1/(1−t²))` on `(−1, 1)`.
pub fn profile(t: f64) -> f64 {
    bump(t) / bump_integral()
}

/// `k'(t)`; odd, and exactly antisymmetric in floating point.
pub fn profile_derivative(t: f64) -> f64 {
    let s = 1.0 - t * t;
    if s <= 0.0 {
        0.0
    } else {
        profile(t) * (-2.0 * t / (s * s))
    }
}

/// Normalization constant `C`.
pub fn normalization() -> f64 {
    1.0 / bump_integral()
}

/// `k_ε(t) = k(t/ε)/ε`, supported in `[−ε, ε]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MollifierKernel {
    eps: f64,
}

impl MollifierKernel {
    pub fn new(eps: f64) -> Result<Self, MollifierError> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(MollifierError::InvalidEpsilon(eps));
        }
        Ok(MollifierKernel { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn eval(&self, t: f64) -> f64 {
        profile(t / self.eps) / self.eps
    }

    pub fn derivative(&self, t: f64) -> f64 {
        profile_derivative(t / self.eps) / (self.eps * self.eps)
    }

    /// Samples `k_ε(m Δt)` and `k_ε'(m Δt)` for `|m| ≤ M`, index `m + M`.
    pub(crate) fn stencil(&self, dt: f64) -> (Vec<f64>, Vec<f64>) {
        let m = (self.eps / dt).ceil() as i64;
        let values = (-m..=m).map(|i| self.eval(i as f64 * dt)).collect();
        let slopes = (-m..=m).map(|i| self.derivative(i as f64 * dt)).collect();
        (values, slopes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_integral_matches_reference() {
        // high-precision reference value
        assert!((bump_integral() - 0.443_993_816_168_079_4).abs() < 1e-15);
    }

    #[test]
    fn unit_mass_and_even() {
        let k = MollifierKernel::new(0.3).unwrap();
        let n = 20_000;
        let h = 0.6 / n as f64;
        let mass: f64 = (1..n).map(|i| k.eval(-0.3 + i as f64 * h)).sum::<f64>() * h;
        assert!((mass - 1.0).abs() < 1e-12);
        for t in [0.01, 0.1, 0.2999, 0.5] {
            assert_eq!(k.eval(t), k.eval(-t));
            assert_eq!(k.derivative(t), -k.derivative(-t));
        }
        assert_eq!(k.eval(0.3), 0.0);
        assert_eq!(k.eval(-0.31), 0.0);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let k = MollifierKernel::new(1.0).unwrap();
        for t in [-0.7, -0.2, 0.4, 0.8] {
            let h = 1e-6;
            let fd = (k.eval(t + h) - k.eval(t - h)) / (2.0 * h);
            assert!((fd - k.derivative(t)).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_bad_width() {
        assert!(MollifierKernel::new(0.0).is_err());
        assert!(MollifierKernel::new(f64::NAN).is_err());
    }
}
