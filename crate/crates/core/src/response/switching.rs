use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A switching function `chi(tau)` that can be evaluated off the real axis.
pub trait Switching<S: Scalar>: Sync {
    /// `chi` at complex time, analytic for `|Im tau| < analytic_strip()`.
    fn eval(&self, tau: Complex<S>) -> Complex<S>;

    /// `d chi / d tau` on the real axis.
    fn derivative(&self, tau: S) -> S;

    fn value(&self, tau: S) -> S {
        self.eval(Complex::from(tau)).re
    }

    fn analytic_strip(&self) -> S;

    /// Half-width outside which `chi` is negligible, if narrower than the
    /// configured Gaussian support.
    fn support(&self) -> Option<S>;

    /// Points where `chi` changes rapidly.
    fn breakpoints(&self) -> Vec<S>;
}

/// `chi(tau) = exp(-tau^2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GaussianSwitching;

impl<S: Scalar> Switching<S> for GaussianSwitching {
    fn eval(&self, tau: Complex<S>) -> Complex<S> {
        (-(tau * tau)).exp()
    }

    fn derivative(&self, tau: S) -> S {
        -S::lit(2.0) * tau * (-tau * tau).exp()
    }

    fn analytic_strip(&self) -> S {
        S::infinity()
    }

    fn support(&self) -> Option<S> {
        None
    }

    fn breakpoints(&self) -> Vec<S> {
        Vec::new()
    }
}

/// Gaussian restricted to `[-a, a]` by smoothed steps:
/// `chi(tau) = [Theta(tau + a) - Theta(tau - a)] exp(-tau^2)`,
/// `Theta(z) = (1 + tanh(z / eps)) / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncatedGaussian<S> {
    pub half_window: S,
    pub eps_uv: S,
}

impl<S: Scalar> TruncatedGaussian<S> {
    pub fn new(half_window: S, eps_uv: S) -> Result<Self> {
        if !(eps_uv > S::zero()) || !eps_uv.is_finite() {
            return Err(Error::InvalidRegulator(eps_uv.as_f64()));
        }
        if !(half_window > S::zero()) || !half_window.is_finite() {
            return Err(Error::InvalidDetector(format!(
                "switching window must be positive, got {half_window}"
            )));
        }
        Ok(Self {
            half_window,
            eps_uv,
        })
    }

    /// The window `[-5/2, 5/2]`.
    pub fn standard(eps_uv: S) -> Result<Self> {
        Self::new(S::lit(2.5), eps_uv)
    }

    /// `Theta(tau + a) - Theta(tau - a)` without cancellation in the tails.
    fn window<T: Logistic<S>>(&self, tau: T) -> T {
        let tau = if tau.re_part() < S::zero() { -tau } else { tau };
        let k = S::lit(2.0) / self.eps_uv;
        let a = self.half_window;
        let outer = (tau + a) * k;
        let inner = (tau - a) * k;
        if tau.re_part() >= a {
            (-inner).logistic() - (-outer).logistic()
        } else {
            outer.logistic() - inner.logistic()
        }
    }

    fn window_derivative(&self, tau: S) -> S {
        let k = S::lit(2.0) / self.eps_uv;
        let a = self.half_window;
        // Theta'(z) = k s(kz) s(-kz)
        let step = |z: S| k * (z * k).logistic() * (-z * k).logistic();
        step(tau + a) - step(tau - a)
    }
}

impl<S: Scalar> Switching<S> for TruncatedGaussian<S> {
    fn eval(&self, tau: Complex<S>) -> Complex<S> {
        self.window(tau) * (-(tau * tau)).exp()
    }

    fn value(&self, tau: S) -> S {
        self.window(tau) * (-tau * tau).exp()
    }

    fn derivative(&self, tau: S) -> S {
        let g = (-tau * tau).exp();
        (self.window_derivative(tau) - S::lit(2.0) * tau * self.window(tau)) * g
    }

    fn analytic_strip(&self) -> S {
        S::FRAC_PI_2() * self.eps_uv
    }

    fn support(&self) -> Option<S> {
        // logistic tails below exp(-60)
        Some(self.half_window + S::lit(30.0) * self.eps_uv)
    }

    fn breakpoints(&self) -> Vec<S> {
        vec![-self.half_window, self.half_window]
    }
}

/// Overflow-free logistic function `1 / (1 + exp(-t))` on reals and complex numbers.
trait Logistic<S: Scalar>:
    Copy
    + std::ops::Neg<Output = Self>
    + std::ops::Add<S, Output = Self>
    + std::ops::Sub<S, Output = Self>
    + std::ops::Mul<S, Output = Self>
    + std::ops::Sub<Output = Self>
{
    fn re_part(self) -> S;
    fn logistic(self) -> Self;
}

impl<S: Scalar> Logistic<S> for S {
    fn re_part(self) -> S {
        self
    }

    fn logistic(self) -> Self {
        if self >= S::zero() {
            (S::one() + (-self).exp()).recip()
        } else {
            let e = self.exp();
            e / (S::one() + e)
        }
    }
}

impl<S: Scalar> Logistic<S> for Complex<S> {
    fn re_part(self) -> S {
        self.re
    }

    fn logistic(self) -> Self {
        let one = Complex::new(S::one(), S::zero());
        if self.re >= S::zero() {
            (one + (-self).exp()).inv()
        } else {
            let e = self.exp();
            e / (one + e)
        }
    }
}
