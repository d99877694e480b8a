use num_complex::Complex;

use super::{DetectorConfig, Method, ResponseResult};
use crate::error::Result;
use crate::quadrature::{try_integrate_1d, QuadratureConfig};
use crate::scalar::Scalar;
use crate::special::erfc;

/// `P_M = (exp(-omega^2/2) - sqrt(pi/2) omega erfc(omega/sqrt 2)) / 2`
pub fn response_minkowski_closed<S: Scalar>(det: &DetectorConfig<S>) -> Result<ResponseResult<S>> {
    det.validate()?;
    Ok(ResponseResult::from_value(
        Complex::new(minkowski_closed(det.omega), S::zero()),
        Method::ClosedForm,
        S::zero(),
    ))
}

pub(crate) fn minkowski_closed<S: Scalar>(omega: S) -> S {
    let half = S::lit(0.5);
    let gauss = (-omega * omega * half).exp();
    let x = omega * S::FRAC_1_SQRT_2();
    if x < S::lit(2.0) {
        let tail = S::FRAC_PI_2().sqrt() * omega * erfc(x);
        return half * (gauss - tail);
    }
    // sqrt(pi) erfcx(x) = 1 / (x + k) with k = (1/2) / (x + 1 / (x + (3/2) / (x + ...)))
    let mut k = S::zero();
    for j in (1..=60).rev() {
        k = S::lit(j as f64 * 0.5) / (x + k);
    }
    half * gauss * k / (x + k)
}

/// `P_M = int_0^inf (k / 2pi) |chi~(omega + k)|^2 dk` with
/// `chi~(q) = sqrt(pi) exp(-q^2/4)`.
///
/// The absolute tolerance is dropped so the relative accuracy holds for
/// exponentially small responses at large gaps.
pub fn response_minkowski_integral<S: Scalar>(
    det: &DetectorConfig<S>,
    cfg: &QuadratureConfig<S>,
) -> Result<ResponseResult<S>> {
    det.validate()?;
    cfg.validate()?;
    let omega = det.omega;
    let local = QuadratureConfig {
        abs_tol: S::min_positive_value(),
        ..cfg.clone()
    };
    // (k / 2pi) pi exp(-(omega + k)^2 / 2)
    let integrand = |k: S| {
        let q = omega + k;
        Complex::new(k * S::lit(0.5) * (-q * q * S::lit(0.5)).exp(), S::zero())
    };
    // the Gaussian in omega + k is below exp(-h^2/2) past k = h - omega
    let upper = (cfg.support_halfwidth - omega).max(cfg.support_halfwidth);
    let mut points = vec![S::zero()];
    let peak = -omega;
    if peak > S::zero() && peak < upper {
        points.push(peak);
    }
    points.push(upper);
    let est = try_integrate_1d(|k| Ok(integrand(k)), &points, &local)?;
    Ok(ResponseResult::from_value(
        est.value,
        Method::MomentumIntegral,
        est.error,
    ))
}
