use num_complex::Complex;

use super::minkowski::minkowski_closed;
use super::{stationary_regular, DetectorConfig, Method, ResponseResult};
use crate::error::{Error, Result};
use crate::kernels::{analytic, EinsteinCylinder};
use crate::quadrature::QuadratureConfig;
use crate::scalar::Scalar;

/// `P_EC = P_M + sqrt(pi/2) int du exp(-u^2/2 - i omega u) A_EC^reg(u)`.
///
/// The regular part still has double poles at `u = n L, n != 0`; the
/// contour passes below those that fall inside the support.
pub fn response_einstein_cylinder<S: Scalar>(
    det: &DetectorConfig<S>,
    geom: &EinsteinCylinder<S>,
    cfg: &QuadratureConfig<S>,
) -> Result<ResponseResult<S>> {
    det.validate()?;
    geom.validate()?;
    cfg.validate()?;
    let l = geom.circumference;
    let h = cfg.support_halfwidth + cfg.detour_radius;
    let mut poles = Vec::new();
    let mut n = 1;
    while S::from_i32(n).unwrap() * l <= h {
        let p = S::from_i32(n).unwrap() * l;
        poles.push(-p);
        poles.push(p);
        n += 1;
    }
    let (reg, error) = stationary_regular(
        det.omega,
        |z| analytic::cylinder_regular(z, geom),
        &poles,
        cfg,
    )?;
    let total = reg + minkowski_closed(det.omega);
    Ok(ResponseResult::from_value(
        total,
        Method::RegularSplit,
        error,
    ))
}

/// Zero-mode share of the cylinder response, `(gamma pi / 2 l^2) exp(-omega^2/2)`.
pub fn ec_zero_mode_response<S: Scalar>(det: &DetectorConfig<S>, geom: &EinsteinCylinder<S>) -> S {
    geom.zero_mode() * S::PI() * (-det.omega * det.omega * S::lit(0.5)).exp()
}

/// Mode-sum form of the cylinder response with no quadrature:
///
/// `P = sum_{n >= 1} (2 pi^2 n / l^2) exp(-(omega + 2 pi n / l)^2 / 2) + zero mode`.
///
/// Fails if the Gaussian factor at `n_max` exceeds `1e-30`.
pub fn response_ec_modesum_oracle<S: Scalar>(
    det: &DetectorConfig<S>,
    geom: &EinsteinCylinder<S>,
    n_max: usize,
) -> Result<ResponseResult<S>> {
    det.validate()?;
    geom.validate()?;
    let l = geom.circumference;
    let k1 = S::lit(2.0) * S::PI() / l;
    let half = S::lit(0.5);
    let gauss = |n: usize| {
        let q = det.omega + k1 * S::from_usize(n).unwrap();
        (-q * q * half).exp()
    };
    let last = gauss(n_max);
    let peak_passed = det.omega + k1 * S::from_usize(n_max).unwrap() > S::zero();
    if !(peak_passed && last < S::lit(1e-30)) {
        return Err(Error::TailBound(format!(
            "mode {n_max} still carries Gaussian weight {last:e}; need n_max >= {}",
            modesum_cutoff(det.omega, l)
        )));
    }
    let weight = S::lit(2.0) * S::PI() * S::PI() / (l * l);
    // smallest terms first
    let mut sum = S::zero();
    for n in (1..=n_max).rev() {
        sum = sum + weight * S::from_usize(n).unwrap() * gauss(n);
    }
    let total = sum + ec_zero_mode_response(det, geom);
    Ok(ResponseResult::from_value(
        Complex::new(total, S::zero()),
        Method::ModeSumOracle,
        S::zero(),
    ))
}

/// Smallest `n_max` accepted by [`response_ec_modesum_oracle`].
pub(crate) fn modesum_cutoff<S: Scalar>(omega: S, circumference: S) -> usize {
    // exp(-q^2/2) < 1e-30 for q > 11.75
    let q = S::lit(11.76);
    let n = ((q - omega) * circumference / (S::lit(2.0) * S::PI())).ceil();
    n.to_usize().unwrap_or(1).max(1)
}
