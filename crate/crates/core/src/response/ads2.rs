use super::minkowski::minkowski_closed;
use super::{stationary_regular, DetectorConfig, Method, ResponseResult};
use crate::error::Result;
use crate::kernels::{analytic, PoincareAdS2};
use crate::quadrature::QuadratureConfig;
use crate::scalar::Scalar;

/// `P_AdS2 = P_M + sqrt(pi/2) int_C du exp(-u^2/2 - i omega u) A_AdS2^reg(u)`,
/// with `C` passing below the poles at `u = +-2/W`.
pub fn response_ads2<S: Scalar>(
    det: &DetectorConfig<S>,
    geom: &PoincareAdS2<S>,
    cfg: &QuadratureConfig<S>,
) -> Result<ResponseResult<S>> {
    det.validate()?;
    geom.validate()?;
    cfg.validate()?;
    let w = geom.inverse_radius;
    let (reg, error) = stationary_regular(
        det.omega,
        |z| analytic::ads2_regular(z, w),
        &geom.poles(),
        cfg,
    )?;
    let total = reg + minkowski_closed(det.omega);
    Ok(ResponseResult::from_value(
        total,
        Method::RegularSplit,
        error,
    ))
}
