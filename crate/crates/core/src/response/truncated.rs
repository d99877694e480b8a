//! Responses for switching functions other than the plain Gaussian.
//!
//! Stationary geometries reduce to one integral over the separation `s`
//! weighted by the switching autocorrelation
//! `C(s) = int chi(tau) chi(tau - s) dtau`. The flat part uses
//!
//! `int C(s) e^{-i omega s} / (s - i0)^2 ds
//!    = int_0^inf [2 C'(s) cos(omega s) - 2 omega C(s) sin(omega s)] / s ds + pi omega C(0)`,
//!
//! which follows from one integration by parts and `C` being even.

use num_complex::Complex;

use super::switching::{Switching, TruncatedGaussian};
use super::time_machine::{image_sum, TimeMachineOptions};
use super::{DetectorConfig, Method, ResponseResult};
use crate::error::{Error, Result};
use crate::kernels::{analytic, Geometry};
use crate::quadrature::{inner_config, try_integrate_1d, QuadratureConfig};
use crate::scalar::Scalar;

/// Response with the Gaussian cut to `[-5/2, 5/2]` by `tanh` steps of width `eps_uv`.
pub fn response_truncated_switching<S: Scalar>(
    det: &DetectorConfig<S>,
    geometry: &Geometry<S>,
    eps_uv: S,
    cfg: &QuadratureConfig<S>,
    opts: &TimeMachineOptions<S>,
) -> Result<ResponseResult<S>> {
    det.validate()?;
    geometry.validate()?;
    cfg.validate()?;
    let switching = TruncatedGaussian::standard(eps_uv)?;
    match geometry {
        Geometry::TimeMachine(g) => {
            image_sum(det, g, cfg, opts, &switching, Method::TruncatedWindow)
        }
        _ => {
            let reach = switching.support().expect("compact window");
            stationary_switched(det, geometry, &switching, reach, cfg)
        }
    }
}

/// Stationary response for an arbitrary switching supported in `[-reach, reach]`.
pub(crate) fn stationary_switched<S: Scalar, W: Switching<S>>(
    det: &DetectorConfig<S>,
    geometry: &Geometry<S>,
    switching: &W,
    reach: S,
    cfg: &QuadratureConfig<S>,
) -> Result<ResponseResult<S>> {
    let span = S::lit(2.0) * reach;
    let regular: Option<Box<dyn Fn(S) -> S + Sync + '_>> = match geometry {
        Geometry::Minkowski => None,
        Geometry::EinsteinCylinder(g) => {
            if g.circumference <= span {
                return Err(Error::Config(format!(
                    "cylinder circumference {} must exceed the switching span {span}",
                    g.circumference
                )));
            }
            Some(Box::new(move |s: S| {
                analytic::cylinder_regular(Complex::from(s), g).re
            }))
        }
        Geometry::PoincareAdS2(g) => {
            let pole = g.poles()[1];
            if pole <= span {
                return Err(Error::Config(format!(
                    "AdS2 singularity at {pole} lies inside the switching span {span}"
                )));
            }
            let w = g.inverse_radius;
            Some(Box::new(move |s: S| {
                analytic::ads2_regular(Complex::from(s), w).re
            }))
        }
        Geometry::TimeMachine(_) => return Err(Error::UndefinedSplit("time_machine")),
    };

    let inner_cfg = inner_config(cfg, span);
    let mut edges = switching.breakpoints();
    edges.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoint"));
    // re: C(s), im: C'(s)
    let correlation = |s: S| -> Result<Complex<S>> {
        let lo = s - reach;
        let hi = reach;
        if !(lo < hi) {
            return Ok(Complex::new(S::zero(), S::zero()));
        }
        let mut points = vec![lo];
        let mut cuts: Vec<S> = edges.iter().flat_map(|&e| [e, e + s]).collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoint"));
        for c in cuts {
            if c > *points.last().unwrap() && c < hi {
                points.push(c);
            }
        }
        points.push(hi);
        let est = try_integrate_1d(
            |t| {
                let a = switching.value(t);
                Ok(Complex::new(
                    a * switching.value(t - s),
                    -a * switching.derivative(t - s),
                ))
            },
            &points,
            &inner_cfg,
        )?;
        Ok(est.value)
    };

    let omega = det.omega;
    let two = S::lit(2.0);
    let mut points = vec![S::zero()];
    for e in &edges {
        let gap = *e - edges[0];
        if gap > S::zero() && gap < span {
            points.push(gap);
        }
    }
    points.push(span);
    points.dedup();
    let est = try_integrate_1d(
        |s| {
            let c = correlation(s)?;
            let (sin, cos) = (omega * s).sin_cos();
            let flat = (two * c.im * cos - two * omega * c.re * sin) / s;
            let reg = regular
                .as_ref()
                .map_or(S::zero(), |f| two * c.re * cos * f(s));
            Ok(Complex::new(flat, reg))
        },
        &points,
        cfg,
    )?;
    let c0 = correlation(S::zero())?.re;
    let flat = -(est.value.re + S::PI() * omega * c0) / (two * S::PI());
    let total = flat + est.value.im;
    Ok(ResponseResult::from_value(
        Complex::new(total, S::zero()),
        Method::TruncatedWindow,
        est.error,
    ))
}
