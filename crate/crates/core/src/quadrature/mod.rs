//! Adaptive quadrature: real intervals, detoured contours, rectangles, and
//! extrapolation of finite-regulator sequences.

mod contour;
mod extrapolate;
mod gauss_kronrod;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use contour::{
    integrate_detoured, integrate_with_pole_detour, plan_detours, Detour, DetourPlan, DetourSide,
};
pub use extrapolate::{extrapolate_epsilon, ExtrapolationReport};

pub(crate) use contour::integrate_path;
pub(crate) use gauss_kronrod::integrate_pieces;

/// An integral estimate with its error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<S> {
    pub value: Complex<S>,
    pub error: S,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig<S> {
    pub abs_tol: S,
    pub rel_tol: S,
    pub max_subdivisions: usize,
    /// Half-width of the integration window for Gaussian switching, in units of T.
    pub support_halfwidth: S,
    /// Radius of the semicircular detours around real poles.
    pub detour_radius: S,
    /// Decreasing regulator values at which non-stationary kernels are sampled.
    pub eps_ladder: Vec<S>,
}

impl<S: Scalar> Default for QuadratureConfig<S> {
    fn default() -> Self {
        Self {
            abs_tol: S::lit(1e-12),
            rel_tol: S::lit(1e-10),
            max_subdivisions: 2000,
            support_halfwidth: S::lit(13.0),
            detour_radius: S::lit(0.2),
            eps_ladder: geometric_ladder(S::lit(1e-2), 6),
        }
    }
}

/// `eps0, eps0/2, eps0/4, ...` with `rungs` entries.
pub fn geometric_ladder<S: Scalar>(eps0: S, rungs: usize) -> Vec<S> {
    (0..rungs)
        .map(|k| eps0 * S::lit(0.5).powi(k as i32))
        .collect()
}

impl<S: Scalar> QuadratureConfig<S> {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > S::zero()) || !(self.rel_tol > S::zero()) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Config("max_subdivisions must be at least 1".into()));
        }
        if !(self.support_halfwidth >= S::lit(8.0)) {
            return Err(Error::Config(format!(
                "support half-width must be at least 8, got {}",
                self.support_halfwidth
            )));
        }
        if !(self.detour_radius > S::zero()) {
            return Err(Error::Config("detour radius must be positive".into()));
        }
        if !self.eps_ladder.is_empty() {
            check_ladder(&self.eps_ladder)?;
        }
        Ok(())
    }

    /// Same configuration with tolerances scaled by `factor`.
    pub fn tightened(&self, factor: S) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..self.clone()
        }
    }
}

pub(crate) fn check_ladder<S: Scalar>(ladder: &[S]) -> Result<()> {
    if ladder.len() < 3 {
        return Err(Error::Input(format!(
            "epsilon ladder needs at least 3 rungs, got {}",
            ladder.len()
        )));
    }
    if !(ladder[ladder.len() - 1] > S::zero()) {
        return Err(Error::Input("epsilon ladder must be positive".into()));
    }
    if ladder.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Input(
            "epsilon ladder must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

fn check_interval<S: Scalar>(a: S, b: S) -> Result<()> {
    if a < b && a.is_finite() && b.is_finite() {
        Ok(())
    } else {
        Err(Error::Input(format!(
            "integration interval [{a}, {b}] is empty or infinite"
        )))
    }
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate_1d<S, F>(f: F, a: S, b: S, cfg: &QuadratureConfig<S>) -> Result<Estimate<S>>
where
    S: Scalar,
    F: Fn(S) -> Complex<S>,
{
    try_integrate_1d(|x| Ok(f(x)), &[a, b], cfg)
}

/// Adaptive integral of a fallible integrand over `[points[0], points[last]]`,
/// starting from the panels delimited by `points`.
pub fn try_integrate_1d<S, F>(f: F, points: &[S], cfg: &QuadratureConfig<S>) -> Result<Estimate<S>>
where
    S: Scalar,
    F: Fn(S) -> Result<Complex<S>>,
{
    if points.len() < 2 {
        return Err(Error::Input("need at least two integration points".into()));
    }
    let pieces: Vec<(S, S)> = points.windows(2).map(|w| (w[0], w[1])).collect();
    for &(a, b) in &pieces {
        check_interval(a, b)?;
    }
    integrate_pieces(
        |_, x| f(x),
        &pieces,
        cfg.abs_tol,
        cfg.rel_tol,
        cfg.max_subdivisions,
    )
}

/// Axis-aligned integration rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rectangle<S> {
    pub x: (S, S),
    pub y: (S, S),
}

impl<S: Scalar> Rectangle<S> {
    pub fn square(half_width: S) -> Self {
        Self {
            x: (-half_width, half_width),
            y: (-half_width, half_width),
        }
    }
}

/// Iterated adaptive integral over a rectangle: an outer adaptive rule in
/// `x` whose integrand is an inner adaptive integral in `y`.
pub fn integrate_2d<S, F>(
    f: F,
    domain: Rectangle<S>,
    cfg: &QuadratureConfig<S>,
) -> Result<Estimate<S>>
where
    S: Scalar,
    F: Fn(S, S) -> Complex<S>,
{
    let (x0, x1) = domain.x;
    let (y0, y1) = domain.y;
    check_interval(x0, x1)?;
    check_interval(y0, y1)?;
    let inner_cfg = inner_config(cfg, x1 - x0);
    try_integrate_1d(
        |x| {
            let inner = integrate_pieces(
                |_, y| Ok(f(x, y)),
                &[(y0, y1)],
                inner_cfg.abs_tol,
                inner_cfg.rel_tol,
                inner_cfg.max_subdivisions,
            )?;
            Ok(inner.value)
        },
        &[x0, x1],
        cfg,
    )
}

/// Tolerances for an inner integral whose values are integrated over an
/// outer interval of length `outer_length`.
pub(crate) fn inner_config<S: Scalar>(
    cfg: &QuadratureConfig<S>,
    outer_length: S,
) -> QuadratureConfig<S> {
    QuadratureConfig {
        abs_tol: cfg.abs_tol * S::lit(0.1) / outer_length.max(S::one()),
        rel_tol: cfg.rel_tol * S::lit(0.1),
        ..cfg.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig<f64> {
        QuadratureConfig {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            ..Default::default()
        }
    }

    fn re(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn sine_over_half_period() {
        let est = integrate_1d(|u: f64| re(u.sin()), 0.0, PI, &cfg()).unwrap();
        assert!((est.value.re - 2.0).abs() < 1e-10);
        assert!(est.value.im.abs() < 1e-15);
    }

    #[test]
    fn gaussian_normalisation() {
        let est = integrate_1d(|u: f64| re((-u * u / 2.0).exp()), -13.0, 13.0, &cfg()).unwrap();
        assert!((est.value.re - (2.0 * PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let c = QuadratureConfig {
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            ..Default::default()
        };
        let est = integrate_1d(|u: f64| re(1.0 / u.sqrt()), 0.0, 1.0, &c).unwrap();
        assert!((est.value.re - 2.0).abs() < 1e-6, "{}", est.value.re);
    }

    #[test]
    fn convergence_failure_carries_best_estimate() {
        let c = QuadratureConfig {
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            max_subdivisions: 3,
            ..Default::default()
        };
        let err = integrate_1d(|u: f64| re(1.0 / u.sqrt()), 0.0, 1.0, &c).unwrap_err();
        match err {
            Error::Convergence {
                re,
                error,
                subdivisions,
                ..
            } => {
                assert!(re > 1.0 && re < 2.0);
                assert!(error > 0.0);
                assert_eq!(subdivisions, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(integrate_1d(|u: f64| re(u), 1.0, 0.0, &cfg()).is_err());
    }

    #[test]
    fn complex_oscillatory_gaussian() {
        // int exp(-u^2/2 - i w u) = sqrt(2 pi) exp(-w^2/2)
        let w = 1.3;
        let est = integrate_1d(
            |u: f64| Complex::new(0.0, -w * u).exp() * (-u * u / 2.0).exp(),
            -13.0,
            13.0,
            &cfg(),
        )
        .unwrap();
        let want = (2.0 * PI).sqrt() * (-w * w / 2.0).exp();
        assert!((est.value.re - want).abs() < 1e-12);
        assert!(est.value.im.abs() < 1e-12);
    }

    #[test]
    fn double_gaussian() {
        let est = integrate_2d(
            |u: f64, v: f64| re((-u * u - v * v).exp()),
            Rectangle::square(6.0),
            &cfg(),
        )
        .unwrap();
        assert!((est.value.re - PI).abs() < 1e-8);
    }

    #[test]
    fn bilinear_on_unit_square() {
        let est = integrate_2d(
            |u: f64, v: f64| re(u * v),
            Rectangle {
                x: (0.0, 1.0),
                y: (0.0, 1.0),
            },
            &cfg(),
        )
        .unwrap();
        assert!((est.value.re - 0.25).abs() < 1e-14);
    }

    #[test]
    fn separable_integrand_factorises() {
        let g = |u: f64| Complex::new(0.0, -u).exp() * (-u * u / 2.0).exp();
        let one = integrate_1d(g, -8.0, 8.0, &cfg()).unwrap();
        let two = integrate_2d(|u, v| g(u) * g(v), Rectangle::square(8.0), &cfg()).unwrap();
        let want = one.value * one.value;
        assert!((two.value - want).norm() < 1e-10);
    }

    #[test]
    fn deterministic_under_parallel_invocation() {
        use rayon::prelude::*;
        let f = |u: f64| Complex::new(u.cos(), (3.0 * u).sin()) / (1.0 + u * u);
        let serial = integrate_1d(f, -5.0, 5.0, &cfg()).unwrap();
        let parallel: Vec<_> = (0..16)
            .into_par_iter()
            .map(|_| integrate_1d(f, -5.0, 5.0, &cfg()).unwrap())
            .collect();
        for p in parallel {
            assert_eq!(p.value, serial.value);
            assert_eq!(p.error, serial.error);
        }
    }

    #[test]
    fn ladder_validation() {
        assert!(check_ladder(&[0.1, 0.05, 0.025]).is_ok());
        assert!(check_ladder(&[0.1, 0.05]).is_err());
        assert!(check_ladder(&[0.1, 0.2, 0.05]).is_err());
        assert!(check_ladder(&[0.1, 0.05, 0.0]).is_err());
        let ladder = geometric_ladder(1e-2, 6);
        assert_eq!(ladder.len(), 6);
        assert_eq!(ladder[5], 1e-2 / 32.0);
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::<f64>::default().validate().is_ok());
        let narrow = QuadratureConfig {
            support_halfwidth: 5.0,
            ..QuadratureConfig::<f64>::default()
        };
        assert!(narrow.validate().is_err());
        let zero_tol = QuadratureConfig {
            abs_tol: 0.0,
            ..QuadratureConfig::<f64>::default()
        };
        assert!(zero_tol.validate().is_err());
    }

    #[test]
    fn single_precision_integration() {
        let c = QuadratureConfig::<f32> {
            abs_tol: 1e-5,
            rel_tol: 1e-5,
            ..Default::default()
        };
        let est = integrate_1d(
            |u: f32| Complex::new(u.sin(), 0.0),
            0.0,
            std::f32::consts::PI,
            &c,
        )
        .unwrap();
        assert!((est.value.re - 2.0).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn linearity(alpha in -3.0..3.0f64, beta in -3.0..3.0f64, k in 0.1..4.0f64, s in 0.2..3.0f64) {
            let f = |u: f64| Complex::new((k * u).cos(), u.sin() * k) * (-u * u / s).exp();
            let g = |u: f64| Complex::new(1.0 / (1.0 + u * u), u / (2.0 + u * u));
            let c = cfg();
            let fi = integrate_1d(f, -6.0, 6.0, &c).unwrap().value;
            let gi = integrate_1d(g, -6.0, 6.0, &c).unwrap().value;
            let combo = integrate_1d(|u| f(u) * alpha + g(u) * beta, -6.0, 6.0, &c).unwrap().value;
            prop_assert!((combo - (fi * alpha + gi * beta)).norm() < 1e-10);
        }
    }
}
