use std::f64::consts::PI;

use ctc_probe::quadrature::{
    extrapolate_epsilon, integrate_1d, integrate_2d, integrate_with_pole_detour, DetourSide,
    QuadratureConfig, Rectangle,
};
use ctc_probe::Error;
use num_complex::Complex;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

#[test]
fn gaussian_fourier_transform() {
    // int exp(-x^2/2 - i k x) dx = sqrt(2 pi) exp(-k^2/2)
    let cfg = QuadratureConfig::default();
    for k in [0.0, 0.5, 2.0, 4.0] {
        let est =
            integrate_1d(|x: f64| (c(-x * x / 2.0, -k * x)).exp(), -13.0, 13.0, &cfg).unwrap();
        let want = (2.0 * PI).sqrt() * (-k * k / 2.0).exp();
        assert!((est.value - want).norm() < 1e-11, "{k}: {:?}", est.value);
    }
}

#[test]
fn detour_below_double_pole_picks_up_the_residue_derivative() {
    let cfg = QuadratureConfig::default();
    let f = |z: Complex<f64>| (-(z * z)).exp() / ((z - 1.0) * (z - 1.0));
    let below = integrate_with_pole_detour(f, -8.0, 8.0, &[1.0], DetourSide::Lower, &cfg).unwrap();
    let above = integrate_with_pole_detour(f, -8.0, 8.0, &[1.0], DetourSide::Upper, &cfg).unwrap();
    // the two contours differ by a counterclockwise loop: 2 pi i g'(1) with g = exp(-z^2)
    let residue = c(0.0, 2.0 * PI) * (-2.0 * (-1.0f64).exp());
    assert!((below.value - above.value - residue).norm() < 1e-10);
    // real on the axis: the two contours are conjugate
    assert!(((below.value + above.value) * 0.5).im.abs() < 1e-10);
}

#[test]
fn detour_radius_does_not_matter() {
    let f = |z: Complex<f64>| (-(z * z) / 2.0).exp() / ((z - 2.0) * (z + 0.5));
    let at = |r| {
        let cfg = QuadratureConfig {
            detour_radius: r,
            ..Default::default()
        };
        integrate_with_pole_detour(f, -10.0, 10.0, &[-0.5, 2.0], DetourSide::Lower, &cfg)
            .unwrap()
            .value
    };
    assert!((at(0.1) - at(0.4)).norm() < 1e-10);
}

#[test]
fn rectangle_integral_of_a_product() {
    let cfg = QuadratureConfig::default();
    let est = integrate_2d(
        |x: f64, y: f64| c((-x * x - 2.0 * y * y).exp() * (1.0 + x * y), 0.0),
        Rectangle::square(8.0),
        &cfg,
    )
    .unwrap();
    let want = PI / 2f64.sqrt();
    assert!((est.value.re - want).abs() < 1e-10);
}

#[test]
fn richardson_removes_linear_and_quadratic_terms() {
    let ladder = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
    let samples: Vec<(f64, Complex<f64>)> = ladder
        .iter()
        .map(|&e| (e, c(0.3 + 2.0 * e - 7.0 * e * e, -e)))
        .collect();
    let r = extrapolate_epsilon(&samples).unwrap();
    assert!((r.extrapolated - c(0.3, 0.0)).norm() < 1e-13);
    assert!(r.residual < 1e-12);
}

#[test]
fn unreachable_tolerance_reports_the_best_estimate() {
    let cfg = QuadratureConfig {
        max_subdivisions: 3,
        ..Default::default()
    };
    let err = integrate_1d(|x: f64| c((1.0 / x).sin(), 0.0), 1e-6, 1.0, &cfg).unwrap_err();
    match err {
        Error::Convergence { re, error, .. } => {
            assert!(re.is_finite() && error > 0.0);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn single_precision_path() {
    let cfg = QuadratureConfig::<f32> {
        abs_tol: 1e-6,
        rel_tol: 1e-5,
        ..Default::default()
    };
    let est = integrate_1d(|x: f32| Complex::new((-x * x).exp(), 0.0), -8.0, 8.0, &cfg).unwrap();
    assert!((est.value.re - std::f32::consts::PI.sqrt()).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn splitting_the_interval_is_additive(a in -3.0f64..0.0, m in 0.0f64..1.0, b in 1.0f64..4.0) {
        let cfg = QuadratureConfig::default();
        let f = |x: f64| c(x.cos() * (-x * x / 3.0).exp(), x.sin());
        let whole = integrate_1d(f, a, b, &cfg).unwrap().value;
        let left = integrate_1d(f, a, m, &cfg).unwrap().value;
        let right = integrate_1d(f, m, b, &cfg).unwrap().value;
        prop_assert!((whole - left - right).norm() < 1e-10);
    }

    #[test]
    fn conjugate_integrand_gives_conjugate_integral(k in -3.0f64..3.0) {
        let cfg = QuadratureConfig::default();
        let f = |x: f64| c(-x * x, k * x).exp();
        let g = |x: f64| c(-x * x, -k * x).exp();
        let a = integrate_1d(f, -9.0, 9.0, &cfg).unwrap().value;
        let b = integrate_1d(g, -9.0, 9.0, &cfg).unwrap().value;
        prop_assert!((a - b.conj()).norm() < 1e-12);
    }
}
