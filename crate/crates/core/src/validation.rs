//! Independent cross-checks run as a suite: limit relations of the kernels,
//! the cylinder image identity, time-machine consistency and the
//! truncated-window switching.
//!
//! Every check reports a measured deviation against a bound; a check passes
//! when `measured <= bound`.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{
    analytic, EinsteinCylinder, Geometry, PoincareAdS2, StaticTrajectory, TimeMachine,
};
use crate::quadrature::QuadratureConfig;
use crate::response::{
    image_term, response_ads2, response_minkowski_closed, response_time_machine,
    response_truncated_switching, tail_estimate, DetectorConfig, TimeMachineOptions,
};
use crate::special::trigamma;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub passed: bool,
    pub context: BTreeMap<String, f64>,
}

impl CheckOutcome {
    pub fn new(
        name: impl Into<String>,
        measured: f64,
        bound: f64,
        context: &[(&str, f64)],
    ) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
            passed: measured <= bound,
            context: context.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    fn with_bound(mut self, bound: f64) -> Self {
        self.bound = bound;
        self.passed = self.measured <= bound;
        self
    }
}

/// Two-rung scaling tests at each `dtau`: `|A_AdS2 - A_M|` for `w = 0.02, 0.01`
/// and `|A_EC - A_M|` for `l = 100, 200` must both shrink by `4` within `tolerance`.
pub fn check_kernel_limits(dtau_grid: &[f64], tolerance: f64) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for &dtau in dtau_grid {
        let z = Complex::from(dtau);
        let flat = analytic::minkowski(z);
        let ads = |w: f64| (analytic::ads2(z, w) - flat).norm();
        let ratio = ads(0.02) / ads(0.01);
        out.push(CheckOutcome::new(
            "ads2_curvature_scaling",
            (ratio / 4.0 - 1.0).abs(),
            tolerance,
            &[
                ("dtau", dtau),
                ("w_coarse", 0.02),
                ("w_fine", 0.01),
                ("ratio", ratio),
            ],
        ));
        let ec = |l: f64| {
            let g = EinsteinCylinder::new(l, 0.01).expect("valid cylinder");
            (analytic::cylinder_oscillator(z, l) + g.zero_mode() - flat).norm()
        };
        let ratio = ec(100.0) / ec(200.0);
        out.push(CheckOutcome::new(
            "ec_circumference_scaling",
            (ratio / 4.0 - 1.0).abs(),
            tolerance,
            &[
                ("dtau", dtau),
                ("l_small", 100.0),
                ("l_large", 200.0),
                ("ratio", ratio),
            ],
        ));
    }
    let zero = Complex::from(0.0_f64);
    let finite = analytic::ads2_regular(zero, 0.05).norm().is_finite()
        && analytic::cylinder_regular(
            zero,
            &EinsteinCylinder::new(10.0, 0.01).expect("valid cylinder"),
        )
        .norm()
        .is_finite();
    out.push(CheckOutcome::new(
        "regular_parts_finite_at_coincidence",
        if finite { 0.0 } else { 1.0 },
        0.0,
        &[("dtau", 0.0)],
    ));
    out
}

/// Sum of flat kernels over the images `dtau + n L`, `|n| <= n_max`, with the
/// exact remainder `-(1 / 2 pi L^2) [psi1(n_max + 1 + s) + psi1(n_max + 1 - s)]`, `s = dtau / L`.
pub fn ec_image_sum(circumference: f64, dtau: f64, n_max: u32) -> f64 {
    let n_max = n_max as i32;
    let mut sum = 0.0;
    for n in (1..=n_max).rev() {
        for m in [n, -n] {
            sum += analytic::minkowski(Complex::from(dtau + m as f64 * circumference)).re;
        }
    }
    sum += analytic::minkowski(Complex::from(dtau)).re;
    let s = dtau / circumference;
    let next = n_max as f64 + 1.0;
    let tail = -(trigamma(next + s) + trigamma(next - s))
        / (2.0 * std::f64::consts::PI * circumference * circumference);
    sum + tail
}

/// Largest `|A_EC^osc - image sum|` over `dtau_grid`.
pub fn check_ec_image_identity(circumference: f64, dtau_grid: &[f64], n_max: u32) -> CheckOutcome {
    let worst = dtau_grid
        .iter()
        .map(|&dtau| {
            let direct = analytic::cylinder_oscillator(Complex::from(dtau), circumference).re;
            (direct - ec_image_sum(circumference, dtau, n_max)).abs() / direct.abs().max(1.0)
        })
        .fold(0.0, f64::max);
    let lo = dtau_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = dtau_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    CheckOutcome::new(
        "ec_image_identity",
        worst,
        1e-8,
        &[
            ("l", circumference),
            ("dtau_min", lo),
            ("dtau_max", hi),
            ("n_max", n_max as f64),
        ],
    )
}

/// Change in the image sum when `n_max` is halved.
pub fn check_ec_image_truncation(circumference: f64, dtau: f64, n_max: u32) -> CheckOutcome {
    let full = ec_image_sum(circumference, dtau, n_max);
    let half = ec_image_sum(circumference, dtau, n_max / 2);
    CheckOutcome::new(
        "ec_image_truncation",
        (full - half).abs(),
        1e-6,
        &[
            ("l", circumference),
            ("dtau", dtau),
            ("n_max", n_max as f64),
        ],
    )
}

/// Parameters of the time-machine checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TmCheckParams {
    pub omega: f64,
    pub w: f64,
    pub ell: f64,
    /// Circumference for the `xi`-invariance check.
    pub ell_xi: f64,
    /// Circumference for the kernel symmetry checks.
    pub ell_kernel: f64,
    pub n: u32,
    /// Enable the Jacobi-theta closed-form comparison.
    pub theta_cross_check: bool,
}

impl Default for TmCheckParams {
    fn default() -> Self {
        Self {
            omega: 0.1,
            w: 0.05,
            ell: 100.0,
            ell_xi: 50.0,
            ell_kernel: 10.0,
            n: 10,
            theta_cross_check: false,
        }
    }
}

pub fn check_tm_consistency(
    p: &TmCheckParams,
    cfg: &QuadratureConfig<f64>,
) -> Result<Vec<CheckOutcome>> {
    if p.theta_cross_check {
        return Err(Error::Input(
            "the Jacobi-theta cross-check has no closed form implemented".into(),
        ));
    }
    let det = DetectorConfig::new(p.omega);
    let tm = TimeMachine::from_curvature(p.w, p.ell)?;
    let ads = response_ads2(&det, &PoincareAdS2::new(p.w)?, cfg)?.probability;
    let zeroth = image_term(&det, &tm, 0, cfg)?.value.re;
    let mut out = vec![CheckOutcome::new(
        "tm_zeroth_image_is_ads2",
        ((zeroth - ads) / ads).abs(),
        1e-4,
        &[("omega", p.omega), ("w", p.w), ("ell", p.ell)],
    )];

    let tm_xi = TimeMachine::from_curvature(p.w, p.ell_xi)?;
    let (a, b) = rayon::join(
        || response_time_machine(&det, &tm_xi, cfg, p.n),
        || response_time_machine(&det.with_xi(5.0), &tm_xi, cfg, p.n),
    );
    let (a, b) = (a?, b?);
    out.push(CheckOutcome::new(
        "tm_xi_invariance",
        (a.probability - b.probability).abs(),
        cfg.abs_tol.max(cfg.rel_tol * a.probability.abs()),
        &[
            ("omega", p.omega),
            ("w", p.w),
            ("ell", p.ell_xi),
            ("xi_a", 1.0),
            ("xi_b", 5.0),
        ],
    ));

    let tm_kernel = TimeMachine::from_curvature(p.w, p.ell_kernel)?;
    out.push(scale_invariance(&tm_kernel));
    out.push(index_shift(&tm_kernel, p.n));
    Ok(out)
}

fn kernel_points(tm: &TimeMachine<f64>) -> Vec<(Complex<f64>, Complex<f64>)> {
    let h = 0.9 * tm.causal_limit().min(5.0);
    let taus = [-0.8 * h, -0.25 * h, 0.1 * h, 0.6 * h];
    let mut pts = Vec::new();
    for &t in &taus {
        for &u in &taus {
            pts.push((Complex::new(t, -0.05), Complex::new(u, 0.05)));
        }
    }
    pts
}

/// `W(x, A^n x') = W(A^-n x, x')` for the differentiated kernel.
fn scale_invariance(tm: &TimeMachine<f64>) -> CheckOutcome {
    let traj = StaticTrajectory::<f64>::default();
    let w = tm.inverse_radius();
    let v = traj.velocity(w);
    let eps = 1e-3;
    let mut worst: f64 = 0.0;
    for n in -3..=3 {
        let a = tm.warp.powi(n);
        for (t, u) in kernel_points(tm) {
            let x = traj.point(t, w);
            let y = traj.point(u, w);
            let forward =
                analytic::ads2_wightman_derivative(x, v, y.scale(a), v.scale(a), eps * a.sqrt());
            let back = analytic::ads2_wightman_derivative(
                x.scale(1.0 / a),
                v.scale(1.0 / a),
                y,
                v,
                eps / a.sqrt(),
            );
            worst = worst.max((forward - back).norm() / forward.norm());
        }
    }
    CheckOutcome::new(
        "tm_scale_invariance",
        worst,
        1e-12,
        &[("warp", tm.warp), ("period", tm.period), ("n_max", 3.0)],
    )
}

/// Partial sums over `[-N, N]` and, with the second point pre-mapped by
/// `A^-1`, over `[-N + 1, N + 1]`.
fn index_shift(tm: &TimeMachine<f64>, n_max: u32) -> CheckOutcome {
    let traj = StaticTrajectory::<f64>::default();
    let w = tm.inverse_radius();
    let v = traj.velocity(w);
    let eps = 1e-3;
    let n_max = n_max as i32;
    let mut worst: f64 = 0.0;
    let mut tail: f64 = 0.0;
    for (t, u) in kernel_points(tm) {
        let x = traj.point(t, w);
        // images of y under A^n with y pre-mapped by A^-shift
        let sum = |shift: i32| {
            let pre = tm.warp.powi(-shift);
            let (y, vy) = (traj.point(u, w).scale(pre), v.scale(pre));
            let mut pairs = vec![0.0; n_max as usize + 1];
            let mut total = Complex::new(0.0, 0.0);
            for n in -n_max + shift..=n_max + shift {
                let a = tm.warp.powi(n);
                let reg = eps * tm.warp.powf(0.5 * (n - shift) as f64);
                let k = analytic::ads2_wightman_derivative(x, v, y.scale(a), vy.scale(a), reg);
                pairs[(n - shift).unsigned_abs() as usize] += k.norm();
                total += k;
            }
            (total, pairs)
        };
        let (direct, pairs) = sum(0);
        let (shifted, _) = sum(1);
        worst = worst.max((direct - shifted).norm());
        tail = tail.max(tail_estimate(&pairs));
    }
    CheckOutcome::new(
        "tm_index_shift",
        worst,
        tail,
        &[
            ("warp", tm.warp),
            ("period", tm.period),
            ("n_max", n_max as f64),
        ],
    )
}

/// Minkowski response with the window `[-5/2, 5/2]`: the gap to the full
/// Gaussian at `eps_fine` must not exceed the gap at `eps_coarse`.
pub fn check_truncated_switching(
    omega: f64,
    eps_coarse: f64,
    eps_fine: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<CheckOutcome> {
    let det = DetectorConfig::new(omega);
    let full = response_minkowski_closed(&det)?.probability;
    let opts = TimeMachineOptions::default();
    let gap = |eps| -> Result<f64> {
        let p =
            response_truncated_switching(&det, &Geometry::Minkowski, eps, cfg, &opts)?.probability;
        Ok(((p - full) / full).abs())
    };
    let (coarse, fine) = (gap(eps_coarse)?, gap(eps_fine)?);
    Ok(CheckOutcome::new(
        "truncated_switching_monotone",
        fine / coarse,
        1.0,
        &[
            ("omega", omega),
            ("eps_coarse", eps_coarse),
            ("eps_fine", eps_fine),
            ("gap_coarse", coarse),
            ("gap_fine", fine),
        ],
    ))
}

/// AdS2 response at two detour radii.
pub fn check_ads2_contour(omega: f64, w: f64, cfg: &QuadratureConfig<f64>) -> Result<CheckOutcome> {
    let det = DetectorConfig::new(omega);
    let geom = PoincareAdS2::new(w)?;
    let at = |r| {
        let cfg = QuadratureConfig {
            detour_radius: r,
            ..cfg.clone()
        };
        response_ads2(&det, &geom, &cfg).map(|r| r.probability)
    };
    let (a, b) = (at(0.2)?, at(0.4)?);
    Ok(CheckOutcome::new(
        "ads2_detour_radius_invariance",
        (a - b).abs(),
        1e-8,
        &[
            ("omega", omega),
            ("w", w),
            ("radius_a", 0.2),
            ("radius_b", 0.4),
        ],
    ))
}

/// Check groups in execution order.
pub const CHECKS: &[(&str, &str)] = &[
    ("kernels", "kernel_limits"),
    ("ec", "ec_image_identity"),
    ("tm", "tm_consistency"),
    ("response", "ads2_contour"),
    ("response", "truncated_switching"),
];

#[derive(Clone, Debug, Default)]
pub struct SuiteConfig {
    /// Groups or check names to run; `None` runs everything.
    pub only: Option<Vec<String>>,
    /// Replaces every bound.
    pub bound: Option<f64>,
    pub quadrature: QuadratureConfig<f64>,
    pub tm: TmCheckParams,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SuiteReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    /// One JSON object per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for o in &self.outcomes {
            serde_json::to_writer(&mut out, o)?;
            writeln!(out)?;
        }
        Ok(())
    }
}

fn run_check(name: &str, config: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    let cfg = &config.quadrature;
    match name {
        "kernel_limits" => Ok(check_kernel_limits(&[0.5, 1.0, 2.0], 0.2)),
        "ec_image_identity" => Ok(vec![
            check_ec_image_identity(2.0, &[0.3, 1.0, 1.7], 50),
            check_ec_image_truncation(2.0, 0.3, 50),
        ]),
        "tm_consistency" => check_tm_consistency(&config.tm, cfg),
        "ads2_contour" => Ok(vec![check_ads2_contour(0.1, 0.05, cfg)?]),
        "truncated_switching" => Ok(vec![check_truncated_switching(0.1, 0.1, 0.05, cfg)?]),
        _ => unreachable!("check names come from CHECKS"),
    }
}

/// Runs the selected checks concurrently and reports them in declared order.
pub fn run_all(config: &SuiteConfig) -> Result<SuiteReport> {
    let selected: Vec<&str> = match &config.only {
        None => CHECKS.iter().map(|(_, name)| *name).collect(),
        Some(only) => {
            for token in only {
                if !CHECKS.iter().any(|(g, n)| g == token || n == token) {
                    return Err(Error::Input(format!("unknown check or group '{token}'")));
                }
            }
            CHECKS
                .iter()
                .filter(|(g, n)| only.iter().any(|t| t == g || t == n))
                .map(|(_, name)| *name)
                .collect()
        }
    };
    let results: Vec<Result<Vec<CheckOutcome>>> = selected
        .par_iter()
        .map(|name| run_check(name, config))
        .collect();
    let mut outcomes = Vec::new();
    for r in results {
        outcomes.extend(r?);
    }
    if let Some(bound) = config.bound {
        outcomes = outcomes.into_iter().map(|o| o.with_bound(bound)).collect();
    }
    Ok(SuiteReport { outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_limits_pass() {
        let out = check_kernel_limits(&[1.0], 0.2);
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|o| o.passed), "{out:?}");
    }

    #[test]
    fn ec_identity_at_generic_and_antipodal_points() {
        assert!(check_ec_image_identity(2.0, &[0.3], 50).passed);
        assert!(check_ec_image_identity(2.0, &[1.0], 50).passed);
        assert!(check_ec_image_truncation(2.0, 0.3, 50).passed);
    }

    #[test]
    fn ec_identity_detects_a_wrong_circumference() {
        let direct = analytic::cylinder_oscillator(Complex::from(0.3), 2.0).re;
        assert!((direct - ec_image_sum(2.1, 0.3, 50)).abs() > 1e-3);
    }

    #[test]
    fn kernel_symmetries() {
        let tm = TimeMachine::from_curvature(0.05, 10.0).unwrap();
        let s = scale_invariance(&tm);
        assert!(s.passed, "{s:?}");
        let i = index_shift(&tm, 10);
        assert!(i.passed, "{i:?}");
    }

    #[test]
    fn empty_selection_is_an_empty_success() {
        let cfg = SuiteConfig {
            only: Some(vec![]),
            ..Default::default()
        };
        let report = run_all(&cfg).unwrap();
        assert!(report.outcomes.is_empty());
        assert!(report.passed());
    }

    #[test]
    fn unknown_check_is_rejected() {
        let cfg = SuiteConfig {
            only: Some(vec!["nope".into()]),
            ..Default::default()
        };
        assert!(matches!(run_all(&cfg), Err(Error::Input(_))));
    }

    #[test]
    fn zero_bound_surfaces_failures() {
        let cfg = SuiteConfig {
            only: Some(vec!["kernels".into()]),
            bound: Some(0.0),
            ..Default::default()
        };
        let report = run_all(&cfg).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn report_is_json_lines() {
        let cfg = SuiteConfig {
            only: Some(vec!["ec".into()]),
            ..Default::default()
        };
        let report = run_all(&cfg).unwrap();
        let mut buf = Vec::new();
        report.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v["passed"].as_bool().unwrap());
        }
    }

    #[test]
    fn theta_slot_is_disabled_by_default() {
        assert!(!TmCheckParams::default().theta_cross_check);
        let p = TmCheckParams {
            theta_cross_check: true,
            ..Default::default()
        };
        assert!(check_tm_consistency(&p, &QuadratureConfig::default()).is_err());
    }
}
