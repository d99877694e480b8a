//! Image-sum response of the Poincare time machine.
//!
//! Each image term `P^(n)` is an iterated integral: the outer integral runs
//! over `tau` on the real axis, the inner one over `tau'` along the real
//! axis with semicircles above the two direct light-cone singularities of
//! the `n`-th image. At finite `eps` those singularities sit just below the
//! axis, so the deformed contour is equivalent to the real-axis integral;
//! the values on the `eps` ladder are then extrapolated to `eps = 0`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::switching::{GaussianSwitching, Switching};
use super::{DetectorConfig, ImageSumReport, Method, ResponseResult};
use crate::error::{Error, Result};
use crate::kernels::{
    analytic, time_machine_singularities, NullPoint, StaticTrajectory, TimeMachine,
};
use crate::quadrature::{
    check_ladder, extrapolate_epsilon, inner_config, integrate_path, plan_detours,
    try_integrate_1d, DetourSide, ExtrapolationReport, QuadratureConfig,
};
use crate::scalar::Scalar;
use crate::special::erfc;

const MAX_AUTO_N: u32 = 64;
const MAX_CLIPPED_MASS: f64 = 1e-6;
/// Images with `|n| ln A` beyond this are below double precision.
const MAX_LOG_WARP: f64 = 600.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Sum `n` over `[-N, N]`.
    Fixed(u32),
    /// Stop once `|P^(n)| + |P^(-n)|` stays below the tail tolerance for
    /// two consecutive `n`, at most at `n = 64`.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeMachineOptions<S> {
    pub truncation: Truncation,
    pub tail_tol: S,
}

impl<S: Scalar> Default for TimeMachineOptions<S> {
    fn default() -> Self {
        Self {
            truncation: Truncation::Fixed(10),
            tail_tol: S::lit(1e-6),
        }
    }
}

impl<S: Scalar> TimeMachineOptions<S> {
    pub fn fixed(n: u32) -> Self {
        Self {
            truncation: Truncation::Fixed(n),
            ..Self::default()
        }
    }
}

/// One extrapolated image term.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageTerm<S> {
    pub n: i32,
    pub value: Complex<S>,
    pub extrapolation: ExtrapolationReport<S>,
    /// Largest quadrature error bound over the ladder.
    pub error: S,
}

/// `P_TM` with Gaussian switching summed over `[-N, N]`.
pub fn response_time_machine<S: Scalar>(
    det: &DetectorConfig<S>,
    geom: &TimeMachine<S>,
    cfg: &QuadratureConfig<S>,
    n: u32,
) -> Result<ResponseResult<S>> {
    response_time_machine_with(det, geom, cfg, &TimeMachineOptions::fixed(n))
}

pub fn response_time_machine_with<S: Scalar>(
    det: &DetectorConfig<S>,
    geom: &TimeMachine<S>,
    cfg: &QuadratureConfig<S>,
    opts: &TimeMachineOptions<S>,
) -> Result<ResponseResult<S>> {
    image_sum(det, geom, cfg, opts, &GaussianSwitching, Method::ImageSum)
}

/// A single image term `P^(n)` with Gaussian switching.
pub fn image_term<S: Scalar>(
    det: &DetectorConfig<S>,
    geom: &TimeMachine<S>,
    n: i32,
    cfg: &QuadratureConfig<S>,
) -> Result<ImageTerm<S>> {
    let engine = Engine::new(det, geom, cfg, &GaussianSwitching)?;
    engine.term(n)
}

pub(crate) fn image_sum<S: Scalar, W: Switching<S>>(
    det: &DetectorConfig<S>,
    geom: &TimeMachine<S>,
    cfg: &QuadratureConfig<S>,
    opts: &TimeMachineOptions<S>,
    switching: &W,
    method: Method,
) -> Result<ResponseResult<S>> {
    let engine = Engine::new(det, geom, cfg, switching)?;
    let terms = match opts.truncation {
        Truncation::Fixed(0) => {
            return Err(Error::Input(
                "image-sum truncation N must be at least 1".into(),
            ))
        }
        Truncation::Fixed(n) => engine.terms((-(n as i32)..=n as i32).collect())?,
        Truncation::Auto => engine.auto_terms(opts.tail_tol)?,
    };
    let truncation_n = terms.iter().map(|t| t.n.unsigned_abs()).max().unwrap_or(0);
    let per_term: Vec<(i32, Complex<S>)> = order(truncation_n)
        .map(|n| {
            let t = terms.iter().find(|t| t.n == n).expect("term computed");
            (n, t.value)
        })
        .collect();
    let mut report = ImageSumReport {
        per_term,
        truncation_n,
        tail_estimate: S::zero(),
        onset: 0,
        eps_residual: terms
            .iter()
            .map(|t| t.extrapolation.residual)
            .fold(S::zero(), S::max),
    };
    let magnitudes = report.pair_magnitudes();
    report.tail_estimate = tail_estimate(&magnitudes);
    report.onset = onset(&magnitudes);

    let total: Complex<S> = report
        .per_term
        .iter()
        .fold(Complex::new(S::zero(), S::zero()), |acc, (_, v)| acc + v);
    // the same sum taken rung by rung
    let rungs = cfg.eps_ladder.len();
    let mut ladder_sums = vec![(S::zero(), Complex::new(S::zero(), S::zero())); rungs];
    for n in order(truncation_n) {
        let t = terms.iter().find(|t| t.n == n).expect("term computed");
        for (k, (eps, v)) in t.extrapolation.values_at_eps.iter().enumerate() {
            ladder_sums[k].0 = *eps;
            ladder_sums[k].1 = ladder_sums[k].1 + v;
        }
    }
    let extrapolation = extrapolate_epsilon(&ladder_sums)?;
    let error = terms.iter().fold(S::zero(), |acc, t| acc + t.error);

    let mut result = ResponseResult::from_value(total, method, error);
    result.clipped_mass = engine.clipped_mass;
    if !(report.tail_estimate <= opts.tail_tol) {
        result.warnings.push(format!(
            "image-sum tail estimate {:e} exceeds tolerance {:e} at N = {}",
            report.tail_estimate, opts.tail_tol, report.truncation_n
        ));
    }
    if engine.clipped_mass > S::zero() {
        result.warnings.push(format!(
            "integration window clipped to the causal limit; Gaussian mass outside {:e}",
            engine.clipped_mass
        ));
    }
    result.extrapolation = Some(extrapolation);
    result.image_sum = Some(report);
    Ok(result)
}

/// `0, 1, -1, 2, -2, ..., n_max, -n_max`
fn order(n_max: u32) -> impl Iterator<Item = i32> {
    std::iter::once(0).chain((1..=n_max as i32).flat_map(|n| [n, -n]))
}

/// `t_N rho / (1 - rho)` with `rho = t_N / t_{N-1}`.
pub(crate) fn tail_estimate<S: Scalar>(t: &[S]) -> S {
    let n = t.len() - 1;
    if n == 0 {
        return S::infinity();
    }
    let (last, prev) = (t[n], t[n - 1]);
    if last == S::zero() {
        return S::zero();
    }
    let rho = last / prev;
    if !(rho < S::one()) {
        return S::infinity();
    }
    last * rho / (S::one() - rho)
}

/// Smallest index from which `t` is non-increasing.
pub(crate) fn onset<S: Scalar>(t: &[S]) -> u32 {
    let mut k = t.len() - 1;
    while k > 0 && t[k - 1] >= t[k] {
        k -= 1;
    }
    k as u32
}

struct Engine<'a, S: Scalar, W> {
    omega: S,
    geom: TimeMachine<S>,
    traj: StaticTrajectory<S>,
    cfg: &'a QuadratureConfig<S>,
    inner_cfg: QuadratureConfig<S>,
    switching: &'a W,
    window: S,
    radius: S,
    breaks: Vec<S>,
    clipped_mass: S,
}

impl<'a, S: Scalar, W: Switching<S>> Engine<'a, S, W> {
    fn new(
        det: &DetectorConfig<S>,
        geom: &TimeMachine<S>,
        cfg: &'a QuadratureConfig<S>,
        switching: &'a W,
    ) -> Result<Self> {
        det.validate()?;
        geom.validate()?;
        cfg.validate()?;
        check_ladder(&cfg.eps_ladder)?;
        let limit = geom.causal_limit();
        let support = switching.support().unwrap_or(cfg.support_halfwidth);
        let (window, clipped_mass) = if support > limit {
            // relative mass of exp(-tau^2) beyond the causal limit
            let mass = erfc(limit);
            if switching.support().is_some() || mass > S::lit(MAX_CLIPPED_MASS) {
                return Err(Error::ChronologyViolation {
                    tau: support.as_f64(),
                    limit: limit.as_f64(),
                });
            }
            (limit, mass)
        } else {
            (support, S::zero())
        };
        let radius = cfg
            .detour_radius
            .min(switching.analytic_strip() * S::lit(0.5));
        let mut breaks: Vec<S> = switching
            .breakpoints()
            .into_iter()
            .filter(|b| b.abs() < window)
            .collect();
        breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoint"));
        Ok(Self {
            omega: det.omega,
            geom: *geom,
            traj: det.trajectory(),
            cfg,
            inner_cfg: inner_config(cfg, S::lit(2.0) * window),
            switching,
            window,
            radius,
            breaks,
            clipped_mass,
        })
    }

    fn negligible(&self, n: i32) -> bool {
        S::from_i32(n).unwrap().abs() * self.geom.warp.ln() > S::lit(MAX_LOG_WARP)
    }

    /// `P^(n)` at one regulator value, with its error bound.
    fn term_at(&self, n: i32, eps: S) -> Result<(Complex<S>, S)> {
        if self.negligible(n) {
            return Ok((Complex::new(S::zero(), S::zero()), S::zero()));
        }
        let w = self.geom.inverse_radius();
        let log_a = S::from_i32(n).unwrap() * self.geom.warp.ln();
        let a = log_a.exp();
        let v = self.traj.velocity(w);
        let va: NullPoint<S> = v.scale(a);
        let eps_null = self.traj.xi * w * (log_a * S::lit(0.5)).exp() * eps;
        let h = self.window;
        let i_omega = Complex::new(S::zero(), self.omega);

        let inner = |tau: S| -> Result<Complex<S>> {
            let x = self.traj.point(Complex::from(tau), w);
            let poles = time_machine_singularities(n, tau, &self.geom);
            let Some(plan) = plan_detours(&poles, self.radius, -h, h) else {
                return Ok(Complex::new(S::zero(), S::zero()));
            };
            let est = integrate_path(
                |z| {
                    let y = self.traj.point(z, w).scale(a);
                    let k = analytic::ads2_wightman_derivative(x, v, y, va, eps_null);
                    Ok(self.switching.eval(z) * (i_omega * z).exp() * k)
                },
                plan.a,
                plan.b,
                &plan.detours,
                &self.breaks,
                DetourSide::Upper,
                &self.inner_cfg,
            )?;
            Ok(est.value)
        };

        let mut points = vec![-h];
        points.extend(self.breaks.iter().copied());
        points.push(h);
        let est = try_integrate_1d(
            |tau| {
                let weight = self.switching.value(tau);
                if weight == S::zero() {
                    return Ok(Complex::new(S::zero(), S::zero()));
                }
                Ok((-i_omega * tau).exp() * weight * inner(tau)?)
            },
            &points,
            self.cfg,
        )?;
        Ok((est.value, est.error))
    }

    fn term(&self, n: i32) -> Result<ImageTerm<S>> {
        let samples: Vec<Result<(S, Complex<S>, S)>> = self
            .cfg
            .eps_ladder
            .par_iter()
            .map(|&eps| self.term_at(n, eps).map(|(v, e)| (eps, v, e)))
            .collect();
        let mut values = Vec::with_capacity(samples.len());
        let mut error = S::zero();
        for s in samples {
            let (eps, v, e) = s?;
            values.push((eps, v));
            error = error.max(e);
        }
        let extrapolation = extrapolate_epsilon(&values)?;
        Ok(ImageTerm {
            n,
            value: extrapolation.extrapolated,
            extrapolation,
            error,
        })
    }

    fn terms(&self, ns: Vec<i32>) -> Result<Vec<ImageTerm<S>>> {
        let computed: Vec<Result<ImageTerm<S>>> = ns.par_iter().map(|&n| self.term(n)).collect();
        computed.into_iter().collect()
    }

    fn auto_terms(&self, tail_tol: S) -> Result<Vec<ImageTerm<S>>> {
        let mut terms = self.terms(vec![0])?;
        let mut below = 0;
        let mut n = 1;
        while n <= MAX_AUTO_N as i32 {
            let pair = self.terms(vec![n, -n])?;
            let t = pair[0].value.norm() + pair[1].value.norm();
            terms.extend(pair);
            below = if t < tail_tol { below + 1 } else { 0 };
            if below == 2 {
                break;
            }
            n += 1;
        }
        Ok(terms)
    }
}
