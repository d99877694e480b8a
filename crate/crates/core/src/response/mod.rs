//! Second-order excitation probability `P / lambda^2` of a derivative-coupled
//! detector with Gaussian switching `chi(tau) = exp(-tau^2)`.
//!
//! All times are in units of the switching width `T`.

mod ads2;
mod cylinder;
mod minkowski;
mod switching;
mod time_machine;
mod truncated;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{Geometry, StaticTrajectory};
use crate::quadrature::{ExtrapolationReport, QuadratureConfig};
use crate::scalar::Scalar;

pub use ads2::response_ads2;
pub use cylinder::{ec_zero_mode_response, response_ec_modesum_oracle, response_einstein_cylinder};
pub use minkowski::{response_minkowski_closed, response_minkowski_integral};
pub use switching::{GaussianSwitching, Switching, TruncatedGaussian};
pub use time_machine::{
    image_term, response_time_machine, response_time_machine_with, ImageTerm, TimeMachineOptions,
    Truncation,
};
pub use truncated::response_truncated_switching;

pub(crate) use time_machine::tail_estimate;

/// Detector parameters. Probabilities are reported as `P / lambda^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig<S> {
    /// Dimensionless gap `omega = Omega T`.
    pub omega: S,
    /// Coupling constant, used only for display scaling.
    pub lambda: S,
    /// Static trajectory radius.
    pub xi: S,
}

impl<S: Scalar> DetectorConfig<S> {
    pub fn new(omega: S) -> Self {
        Self {
            omega,
            lambda: S::one(),
            xi: S::one(),
        }
    }

    pub fn with_xi(self, xi: S) -> Self {
        Self { xi, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.omega.is_finite() {
            return Err(Error::InvalidDetector(format!(
                "gap must be finite, got {}",
                self.omega
            )));
        }
        if !self.lambda.is_finite() {
            return Err(Error::InvalidDetector("coupling must be finite".into()));
        }
        StaticTrajectory::new(self.xi)
            .map(|_| ())
            .map_err(|e| Error::InvalidDetector(e.to_string()))
    }

    pub fn trajectory(&self) -> StaticTrajectory<S> {
        StaticTrajectory { xi: self.xi }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    MomentumIntegral,
    RegularSplit,
    ImageSum,
    ModeSumOracle,
    TruncatedWindow,
}

/// Truncated image sum with its convergence diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImageSumReport<S> {
    /// `(n, P^(n))` in the order `0, 1, -1, 2, -2, ...`.
    pub per_term: Vec<(i32, Complex<S>)>,
    pub truncation_n: u32,
    /// Geometric extrapolation of `|P^(n)| + |P^(-n)|` beyond `truncation_n`.
    pub tail_estimate: S,
    /// First `n` from which `|P^(n)| + |P^(-n)|` is non-increasing.
    pub onset: u32,
    /// Largest extrapolation residual over the computed terms.
    pub eps_residual: S,
}

impl<S: Scalar> ImageSumReport<S> {
    /// `|P^(n)| + |P^(-n)|` for `n = 0..=truncation_n` (`n = 0` counted once).
    pub fn pair_magnitudes(&self) -> Vec<S> {
        let mut out = vec![S::zero(); self.truncation_n as usize + 1];
        for (n, p) in &self.per_term {
            out[n.unsigned_abs() as usize] = out[n.unsigned_abs() as usize] + p.norm();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResponseResult<S> {
    /// `P / lambda^2`.
    pub probability: S,
    /// Absolute imaginary part left over by the numerics.
    pub imaginary_residue: S,
    pub method: Method,
    /// Quadrature error bound accumulated over the computation.
    pub quadrature_error: S,
    pub extrapolation: Option<ExtrapolationReport<S>>,
    pub image_sum: Option<ImageSumReport<S>>,
    /// Relative Gaussian mass outside a clipped integration window.
    pub clipped_mass: S,
    pub warnings: Vec<String>,
}

impl<S: Scalar> ResponseResult<S> {
    pub(crate) fn from_value(value: Complex<S>, method: Method, quadrature_error: S) -> Self {
        Self {
            probability: value.re,
            imaginary_residue: value.im.abs(),
            method,
            quadrature_error,
            extrapolation: None,
            image_sum: None,
            clipped_mass: S::zero(),
            warnings: Vec::new(),
        }
    }

    /// `P` including the coupling, `lambda^2 P / lambda^2`.
    pub fn scaled(&self, det: &DetectorConfig<S>) -> S {
        det.lambda * det.lambda * self.probability
    }

    /// Imaginary residue relative to `|P|`.
    pub fn relative_residue(&self) -> S {
        if self.probability == S::zero() {
            self.imaginary_residue
        } else {
            self.imaginary_residue / self.probability.abs()
        }
    }
}

/// Response with full Gaussian switching in any geometry. `truncation` is
/// used only for the time machine.
pub fn response<S: Scalar>(
    det: &DetectorConfig<S>,
    geometry: &Geometry<S>,
    cfg: &QuadratureConfig<S>,
    opts: &TimeMachineOptions<S>,
) -> Result<ResponseResult<S>> {
    match geometry {
        Geometry::Minkowski => response_minkowski_closed(det),
        Geometry::EinsteinCylinder(g) => response_einstein_cylinder(det, g, cfg),
        Geometry::PoincareAdS2(g) => response_ads2(det, g, cfg),
        Geometry::TimeMachine(g) => response_time_machine_with(det, g, cfg, opts),
    }
}

/// `sqrt(pi/2) int_C exp(-z^2/2 - i omega z) reg(z) dz` over `[-H, H]`, with
/// the contour passing below the real poles of `reg`.
pub(crate) fn stationary_regular<S, F>(
    omega: S,
    reg: F,
    poles: &[S],
    cfg: &QuadratureConfig<S>,
) -> Result<(Complex<S>, S)>
where
    S: Scalar,
    F: Fn(Complex<S>) -> Complex<S>,
{
    use crate::quadrature::{integrate_detoured, plan_detours, DetourSide};
    let h = cfg.support_halfwidth;
    let plan = plan_detours(poles, cfg.detour_radius, -h, h)
        .ok_or_else(|| Error::Config("poles leave no integration window".into()))?;
    if plan.detours.iter().any(|d| d.radius > cfg.detour_radius) {
        return Err(Error::Config(format!(
            "detour radius {} exceeds half the pole spacing",
            cfg.detour_radius
        )));
    }
    let scale = (S::FRAC_PI_2()).sqrt();
    let est = integrate_detoured(
        |z| {
            let phase = Complex::new(S::zero(), -omega) * z;
            Ok((phase - z * z * S::lit(0.5)).exp() * reg(z))
        },
        plan.a,
        plan.b,
        &plan.detours,
        DetourSide::Lower,
        cfg,
    )?;
    Ok((est.value * scale, est.error * scale))
}
