//! Derivative two-point functions `A(tau, tau') = d_tau d_tau' W(x(tau), x(tau'))`
//! pulled back to a static detector.
//!
//! Every kernel is evaluated at a finite regulator: the proper-time
//! separation enters as `z = dtau - i eps`. The public functions validate
//! their inputs; the [`analytic`] submodule exposes the same expressions as
//! analytic functions of complex arguments, which the contour integrators
//! evaluate off the real axis.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Flat two-dimensional spacetime with a compact spatial circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EinsteinCylinder<S> {
    /// Spatial circumference `L`, in units of the switching width.
    pub circumference: S,
    /// Zero-mode regulator `gamma`.
    pub gamma: S,
}

impl<S: Scalar> EinsteinCylinder<S> {
    pub fn new(circumference: S, gamma: S) -> Result<Self> {
        let geom = Self {
            circumference,
            gamma,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.circumference > S::zero()) || !self.circumference.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "cylinder circumference must be positive, got {}",
                self.circumference
            )));
        }
        if !(self.gamma >= S::zero()) || !self.gamma.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "zero-mode regulator must be nonnegative, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Constant zero-mode contribution `gamma / (2 L^2)`.
    pub fn zero_mode(&self) -> S {
        self.gamma / (S::lit(2.0) * self.circumference * self.circumference)
    }

    /// Below this separation the regular part is taken from its Taylor series.
    pub fn series_threshold(&self) -> S {
        S::lit(1e-3) * self.circumference
    }
}

/// Poincare patch of AdS2 with inverse radius `W`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareAdS2<S> {
    pub inverse_radius: S,
}

impl<S: Scalar> PoincareAdS2<S> {
    pub fn new(inverse_radius: S) -> Result<Self> {
        let geom = Self { inverse_radius };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inverse_radius > S::zero()) || !self.inverse_radius.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "AdS2 inverse radius must be positive, got {}",
                self.inverse_radius
            )));
        }
        Ok(())
    }

    /// Real locations `+-2/W` of the reflected-light-ray singularities.
    pub fn poles(&self) -> [S; 2] {
        let p = S::lit(2.0) / self.inverse_radius;
        [-p, p]
    }
}

/// Quotient of the Poincare patch by `(zeta+, zeta-) ~ A (zeta+, zeta-)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeMachine<S> {
    /// Warp parameter `A > 1`.
    pub warp: S,
    /// Proper period `L > 0`.
    pub period: S,
}

impl<S: Scalar> TimeMachine<S> {
    pub fn new(warp: S, period: S) -> Result<Self> {
        let geom = Self { warp, period };
        geom.validate()?;
        Ok(geom)
    }

    /// Time machine with prescribed curvature `W` and period `L`, i.e. `A = exp(W L)`.
    pub fn from_curvature(inverse_radius: S, period: S) -> Result<Self> {
        if !(inverse_radius > S::zero()) {
            return Err(Error::InvalidGeometry(format!(
                "time-machine curvature must be positive, got {inverse_radius}"
            )));
        }
        Self::new((inverse_radius * period).exp(), period)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period > S::zero()) || !self.period.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "time-machine period must be positive, got {}",
                self.period
            )));
        }
        if !(self.warp > S::one()) || !self.warp.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "time-machine warp must exceed 1 (use the Einstein cylinder for A = 1), got {}",
                self.warp
            )));
        }
        Ok(())
    }

    /// `W = ln(A) / L`.
    pub fn inverse_radius(&self) -> S {
        self.warp.ln() / self.period
    }

    /// Half-width `1/W` of the proper-time window free of closed timelike curves.
    pub fn causal_limit(&self) -> S {
        self.period / self.warp.ln()
    }

    /// The covering space with the same local curvature.
    pub fn covering_space(&self) -> PoincareAdS2<S> {
        PoincareAdS2 {
            inverse_radius: self.inverse_radius(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry<S> {
    Minkowski,
    EinsteinCylinder(EinsteinCylinder<S>),
    PoincareAdS2(PoincareAdS2<S>),
    TimeMachine(TimeMachine<S>),
}

impl<S: Scalar> Geometry<S> {
    pub fn validate(&self) -> Result<()> {
        match self {
            Geometry::Minkowski => Ok(()),
            Geometry::EinsteinCylinder(g) => g.validate(),
            Geometry::PoincareAdS2(g) => g.validate(),
            Geometry::TimeMachine(g) => g.validate(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Geometry::Minkowski => "minkowski",
            Geometry::EinsteinCylinder(_) => "einstein_cylinder",
            Geometry::PoincareAdS2(_) => "poincare_ads2",
            Geometry::TimeMachine(_) => "time_machine",
        }
    }
}

/// Pair of null coordinates `(zeta+, zeta-)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullPoint<T> {
    pub plus: T,
    pub minus: T,
}

impl<T> NullPoint<T> {
    pub fn scale<F: Copy>(self, factor: F) -> Self
    where
        T: std::ops::Mul<F, Output = T>,
    {
        Self {
            plus: self.plus * factor,
            minus: self.minus * factor,
        }
    }
}

/// Static observer at Poincare radius `xi`: `zeta+-(tau) = xi (1 +- W tau)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaticTrajectory<S> {
    pub xi: S,
}

impl<S: Scalar> Default for StaticTrajectory<S> {
    fn default() -> Self {
        Self { xi: S::one() }
    }
}

impl<S: Scalar> StaticTrajectory<S> {
    pub fn new(xi: S) -> Result<Self> {
        if !(xi > S::zero()) || !xi.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "trajectory radius must be positive, got {xi}"
            )));
        }
        Ok(Self { xi })
    }

    pub fn point(&self, tau: Complex<S>, inverse_radius: S) -> NullPoint<Complex<S>> {
        let shift = tau * inverse_radius;
        NullPoint {
            plus: (shift + S::one()) * self.xi,
            minus: (-shift + S::one()) * self.xi,
        }
    }

    /// Proper-time derivative of the null coordinates.
    pub fn velocity(&self, inverse_radius: S) -> NullPoint<S> {
        let v = self.xi * inverse_radius;
        NullPoint { plus: v, minus: -v }
    }

    /// Magnitude of the proper acceleration, which is `W` for every `xi`.
    pub fn acceleration(&self, inverse_radius: S) -> S {
        inverse_radius
    }
}

/// A kernel evaluated at a finite regulator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue<S> {
    pub value: Complex<S>,
    pub epsilon: S,
}

/// Einstein-cylinder kernel split into its oscillator and zero-mode parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderKernel<S> {
    pub oscillator: Complex<S>,
    pub zero_mode: S,
    pub epsilon: S,
}

impl<S: Scalar> CylinderKernel<S> {
    pub fn total(&self) -> KernelValue<S> {
        KernelValue {
            value: self.oscillator + self.zero_mode,
            epsilon: self.epsilon,
        }
    }
}

fn check_eps<S: Scalar>(eps: S) -> Result<()> {
    if eps > S::zero() && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidRegulator(eps.as_f64()))
    }
}

fn regulated<S: Scalar>(dtau: S, eps: S) -> Complex<S> {
    Complex::new(dtau, -eps)
}

pub fn minkowski<S: Scalar>(dtau: S, eps: S) -> Result<KernelValue<S>> {
    check_eps(eps)?;
    Ok(KernelValue {
        value: analytic::minkowski(regulated(dtau, eps)),
        epsilon: eps,
    })
}

pub fn einstein_cylinder<S: Scalar>(
    dtau: S,
    geom: &EinsteinCylinder<S>,
    eps: S,
) -> Result<KernelValue<S>> {
    Ok(einstein_cylinder_split(dtau, geom, eps)?.total())
}

pub fn einstein_cylinder_split<S: Scalar>(
    dtau: S,
    geom: &EinsteinCylinder<S>,
    eps: S,
) -> Result<CylinderKernel<S>> {
    check_eps(eps)?;
    geom.validate()?;
    Ok(CylinderKernel {
        oscillator: analytic::cylinder_oscillator(regulated(dtau, eps), geom.circumference),
        zero_mode: geom.zero_mode(),
        epsilon: eps,
    })
}

pub fn ads2<S: Scalar>(dtau: S, geom: &PoincareAdS2<S>, eps: S) -> Result<KernelValue<S>> {
    check_eps(eps)?;
    geom.validate()?;
    Ok(KernelValue {
        value: analytic::ads2(regulated(dtau, eps), geom.inverse_radius),
        epsilon: eps,
    })
}

/// Contribution of the `n`-th image to the time-machine kernel,
/// `d_tau d_tau' W_AdS2(x(tau), A^n x(tau'))`.
pub fn time_machine_term<S: Scalar>(
    n: i32,
    tau: S,
    tau2: S,
    geom: &TimeMachine<S>,
    traj: &StaticTrajectory<S>,
    eps: S,
) -> Result<KernelValue<S>> {
    check_eps(eps)?;
    geom.validate()?;
    let limit = geom.causal_limit();
    for t in [tau, tau2] {
        if t.abs() > limit {
            return Err(Error::ChronologyViolation {
                tau: t.as_f64(),
                limit: limit.as_f64(),
            });
        }
    }
    Ok(KernelValue {
        value: analytic::time_machine_term(
            n,
            Complex::from(tau),
            Complex::from(tau2),
            geom,
            traj,
            eps,
        ),
        epsilon: eps,
    })
}

/// Real `tau'` at which the two direct terms of the `n`-th image diverge for fixed `tau`.
///
/// For `n = 0` both coincide with `tau`.
pub fn time_machine_singularities<S: Scalar>(n: i32, tau: S, geom: &TimeMachine<S>) -> [S; 2] {
    let w = geom.inverse_radius();
    let a = (S::from_i32(n).unwrap() * geom.warp.ln()).exp();
    let advanced = ((S::one() + w * tau) / a - S::one()) / w;
    let retarded = (S::one() - (S::one() - w * tau) / a) / w;
    [advanced, retarded]
}

/// `A_geometry - A_Minkowski` for the stationary curved or compact geometries.
///
/// Minkowski input is an error unless `allow_flat` is set, in which case the
/// identically vanishing regular part is returned. The time machine has no
/// stationary regular part and is always rejected.
pub fn regular_part<S: Scalar>(
    geometry: &Geometry<S>,
    dtau: S,
    eps: S,
    allow_flat: bool,
) -> Result<KernelValue<S>> {
    check_eps(eps)?;
    geometry.validate()?;
    let z = regulated(dtau, eps);
    let value = match geometry {
        Geometry::Minkowski if allow_flat => Complex::new(S::zero(), S::zero()),
        Geometry::Minkowski => return Err(Error::UndefinedSplit("minkowski")),
        Geometry::TimeMachine(_) => return Err(Error::UndefinedSplit("time_machine")),
        Geometry::EinsteinCylinder(g) => analytic::cylinder_regular(z, g),
        Geometry::PoincareAdS2(g) => analytic::ads2_regular(z, g.inverse_radius),
    };
    Ok(KernelValue {
        value,
        epsilon: eps,
    })
}

/// The kernels as analytic functions of the regulated separation `z = dtau - i eps`.
///
/// No validation; callers pass parameters already checked.
pub mod analytic {
    use super::*;

    fn inv_two_pi<S: Scalar>() -> S {
        S::FRAC_1_PI() * S::lit(0.5)
    }

    /// `-1 / (2 pi z^2)`
    pub fn minkowski<S: Scalar>(z: Complex<S>) -> Complex<S> {
        -(z * z).inv() * inv_two_pi::<S>()
    }

    /// `-(pi / 2L^2) csc^2(pi z / L)`
    pub fn cylinder_oscillator<S: Scalar>(z: Complex<S>, circumference: S) -> Complex<S> {
        let s = (z * (S::PI() / circumference)).sin();
        -(s * s).inv() * (S::PI() / (S::lit(2.0) * circumference * circumference))
    }

    /// `-1/(2 pi z^2) (16 - 12 W^2 z^2) / (4 - W^2 z^2)^2`
    pub fn ads2<S: Scalar>(z: Complex<S>, inverse_radius: S) -> Complex<S> {
        let x = z * z * (inverse_radius * inverse_radius);
        let four = S::lit(4.0);
        let d = -x + four;
        minkowski(z) * (-x * S::lit(12.0) + S::lit(16.0)) / (d * d)
    }

    /// Cylinder kernel minus the flat kernel, including the zero mode.
    pub fn cylinder_regular<S: Scalar>(z: Complex<S>, geom: &EinsteinCylinder<S>) -> Complex<S> {
        let l = geom.circumference;
        if z.norm() < geom.series_threshold() {
            // csc^2 x = 1/x^2 + 1/3 + x^2/15 + 2x^4/189 + x^6/675 + ...
            let pi = S::PI();
            let l2 = l * l;
            let c0 = -pi / (S::lit(6.0) * l2);
            let c2 = -pi.powi(3) / (S::lit(30.0) * l2 * l2);
            let c4 = -pi.powi(5) / (S::lit(189.0) * l2.powi(3));
            let c6 = -pi.powi(7) / (S::lit(1350.0) * l2.powi(4));
            let z2 = z * z;
            ((z2 * c6 + c4) * z2 + c2) * z2 + c0 + geom.zero_mode()
        } else {
            cylinder_oscillator(z, l) - minkowski(z) + geom.zero_mode()
        }
    }

    /// AdS2 kernel minus the flat kernel, `W^2 (4 + W^2 z^2) / (2 pi (4 - W^2 z^2)^2)`.
    ///
    /// The closed form has no cancellation at coincidence.
    pub fn ads2_regular<S: Scalar>(z: Complex<S>, inverse_radius: S) -> Complex<S> {
        let w2 = inverse_radius * inverse_radius;
        let x = z * z * w2;
        let four = S::lit(4.0);
        let d = -x + four;
        (x + four) / (d * d) * (w2 * inv_two_pi::<S>())
    }

    /// `d_tau d_tau' W_AdS2(x, y)` for two points moving with null velocities `vx`, `vy`.
    ///
    /// `eps_null` is the regulator in null-coordinate units:
    ///
    /// `W = -(1/4pi) log[(x+ - y+ - i0)(y- - x- - i0) / ((-x- - y+ - i0)(x+ + y- - i0))]`
    pub fn ads2_wightman_derivative<S: Scalar>(
        x: NullPoint<Complex<S>>,
        vx: NullPoint<S>,
        y: NullPoint<Complex<S>>,
        vy: NullPoint<S>,
        eps_null: S,
    ) -> Complex<S> {
        let ie = Complex::new(S::zero(), eps_null);
        let f1 = x.plus - y.plus - ie;
        let f2 = y.minus - x.minus - ie;
        let f3 = -x.minus - y.plus - ie;
        let f4 = x.plus + y.minus - ie;
        let sum = (f1 * f1).inv() * (vx.plus * vy.plus)
            + (f2 * f2).inv() * (vx.minus * vy.minus)
            + (f3 * f3).inv() * (vx.minus * vy.plus)
            + (f4 * f4).inv() * (vx.plus * vy.minus);
        -sum * (S::FRAC_1_PI() * S::lit(0.25))
    }

    /// Image term `n` at complex proper times.
    ///
    /// The regulator is `eps` in proper time at `n = 0` and is scaled by
    /// `A^{n/2}` for the images, which keeps `term(n)(tau, tau')` and
    /// `conj(term(-n)(tau', tau))` equal at finite `eps`.
    pub fn time_machine_term<S: Scalar>(
        n: i32,
        tau: Complex<S>,
        tau2: Complex<S>,
        geom: &TimeMachine<S>,
        traj: &StaticTrajectory<S>,
        eps: S,
    ) -> Complex<S> {
        let w = geom.inverse_radius();
        let log_a = S::from_i32(n).unwrap() * geom.warp.ln();
        let a = log_a.exp();
        let x = traj.point(tau, w);
        let v = traj.velocity(w);
        let y = traj.point(tau2, w).scale(a);
        let eps_null = traj.xi * w * (log_a * S::lit(0.5)).exp() * eps;
        ads2_wightman_derivative(x, v, y, v.scale(a), eps_null)
    }
}
