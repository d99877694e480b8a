//! Integration along the real axis with semicircular detours around real poles.

use num_complex::Complex;

use super::{gauss_kronrod::integrate_pieces, Estimate, QuadratureConfig};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Half-plane into which the contour is pushed around a pole.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetourSide {
    /// Below the axis: poles sit above the contour, i.e. `1/(u - p - i0)`.
    Lower,
    /// Above the axis: poles sit below the contour, i.e. `1/(u - p + i0)`.
    Upper,
}

impl DetourSide {
    fn sign<S: Scalar>(self) -> S {
        match self {
            DetourSide::Lower => -S::one(),
            DetourSide::Upper => S::one(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Detour<S> {
    pub center: S,
    pub radius: S,
}

enum Piece<S> {
    Segment { from: S, to: S },
    Arc { center: S, radius: S },
}

/// Integrate `f(z) dz` from `a` to `b` along the real axis, replacing
/// `[c - r, c + r]` by a half circle on `side` for every detour.
///
/// Detours must be sorted, disjoint and lie strictly inside `(a, b)`.
pub fn integrate_detoured<S, F>(
    f: F,
    a: S,
    b: S,
    detours: &[Detour<S>],
    side: DetourSide,
    cfg: &QuadratureConfig<S>,
) -> Result<Estimate<S>>
where
    S: Scalar,
    F: Fn(Complex<S>) -> Result<Complex<S>>,
{
    integrate_path(f, a, b, detours, &[], side, cfg)
}

/// As [`integrate_detoured`], additionally splitting the straight segments at
/// `breaks` (points covered by a detour are ignored).
pub(crate) fn integrate_path<S, F>(
    f: F,
    a: S,
    b: S,
    detours: &[Detour<S>],
    breaks: &[S],
    side: DetourSide,
    cfg: &QuadratureConfig<S>,
) -> Result<Estimate<S>>
where
    S: Scalar,
    F: Fn(Complex<S>) -> Result<Complex<S>>,
{
    if !(a < b) {
        return Err(Error::Input(format!("empty contour [{a}, {b}]")));
    }
    let mut pieces = Vec::with_capacity(2 * detours.len() + 1);
    let mut cursor = a;
    for d in detours {
        if !(d.radius > S::zero()) {
            return Err(Error::Config("detour radius must be positive".into()));
        }
        let start = d.center - d.radius;
        if !(start > cursor) {
            return Err(Error::Config(format!(
                "detour around {} (radius {}) overlaps the previous detour or the endpoint {}",
                d.center, d.radius, cursor
            )));
        }
        push_segment(&mut pieces, cursor, start, breaks);
        pieces.push(Piece::Arc {
            center: d.center,
            radius: d.radius,
        });
        cursor = d.center + d.radius;
    }
    if !(b > cursor) {
        return Err(Error::Config(format!(
            "detour ending at {cursor} reaches past the endpoint {b}"
        )));
    }
    push_segment(&mut pieces, cursor, b, breaks);

    let sign: S = side.sign();
    let ranges: Vec<(S, S)> = pieces
        .iter()
        .map(|p| match p {
            Piece::Segment { from, to } => (*from, *to),
            Piece::Arc { .. } => (S::zero(), S::PI()),
        })
        .collect();
    integrate_pieces(
        |k, t| match pieces[k] {
            Piece::Segment { .. } => f(Complex::new(t, S::zero())),
            Piece::Arc { center, radius } => {
                // z(theta) runs from c - r to c + r through c + i*sign*r
                let (s, c) = t.sin_cos();
                let z = Complex::new(center - radius * c, sign * radius * s);
                let dz = Complex::new(radius * s, sign * radius * c);
                Ok(f(z)? * dz)
            }
        },
        &ranges,
        cfg.abs_tol,
        cfg.rel_tol,
        cfg.max_subdivisions,
    )
}

fn push_segment<S: Scalar>(pieces: &mut Vec<Piece<S>>, from: S, to: S, breaks: &[S]) {
    let mut cursor = from;
    for &x in breaks {
        if x > cursor && x < to {
            pieces.push(Piece::Segment {
                from: cursor,
                to: x,
            });
            cursor = x;
        }
    }
    pieces.push(Piece::Segment { from: cursor, to });
}

/// Integrate across `[a, b]` around real poles with detours of radius
/// `cfg.detour_radius`. Every pole must lie strictly inside the interval and
/// detours may not overlap.
pub fn integrate_with_pole_detour<S, F>(
    f: F,
    a: S,
    b: S,
    poles: &[S],
    side: DetourSide,
    cfg: &QuadratureConfig<S>,
) -> Result<Estimate<S>>
where
    S: Scalar,
    F: Fn(Complex<S>) -> Complex<S>,
{
    let mut sorted = poles.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).expect("finite pole"));
    let r = cfg.detour_radius;
    let detours: Vec<Detour<S>> = sorted
        .iter()
        .map(|&center| Detour { center, radius: r })
        .collect();
    for p in &sorted {
        if !(*p > a && *p < b) {
            return Err(Error::Config(format!("pole {p} is not inside [{a}, {b}]")));
        }
    }
    integrate_detoured(|z| Ok(f(z)), a, b, &detours, side, cfg)
}

/// Integration window and detours for poles that may cluster or sit near the
/// ends of `[a, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DetourPlan<S> {
    pub a: S,
    pub b: S,
    pub detours: Vec<Detour<S>>,
}

/// Poles closer than `2 radius` share one enlarged detour. A cluster whose
/// detour would reach past an end of the window moves that end inward to
/// the edge of the detour; callers use this only where the integrand
/// carries negligible weight near the ends. Poles farther than `radius`
/// outside the window are ignored. Returns `None` if the window collapses.
pub fn plan_detours<S: Scalar>(poles: &[S], radius: S, a: S, b: S) -> Option<DetourPlan<S>> {
    let mut sorted: Vec<S> = poles.iter().copied().filter(|p| p.is_finite()).collect();
    sorted.sort_by(|x, y| x.partial_cmp(y).expect("finite pole"));
    let mut clusters: Vec<(S, S)> = Vec::new();
    for p in sorted {
        match clusters.last_mut() {
            Some((_, hi)) if p - *hi < S::lit(2.0) * radius => *hi = p,
            _ => clusters.push((p, p)),
        }
    }
    let margin = radius * S::lit(1e-3);
    let (mut lo_end, mut hi_end) = (a, b);
    let mut kept: Vec<Detour<S>> = Vec::new();
    for (lo, hi) in clusters {
        if hi <= a - radius || lo >= b + radius {
            continue;
        }
        let d = Detour {
            center: (lo + hi) * S::lit(0.5),
            radius: (hi - lo) * S::lit(0.5) + radius,
        };
        let left = d.center - d.radius;
        let right = d.center + d.radius;
        if left > a + margin && right < b - margin {
            kept.push(d);
        } else if d.center < (a + b) * S::lit(0.5) {
            lo_end = lo_end.max(right);
        } else {
            hi_end = hi_end.min(left);
        }
    }
    if !(lo_end < hi_end) {
        return None;
    }
    kept.retain(|d| d.center - d.radius > lo_end && d.center + d.radius < hi_end);
    Some(DetourPlan {
        a: lo_end,
        b: hi_end,
        detours: kept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg(radius: f64) -> QuadratureConfig<f64> {
        QuadratureConfig {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            detour_radius: radius,
            ..Default::default()
        }
    }

    #[test]
    fn half_residue_of_simple_pole() {
        let est = integrate_with_pole_detour(
            |z| z.inv(),
            -1.0,
            1.0,
            &[0.0],
            DetourSide::Lower,
            &cfg(0.1),
        )
        .unwrap();
        assert!(est.value.re.abs() < 1e-10);
        assert!((est.value.im - PI).abs() < 1e-8);
        let up = integrate_with_pole_detour(
            |z| z.inv(),
            -1.0,
            1.0,
            &[0.0],
            DetourSide::Upper,
            &cfg(0.1),
        )
        .unwrap();
        assert!((up.value.im + PI).abs() < 1e-8);
    }

    #[test]
    fn principal_value_of_even_partial_fractions() {
        // Brute-force principal value oracle: symmetric excision around both poles.
        let a = 0.5_f64;
        let g = |u: f64| 1.0 / (u * u - a * a);
        let oracle = {
            let c = cfg(0.1);
            let h = 1e-7;
            let pieces = [(-1.0, -a - h), (-a + h, a - h), (a + h, 1.0)];
            let mut total = 0.0;
            for (x0, x1) in pieces {
                total += super::super::integrate_1d(|u| Complex::new(g(u), 0.0), x0, x1, &c)
                    .unwrap()
                    .value
                    .re;
            }
            // the excised windows cost O(h)
            total
        };
        let closed = (1.0 / a) * ((1.0 - a) / (1.0 + a)).abs().ln();
        assert!((oracle - closed).abs() < 1e-6);
        assert!((closed + 2.197_224_577_336_219_4).abs() < 1e-12);

        let est = integrate_with_pole_detour(
            |z| (z * z - a * a).inv(),
            -1.0,
            1.0,
            &[-a, a],
            DetourSide::Lower,
            &cfg(0.1),
        )
        .unwrap();
        assert!((est.value.re - closed).abs() < 1e-9);
        assert!(est.value.im.abs() < 1e-9);
    }

    #[test]
    fn radius_independence() {
        let f = |z: Complex<f64>| (-(z * z) / 2.0).exp() / ((z - 0.3) * (z + 1.1) * (z + 1.1));
        let a =
            integrate_with_pole_detour(f, -4.0, 4.0, &[0.3, -1.1], DetourSide::Lower, &cfg(0.05))
                .unwrap();
        let b =
            integrate_with_pole_detour(f, -4.0, 4.0, &[0.3, -1.1], DetourSide::Lower, &cfg(0.1))
                .unwrap();
        assert!((a.value - b.value).norm() < 1e-8);
    }

    #[test]
    fn rejects_overlapping_detours() {
        let r = integrate_with_pole_detour(
            |z| z.inv(),
            -1.0,
            1.0,
            &[0.0, 0.15],
            DetourSide::Lower,
            &cfg(0.1),
        );
        assert!(matches!(r, Err(Error::Config(_))));
        let r = integrate_with_pole_detour(
            |z| z.inv(),
            -1.0,
            1.0,
            &[0.95],
            DetourSide::Lower,
            &cfg(0.1),
        );
        assert!(matches!(r, Err(Error::Config(_))));
        let r = integrate_with_pole_detour(
            |z| z.inv(),
            -1.0,
            1.0,
            &[2.0],
            DetourSide::Lower,
            &cfg(0.1),
        );
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn planner_merges_and_trims() {
        let plan = plan_detours(&[0.0_f64, 0.1, 3.0, 9.95, 11.0, -10.1], 0.2, -10.0, 10.0).unwrap();
        assert_eq!(plan.detours.len(), 2);
        assert!((plan.detours[0].center - 0.05).abs() < 1e-15);
        assert!((plan.detours[0].radius - 0.25).abs() < 1e-15);
        assert_eq!(plan.detours[1].center, 3.0);
        assert!((plan.a - -9.9).abs() < 1e-12);
        assert!((plan.b - 9.75).abs() < 1e-12);
    }

    #[test]
    fn breakpoints_do_not_change_the_value() {
        let f = |z: Complex<f64>| Ok((-(z * z)).exp() / (z - 0.4));
        let d = [Detour {
            center: 0.4,
            radius: 0.1,
        }];
        let c = cfg(0.1);
        let plain = integrate_detoured(f, -5.0, 5.0, &d, DetourSide::Upper, &c).unwrap();
        let split =
            integrate_path(f, -5.0, 5.0, &d, &[-2.5, 0.35, 2.5], DetourSide::Upper, &c).unwrap();
        assert!((plain.value - split.value).norm() < 1e-12);
    }
}
