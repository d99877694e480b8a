//! Complementary error function and trigamma.
//!
//! Below the crossover the positive-term series for `erf` is summed (no
//! alternating cancellation); above it the Laplace continued fraction for
//! `erfc` is evaluated with the modified Lentz algorithm.

use crate::scalar::Scalar;

const CROSSOVER: f64 = 2.0;
const MAX_TERMS: usize = 1000;

/// Complementary error function `erfc(x) = 1 - erf(x)`.
pub fn erfc<S: Scalar>(x: S) -> S {
    if x.is_nan() {
        return x;
    }
    if x < S::zero() {
        return S::lit(2.0) - erfc(-x);
    }
    if x < S::lit(CROSSOVER) {
        S::one() - erf_series(x)
    } else {
        (-x * x).exp() * erfc_fraction(x)
    }
}

/// Scaled complementary error function `exp(x^2) erfc(x)` for `x >= 0`.
pub fn erfcx<S: Scalar>(x: S) -> S {
    debug_assert!(x >= S::zero());
    if x < S::lit(CROSSOVER) {
        (x * x).exp() * (S::one() - erf_series(x))
    } else {
        erfc_fraction(x)
    }
}

/// erf(x) = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (2n+1)!!
fn erf_series<S: Scalar>(x: S) -> S {
    let two_x2 = S::lit(2.0) * x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..MAX_TERMS {
        term = term * two_x2 / S::from_usize(2 * n + 1).unwrap();
        sum = sum + term;
        if term <= sum * S::epsilon() {
            break;
        }
    }
    S::FRAC_2_SQRT_PI() * (-x * x).exp() * sum
}

/// 1 / (sqrt(pi) (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))))
fn erfc_fraction<S: Scalar>(x: S) -> S {
    let tiny = S::min_positive_value() / S::epsilon();
    let mut f = x;
    let mut c = f;
    let mut d = S::zero();
    for k in 1..MAX_TERMS {
        let a = S::from_usize(k).unwrap() * S::lit(0.5);
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - S::one()).abs() <= S::epsilon() {
            break;
        }
    }
    S::FRAC_2_SQRT_PI() * S::lit(0.5) / f
}

/// Trigamma `psi_1(x) = sum_{k >= 0} 1/(x + k)^2` for `x > 0`.
///
/// Shifts upward with `psi_1(x) = psi_1(x + 1) + 1/x^2`, then sums the
/// asymptotic series.
pub fn trigamma<S: Scalar>(x: S) -> S {
    debug_assert!(x > S::zero());
    let mut x = x;
    let mut acc = S::zero();
    while x < S::lit(20.0) {
        acc = acc + (x * x).recip();
        x = x + S::one();
    }
    // 1/x + 1/2x^2 + sum B_2k / x^{2k+1}
    const B: [f64; 6] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    let inv = x.recip();
    let inv2 = inv * inv;
    let mut tail = S::zero();
    for b in B.iter().rev() {
        tail = (tail + S::lit(*b)) * inv2;
    }
    acc + inv + inv2 * S::lit(0.5) + tail * inv
}
