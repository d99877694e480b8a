//! Globally adaptive 10/21-point Gauss-Kronrod integration of complex-valued integrands.

use num_complex::Complex;

use super::Estimate;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

// Kronrod abscissae; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_745_820_711,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Clone, Copy, Debug)]
struct Panel<S> {
    piece: usize,
    a: S,
    b: S,
    value: Complex<S>,
    error: S,
    res_abs: S,
}

fn rule<S, G>(g: &G, piece: usize, a: S, b: S) -> Result<Panel<S>>
where
    S: Scalar,
    G: Fn(usize, S) -> Result<Complex<S>>,
{
    let center = (a + b) * S::lit(0.5);
    let half = (b - a) * S::lit(0.5);
    let fc = g(piece, center)?;
    let mut res_k = fc * S::lit(WGK[10]);
    let mut res_g = Complex::new(S::zero(), S::zero());
    let mut res_abs = fc.norm() * S::lit(WGK[10]);
    let mut values = [(
        Complex::new(S::zero(), S::zero()),
        Complex::new(S::zero(), S::zero()),
    ); 10];
    for (j, slot) in values.iter_mut().enumerate() {
        let dx = half * S::lit(XGK[j]);
        let f1 = g(piece, center - dx)?;
        let f2 = g(piece, center + dx)?;
        let wk = S::lit(WGK[j]);
        res_k = res_k + (f1 + f2) * wk;
        res_abs = res_abs + (f1.norm() + f2.norm()) * wk;
        if j % 2 == 1 {
            res_g = res_g + (f1 + f2) * S::lit(WG[j / 2]);
        }
        *slot = (f1, f2);
    }
    let mean = res_k * S::lit(0.5);
    let mut res_asc = (fc - mean).norm() * S::lit(WGK[10]);
    for (j, (f1, f2)) in values.iter().enumerate() {
        res_asc = res_asc + ((*f1 - mean).norm() + (*f2 - mean).norm()) * S::lit(WGK[j]);
    }
    let scale = half.abs();
    let value = res_k * half;
    res_abs = res_abs * scale;
    res_asc = res_asc * scale;
    let mut error = ((res_k - res_g) * half).norm();
    if res_asc != S::zero() && error != S::zero() {
        let ratio = (S::lit(200.0) * error / res_asc).powf(S::lit(1.5));
        error = res_asc * ratio.min(S::one());
    }
    let floor = S::lit(50.0) * S::epsilon() * res_abs;
    if res_abs > S::min_positive_value() / (S::lit(50.0) * S::epsilon()) && floor > error {
        error = floor;
    }
    Ok(Panel {
        piece,
        a,
        b,
        value,
        error,
        res_abs,
    })
}

/// Adaptive integration over a union of parameter intervals ("pieces").
///
/// `g(piece, t)` is the integrand on piece `piece` at parameter `t`. Each
/// piece starts as one panel; the panel with the largest error estimate is
/// bisected until the summed error meets `max(abs_tol, rel_tol |I|)`, or
/// until it reaches the rounding floor `100 eps int |f|` below which
/// bisection cannot make progress. Ties are broken by panel order, so the
/// result is deterministic.
pub(crate) fn integrate_pieces<S, G>(
    g: G,
    pieces: &[(S, S)],
    abs_tol: S,
    rel_tol: S,
    max_subdivisions: usize,
) -> Result<Estimate<S>>
where
    S: Scalar,
    G: Fn(usize, S) -> Result<Complex<S>>,
{
    let mut panels = Vec::with_capacity(pieces.len() + 16);
    for (k, &(a, b)) in pieces.iter().enumerate() {
        if a != b {
            panels.push(rule(&g, k, a, b)?);
        }
    }
    let mut evaluations = 21 * panels.len();
    loop {
        let mut total = Complex::new(S::zero(), S::zero());
        let mut error = S::zero();
        let mut magnitude = S::zero();
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            total = total + p.value;
            error = error + p.error;
            magnitude = magnitude + p.res_abs;
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let tol = abs_tol
            .max(rel_tol * total.norm())
            .max(S::lit(100.0) * S::epsilon() * magnitude);
        if error <= tol || panels.is_empty() {
            return Ok(Estimate {
                value: total,
                error,
                evaluations,
            });
        }
        let fail = || Error::Convergence {
            re: total.re.as_f64(),
            im: total.im.as_f64(),
            error: error.as_f64(),
            subdivisions: panels.len(),
        };
        if panels.len() >= max_subdivisions || !error.is_finite() {
            return Err(fail());
        }
        let Panel { piece, a, b, .. } = panels[worst];
        let mid = (a + b) * S::lit(0.5);
        if !(mid > a.min(b) && mid < a.max(b)) {
            return Err(fail());
        }
        panels[worst] = rule(&g, piece, a, mid)?;
        panels.insert(worst + 1, rule(&g, piece, mid, b)?);
        evaluations += 42;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials() {
        // 21-point Kronrod integrates degree 31 exactly
        let g = |_: usize, x: f64| Ok(Complex::new(x.powi(30), x.powi(7)));
        let p = rule(&g, 0, -1.0, 1.0).unwrap();
        assert!((p.value.re - 2.0 / 31.0).abs() < 1e-15);
        assert!(p.value.im.abs() < 1e-16);
    }

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-14);
        assert!((g - 2.0).abs() < 1e-14);
    }
}
