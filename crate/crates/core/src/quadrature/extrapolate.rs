use num_complex::Complex;
use serde::Serialize;

use super::check_ladder;
use crate::error::Result;
use crate::scalar::Scalar;

/// Result of extrapolating a finite-regulator sequence to `eps -> 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtrapolationReport<S> {
    pub values_at_eps: Vec<(S, Complex<S>)>,
    pub extrapolated: Complex<S>,
    /// Difference between the two highest-order estimates in the last row of the table.
    pub residual: S,
}

/// Richardson (Neville) extrapolation to `eps = 0`, assuming an error
/// expansion `c1 eps + c2 eps^2 + ...`.
///
/// Row `i` of the table holds the estimates that use samples `0..=i`;
/// column `j` eliminates the first `j` powers of `eps`.
pub fn extrapolate_epsilon<S: Scalar>(
    samples: &[(S, Complex<S>)],
) -> Result<ExtrapolationReport<S>> {
    let eps: Vec<S> = samples.iter().map(|s| s.0).collect();
    check_ladder(&eps)?;
    let m = samples.len();
    let mut table: Vec<Vec<Complex<S>>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = Vec::with_capacity(i + 1);
        row.push(samples[i].1);
        for j in 1..=i {
            let prev = table[i - 1][j - 1];
            let cur = row[j - 1];
            let ratio = eps[i] / (eps[i - j] - eps[i]);
            row.push(cur + (cur - prev) * ratio);
        }
        table.push(row);
    }
    let last = &table[m - 1];
    let extrapolated = last[m - 1];
    let residual = (last[m - 1] - last[m - 2]).norm();
    Ok(ExtrapolationReport {
        values_at_eps: samples.to_vec(),
        extrapolated,
        residual,
    })
}
