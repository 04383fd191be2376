//! Exact evaluation of the weighted Poincaré inequality for piecewise-linear functions.

use serde::Serialize;

use super::DiagnosticsError;

/// Both sides of `∫ (f - f̄)² ≤ ½ ∫ (y - c)(d - y) |f'|²` on `[c, d]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoincarePair {
    pub lhs: f64,
    pub rhs: f64,
}

impl PoincarePair {
    /// `rhs - lhs`; never negative up to rounding.
    pub fn gap(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Integrates the interpolant of `f` through the strictly increasing nodes `y` exactly.
/// The interval is `[y[0], y[last]]` and `f̄` is the mean over it.
pub fn poincare_gap(y: &[f64], f: &[f64]) -> Result<PoincarePair, DiagnosticsError> {
    if y.len() != f.len() || y.len() < 2 {
        return Err(DiagnosticsError::InvalidInput(format!(
            "need matching node and value arrays of length at least 2, got {} and {}",
            y.len(),
            f.len()
        )));
    }
    if y.iter().chain(f).any(|x| !x.is_finite()) {
        return Err(DiagnosticsError::InvalidInput("non-finite sample".into()));
    }
    if let Some(k) = y.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(DiagnosticsError::InvalidInput(format!(
            "nodes must increase strictly, but y[{}] = {} follows {}",
            k + 1,
            y[k + 1],
            y[k]
        )));
    }
    let (c, d) = (y[0], y[y.len() - 1]);
    let length = d - c;
    let cells = || y.windows(2).zip(f.windows(2));
    let mean = cells()
        .map(|(yy, ff)| 0.5 * (yy[1] - yy[0]) * (ff[0] + ff[1]))
        .sum::<f64>()
        / length;
    let lhs = cells()
        .map(|(yy, ff)| {
            let (g0, g1) = (ff[0] - mean, ff[1] - mean);
            (yy[1] - yy[0]) * (g0 * g0 + g0 * g1 + g1 * g1) / 3.0
        })
        .sum();
    // Antiderivative of s (L - s) in s = y - c.
    let moment = |s: f64| length * s * s / 2.0 - s * s * s / 3.0;
    let rhs = 0.5
        * cells()
            .map(|(yy, ff)| {
                let slope = (ff[1] - ff[0]) / (yy[1] - yy[0]);
                slope * slope * (moment(yy[1] - c) - moment(yy[0] - c))
            })
            .sum::<f64>();
    Ok(PoincarePair { lhs, rhs })
}
