//! Consistency of the entropy identity: finite-difference `dE/dt` against the evaluated terms.

use serde::Serialize;

use super::{DiagnosticsError, TermBreakdown};

/// Smallest scale used to normalise the residual, so that an unperturbed state reads zero.
pub const IDENTITY_FLOOR: f64 = 1e-14;

/// Weighted entropy `E = ∫ a η` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropySample {
    pub t: f64,
    pub weighted_entropy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResidual {
    /// Difference quotient of `E`.
    pub entropy_rate: f64,
    /// `Ẋ Y + J^bad - J^good + P`.
    pub predicted_rate: f64,
    /// `|entropy_rate - predicted_rate|` over the largest term involved.
    pub normalised: f64,
}

/// Compares the rate of `E` with `centre`. `samples` are consecutive and contain the
/// centre time: three samples give the derivative of their quadratic interpolant at the
/// centre (centred or one-sided, second order either way), two give the one-sided quotient.
pub fn entropy_identity_residual(
    samples: &[EntropySample],
    centre: &TermBreakdown,
) -> Result<IdentityResidual, DiagnosticsError> {
    if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(DiagnosticsError::InvalidInput(
            "sample times must increase".into(),
        ));
    }
    let entropy_rate = match samples {
        [a, b] => (b.weighted_entropy - a.weighted_entropy) / (b.t - a.t),
        [_, _, _] => {
            // Σ e_k L_k'(τ) with L_k the Lagrange basis on the three sample times.
            let tau = centre.t;
            (0..3)
                .map(|k| {
                    let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                    let (tk, ti, tj) = (samples[k].t, samples[i].t, samples[j].t);
                    samples[k].weighted_entropy * ((tau - ti) + (tau - tj))
                        / ((tk - ti) * (tk - tj))
                })
                .sum()
        }
        _ => {
            return Err(DiagnosticsError::InvalidInput(format!(
                "need two or three entropy samples, got {}",
                samples.len()
            )))
        }
    };
    if !samples.iter().any(|s| s.t == centre.t) {
        return Err(DiagnosticsError::InvalidInput(format!(
            "no sample at the breakdown time {}",
            centre.t
        )));
    }
    let predicted_rate = centre.identity_rhs();
    let scale = [
        entropy_rate,
        centre.xdot * centre.y,
        centre.jbad_total(),
        centre.jgood_total(),
        centre.p(),
    ]
    .iter()
    .fold(IDENTITY_FLOOR, |m, x| m.max(x.abs()));
    Ok(IdentityResidual {
        entropy_rate,
        predicted_rate,
        normalised: (entropy_rate - predicted_rate).abs() / scale,
    })
}
