use serde::Serialize;

use super::{ProfileError, ShockProfile};

/// Tail samples closer to the end state than this fraction of the jump are fitted.
const TAIL_ONSET: f64 = 1e-3;
/// Gaps below this are too close to underflow to fit.
const TAIL_FLOOR: f64 = 1e-250;
const MIN_TAIL_SAMPLES: usize = 10;

/// Least-squares fit of `ln|ṽ - v±|` against `|ζ|` on one tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    /// Decay rate: minus the fitted slope.
    pub rate: f64,
    pub r_squared: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayReport {
    pub delta: f64,
    pub left: TailFit,
    pub right: TailFit,
}

impl DecayReport {
    pub fn is_exponential(&self, min_r_squared: f64) -> bool {
        [self.left, self.right]
            .iter()
            .all(|f| f.rate > 0.0 && f.r_squared >= min_r_squared)
    }
}

fn fit(points: &[(f64, f64)]) -> Result<TailFit, ProfileError> {
    let n = points.len();
    if n < MIN_TAIL_SAMPLES {
        return Err(ProfileError::InsufficientTail { found: n });
    }
    let nf = n as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x / nf, b + y / nf));
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(TailFit {
        rate: -slope,
        r_squared,
        samples: n,
    })
}

/// Fits the exponential decay of both tails of the tabulated profile.
pub fn check_tail_decay(profile: &ShockProfile) -> Result<DecayReport, ProfileError> {
    let end = profile.end();
    let jump = end.v_plus() - end.v_minus();
    let anchor = profile.anchor();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for k in 0..profile.len() {
        let (gap, lower) = profile.sample_gap(k);
        if !(gap < TAIL_ONSET * jump && gap > TAIL_FLOOR) {
            continue;
        }
        let point = ((profile.zeta(k) - anchor).abs(), gap.ln());
        if lower {
            left.push(point);
        } else {
            right.push(point);
        }
    }
    Ok(DecayReport {
        delta: end.delta(),
        left: fit(&left)?,
        right: fit(&right)?,
    })
}
