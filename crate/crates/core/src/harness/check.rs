//! Property suites that need no time stepping.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::HarnessError;
use crate::diagnostics::poincare_gap;
use crate::gas::{calibrate_constants, verify_constants, BoundConstants, GasLaw, SweepBox};
use crate::profile::{
    build_profile, check_tail_decay, solve_left_state_impermeable, RESIDUAL_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoincareSuite {
    pub trials: usize,
    pub violations: usize,
    /// `(lhs, rhs)` for `f(y) = y` on `[0, 1]`.
    pub linear: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSuite {
    pub constants: BoundConstants,
    pub violations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSuite {
    pub residual: f64,
    pub monotone: bool,
    /// `max |ũ - u_minus + σ (ṽ - v_minus)|` over the samples.
    pub linear_relation_error: f64,
    pub tail_r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub poincare: PoincareSuite,
    pub bounds: BoundSuite,
    pub profile: ProfileSuite,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        let p = &self.poincare;
        let f = &self.profile;
        p.violations == 0
            && (p.linear.0 - p.linear.1).abs() <= 1e-10
            && self.bounds.violations == 0
            && f.residual <= RESIDUAL_TOLERANCE
            && f.monotone
            && f.linear_relation_error <= 1e-10
            && f.tail_r_squared >= 0.999
    }
}

/// Random piecewise-linear functions on random subintervals of `[0, 10]`.
pub fn poincare_suite(trials: usize, seed: u64) -> Result<PoincareSuite, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    for _ in 0..trials {
        let c = rng.gen_range(0.0..9.0);
        let d = rng.gen_range(c + 0.01..10.0);
        let n = rng.gen_range(2..60);
        let mut y: Vec<f64> = (0..n - 2).map(|_| rng.gen_range(c..d)).collect();
        y.push(c);
        y.push(d);
        y.sort_by(f64::total_cmp);
        y.dedup();
        let amplitude = 10f64.powf(rng.gen_range(-3.0..3.0));
        let f: Vec<f64> = y
            .iter()
            .map(|_| amplitude * rng.gen_range(-1.0..1.0))
            .collect();
        let p = poincare_gap(&y, &f)?;
        if p.lhs > p.rhs + 1e-12 * p.lhs.abs().max(p.rhs.abs()) {
            violations += 1;
        }
    }
    let unit: Vec<f64> = (0..=16).map(|k| k as f64 / 16.0).collect();
    let linear = poincare_gap(&unit, &unit)?;
    Ok(PoincareSuite {
        trials,
        violations,
        linear: (linear.lhs, linear.rhs),
    })
}

/// Poincaré, relative-quantity bounds and profile fidelity at the weak-shock preset values.
pub fn run_checks(seed: u64) -> Result<CheckReport, HarnessError> {
    let poincare = poincare_suite(1000, seed)?;

    let law = GasLaw::new(2.0)?;
    let delta = 0.05;
    let constants = calibrate_constants(&law, 1.0, delta, &SweepBox::default())?;
    let fine = SweepBox::default().with_resolution(200);
    let violations = verify_constants(&law, 1.0, delta, &constants, &fine)?.len();

    let end = solve_left_state_impermeable(1.0, -0.1, &law)?;
    let profile = build_profile(&end, 400.0, 40001)?;
    let samples: Vec<(f64, f64, f64)> = profile.samples().collect();
    let monotone = samples
        .windows(2)
        .all(|w| w[1].1 >= w[0].1 && w[1].2 <= w[0].2);
    let linear_relation_error = samples
        .iter()
        .map(|&(_, v, u)| (u - end.u_minus() + end.sigma() * (v - end.v_minus())).abs())
        .fold(0.0, f64::max);
    let decay = check_tail_decay(&profile)?;
    Ok(CheckReport {
        poincare,
        bounds: BoundSuite {
            constants,
            violations,
        },
        profile: ProfileSuite {
            residual: profile.residual().max(),
            monotone,
            linear_relation_error,
            tail_r_squared: decay.left.r_squared.min(decay.right.r_squared),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_poincare_suite_finds_no_violations() {
        let s = poincare_suite(200, 1).unwrap();
        assert_eq!(s.violations, 0);
        assert!((s.linear.0 - 1.0 / 12.0).abs() < 1e-15 && (s.linear.1 - 1.0 / 12.0).abs() < 1e-15);
    }
}
