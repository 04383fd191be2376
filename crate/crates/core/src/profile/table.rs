use serde::Serialize;

use super::ode::{integrate, Tolerance};
use super::{EndStates, ProfileError};

/// Largest admissible distance between the profile and its end states at `±half_width`.
pub const TAIL_TOLERANCE: f64 = 1e-12;
/// Largest admissible residual of the second-order travelling-wave system on the samples.
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;
const ODE_TOLERANCE: Tolerance = Tolerance {
    rel: 1e-12,
    abs: 1e-300,
};

/// Residual of the travelling-wave system, evaluated with fourth-order differences of the
/// samples (independent of the right-hand side used to build them).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    /// `max |-σ ṽ' - ũ'|`.
    pub continuity: f64,
    /// `max |-σ ũ' + p(ṽ)' - (ũ'/ṽ)'|`.
    pub momentum: f64,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.continuity.max(self.momentum)
    }
}

/// Profile values and derivatives at one point.
///
/// `gap_minus = ṽ - v_minus` and `gap_plus = v_plus - ṽ` keep full relative accuracy in
/// the tail nearest to them, long after `v` itself has rounded to the end state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub v: f64,
    pub u: f64,
    pub v_slope: f64,
    pub u_slope: f64,
    pub v_curv: f64,
    pub u_curv: f64,
    pub gap_minus: f64,
    pub gap_plus: f64,
}

/// Tabulated viscous 2-shock `(ṽ, ũ)(ζ)` with `ṽ(anchor) = (v_minus + v_plus)/2`.
///
/// Samples store the gap to the nearer end state. Between samples the gap is cubic
/// Hermite interpolated; beyond the table it continues along the linearised tail
/// `exp(∓λ± ζ)`, which underflows to the exact end state far out.
#[derive(Debug, Clone)]
pub struct ShockProfile {
    end: EndStates,
    anchor: f64,
    zeta_first: f64,
    spacing: f64,
    gap: Vec<f64>,
    slope: Vec<f64>,
    /// Last sample with `ζ ≤ anchor`; samples up to here store `ṽ - v_minus`.
    split: usize,
    left_rate: f64,
    right_rate: f64,
    residual: ResidualReport,
}

#[inline]
fn slope_from_lower(end: &EndStates, d: f64) -> f64 {
    let s = end.sigma;
    let v = end.v_minus + d;
    -(v / s) * (s * s * d + end.law.pressure_jump(end.v_minus, d))
}

#[inline]
fn slope_from_upper(end: &EndStates, e: f64) -> f64 {
    let s = end.sigma;
    let v = end.v_plus - e;
    -(v / s) * (-s * s * e + end.law.pressure_jump(end.v_plus, -e))
}

/// `ṽ'' = F'(ṽ) ṽ'` where `ṽ' = F(ṽ)`.
#[inline]
fn curvature(end: &EndStates, v: f64, slope: f64) -> f64 {
    let s = end.sigma;
    let f_prime = slope / v - (v / s) * (s * s + end.law.pressure_slope_at(v));
    f_prime * slope
}

/// Which end state a profile point is measured from, and the distance to it.
enum Gap {
    Lower(f64),
    Upper(f64),
}

#[inline]
fn hermite(y0: f64, m0: f64, y1: f64, m1: f64, h: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * m0
        + (3.0 * t2 - 2.0 * t3) * y1
        + (t3 - t2) * h * m1
}

/// Profile anchored at `ζ = 0`.
pub fn build_profile(
    end: &EndStates,
    half_width: f64,
    n: usize,
) -> Result<ShockProfile, ProfileError> {
    build_profile_anchored(end, 0.0, half_width, n)
}

/// Profile with `ṽ(anchor)` at the mid volume, sampled at `n` points on
/// `[anchor - half_width, anchor + half_width]`.
pub fn build_profile_anchored(
    end: &EndStates,
    anchor: f64,
    half_width: f64,
    n: usize,
) -> Result<ShockProfile, ProfileError> {
    if n < 64 {
        return Err(ProfileError::Precondition(format!(
            "need at least 64 samples, got {n}"
        )));
    }
    if !(half_width.is_finite() && half_width > 0.0 && anchor.is_finite()) {
        return Err(ProfileError::Precondition(format!(
            "half width must be positive and finite, got {half_width}"
        )));
    }
    let jump = end.v_plus - end.v_minus;
    if !(jump > 0.0 && end.delta > 0.0) {
        return Err(ProfileError::Degenerate);
    }
    let spacing = 2.0 * half_width / (n - 1) as f64;
    let offset = |k: usize| -half_width + k as f64 * spacing;
    let split = (0..n).rev().find(|&k| offset(k) <= 0.0).unwrap_or(0);

    let mut gap = vec![0.0; n];
    let mid = 0.5 * jump;
    let lower = |d: f64| slope_from_lower(end, d);
    let upper = |e: f64| -slope_from_upper(end, e);
    let inside = |g: f64| g > 0.0 && g < jump;

    let (mut y, mut at, mut h) = (mid, 0.0, spacing);
    for k in (0..=split).rev() {
        y = integrate(&lower, y, at, offset(k), &mut h, ODE_TOLERANCE).map_err(|_| {
            ProfileError::NumericalFailure {
                zeta: anchor + offset(k),
            }
        })?;
        if !inside(y) {
            return Err(ProfileError::NumericalFailure {
                zeta: anchor + offset(k),
            });
        }
        gap[k] = y;
        at = offset(k);
    }
    let (mut y, mut at, mut h) = (mid, 0.0, spacing);
    for (k, slot) in gap.iter_mut().enumerate().skip(split + 1) {
        y = integrate(&upper, y, at, offset(k), &mut h, ODE_TOLERANCE).map_err(|_| {
            ProfileError::NumericalFailure {
                zeta: anchor + offset(k),
            }
        })?;
        if !inside(y) {
            return Err(ProfileError::NumericalFailure {
                zeta: anchor + offset(k),
            });
        }
        *slot = y;
        at = offset(k);
    }

    let slope: Vec<f64> = gap
        .iter()
        .enumerate()
        .map(|(k, &g)| {
            if k <= split {
                slope_from_lower(end, g)
            } else {
                slope_from_upper(end, g)
            }
        })
        .collect();

    let tail = gap[0].max(gap[n - 1]);
    if tail > TAIL_TOLERANCE * end.v_plus.max(1.0) {
        return Err(ProfileError::WidenDomain {
            half_width,
            gap: tail,
        });
    }
    let increasing_left = gap[..=split].windows(2).all(|w| w[0] < w[1]);
    let decreasing_right = gap[split + 1..].windows(2).all(|w| w[0] > w[1]);
    let crossing = split + 1 >= n || end.v_minus + gap[split] < end.v_plus - gap[split + 1];
    if !(increasing_left && decreasing_right && crossing) {
        return Err(ProfileError::NumericalFailure { zeta: anchor });
    }

    let s = end.sigma;
    let law = end.law;
    let left_rate = -(end.v_minus / s) * (s * s + law.pressure_slope_at(end.v_minus));
    let right_rate = (end.v_plus / s) * (s * s + law.pressure_slope_at(end.v_plus));

    let mut profile = ShockProfile {
        end: *end,
        anchor,
        zeta_first: anchor - half_width,
        spacing,
        gap,
        slope,
        split,
        left_rate,
        right_rate,
        residual: ResidualReport {
            continuity: 0.0,
            momentum: 0.0,
        },
    };
    profile.residual = profile.sampled_residual();
    if !(profile.residual.max() <= RESIDUAL_TOLERANCE) {
        return Err(ProfileError::Residual {
            residual: profile.residual.max(),
        });
    }
    Ok(profile)
}

impl ShockProfile {
    pub fn end(&self) -> &EndStates {
        &self.end
    }
    pub fn anchor(&self) -> f64 {
        self.anchor
    }
    pub fn half_width(&self) -> f64 {
        0.5 * self.spacing * (self.gap.len() - 1) as f64
    }
    pub fn len(&self) -> usize {
        self.gap.len()
    }
    pub fn is_empty(&self) -> bool {
        self.gap.is_empty()
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    /// Exponential decay rates `(λ₋, λ₊)` of the linearised tails.
    pub fn tail_rates(&self) -> (f64, f64) {
        (self.left_rate, self.right_rate)
    }
    pub fn residual(&self) -> ResidualReport {
        self.residual
    }

    /// Sample location `ζ_k`.
    pub fn zeta(&self, k: usize) -> f64 {
        self.zeta_first + k as f64 * self.spacing
    }

    /// Gap to the nearer end state at sample `k`, and whether that end state is `v_minus`.
    pub fn sample_gap(&self, k: usize) -> (f64, bool) {
        (self.gap[k], k <= self.split)
    }

    /// `(ζ, ṽ, ũ)` at every sample.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.gap.len()).map(|k| {
            let p = self.point_at_sample(k);
            (self.zeta(k), p.v, p.u)
        })
    }

    fn point_at_sample(&self, k: usize) -> ProfilePoint {
        if k <= self.split {
            self.lower_point(self.gap[k])
        } else {
            self.upper_point(self.gap[k])
        }
    }

    #[inline]
    fn lower_point(&self, d: f64) -> ProfilePoint {
        let e = &self.end;
        let v = e.v_minus + d;
        let v_slope = slope_from_lower(e, d);
        let v_curv = curvature(e, v, v_slope);
        ProfilePoint {
            v,
            u: e.u_minus - e.sigma * d,
            v_slope,
            u_slope: -e.sigma * v_slope,
            v_curv,
            u_curv: -e.sigma * v_curv,
            gap_minus: d,
            gap_plus: (e.v_plus - e.v_minus) - d,
        }
    }

    #[inline]
    fn upper_point(&self, g: f64) -> ProfilePoint {
        let e = &self.end;
        let v = e.v_plus - g;
        let v_slope = slope_from_upper(e, g);
        let v_curv = curvature(e, v, v_slope);
        ProfilePoint {
            v,
            u: e.u_plus + e.sigma * g,
            v_slope,
            u_slope: -e.sigma * v_slope,
            v_curv,
            u_curv: -e.sigma * v_curv,
            gap_minus: (e.v_plus - e.v_minus) - g,
            gap_plus: g,
        }
    }

    /// Gap to the nearer end state at `zeta`.
    #[inline]
    fn locate(&self, zeta: f64) -> Gap {
        let last = self.gap.len() - 1;
        let r = (zeta - self.zeta_first) / self.spacing;
        if !(r >= 0.0) {
            return Gap::Lower(self.gap[0] * (self.left_rate * (zeta - self.zeta_first)).exp());
        }
        if r >= last as f64 {
            let d = zeta - self.zeta(last);
            return Gap::Upper(self.gap[last] * (-self.right_rate * d).exp());
        }
        let k = (r as usize).min(last - 1);
        let t = r - k as f64;
        let h = self.spacing;
        if k < self.split {
            Gap::Lower(hermite(
                self.gap[k],
                self.slope[k],
                self.gap[k + 1],
                self.slope[k + 1],
                h,
                t,
            ))
        } else if k > self.split {
            Gap::Upper(hermite(
                self.gap[k],
                -self.slope[k],
                self.gap[k + 1],
                -self.slope[k + 1],
                h,
                t,
            ))
        } else {
            let e = &self.end;
            let v0 = e.v_minus + self.gap[k];
            let v1 = e.v_plus - self.gap[k + 1];
            let v = hermite(v0, self.slope[k], v1, self.slope[k + 1], h, t);
            if v - e.v_minus <= e.v_plus - v {
                Gap::Lower(v - e.v_minus)
            } else {
                Gap::Upper(e.v_plus - v)
            }
        }
    }

    /// Profile values and exact derivatives at `zeta`.
    #[inline]
    pub fn eval(&self, zeta: f64) -> ProfilePoint {
        match self.locate(zeta) {
            Gap::Lower(d) => self.lower_point(d),
            Gap::Upper(g) => self.upper_point(g),
        }
    }

    /// `(ṽ, ũ, ṽ', ṽ - v_minus)` at `zeta`; agrees with [`ShockProfile::eval`] but skips
    /// the curvature.
    #[inline]
    pub(crate) fn eval_first_order(&self, zeta: f64) -> (f64, f64, f64, f64) {
        let e = &self.end;
        match self.locate(zeta) {
            Gap::Lower(d) => (
                e.v_minus + d,
                e.u_minus - e.sigma * d,
                slope_from_lower(e, d),
                d,
            ),
            Gap::Upper(g) => (
                e.v_plus - g,
                e.u_plus + e.sigma * g,
                slope_from_upper(e, g),
                (e.v_plus - e.v_minus) - g,
            ),
        }
    }

    /// Interval outside which `ṽ' < rel_tol · max ṽ'`, extended along the tails if needed.
    pub fn active_range(&self, rel_tol: f64) -> (f64, f64) {
        let cut = rel_tol * self.slope.iter().fold(0.0f64, |m, &s| m.max(s));
        let last = self.slope.len() - 1;
        let lo = match self.slope.iter().position(|&s| s > cut) {
            Some(0) => self.zeta_first - (self.slope[0] / cut).ln() / self.left_rate,
            Some(k) => self.zeta(k - 1),
            None => self.anchor,
        };
        let hi = match self.slope.iter().rposition(|&s| s > cut) {
            Some(k) if k == last => {
                self.zeta(last) + (self.slope[last] / cut).ln() / self.right_rate
            }
            Some(k) => self.zeta(k + 1),
            None => self.anchor,
        };
        (lo, hi)
    }

    /// Residual of the second-order system with derivatives differenced from the samples.
    fn sampled_residual(&self) -> ResidualReport {
        let n = self.gap.len();
        let h = self.spacing;
        let s = self.end.sigma;
        let law = self.end.law;
        let pts: Vec<ProfilePoint> = (0..n).map(|k| self.point_at_sample(k)).collect();
        let d1 = |f: &dyn Fn(usize) -> f64, k: usize| {
            (-f(k + 2) + 8.0 * f(k + 1) - 8.0 * f(k - 1) + f(k - 2)) / (12.0 * h)
        };
        let d2 = |f: &dyn Fn(usize) -> f64, k: usize| {
            (-f(k + 2) + 16.0 * f(k + 1) - 30.0 * f(k) + 16.0 * f(k - 1) - f(k - 2))
                / (12.0 * h * h)
        };
        let v = |k: usize| pts[k].v;
        let u = |k: usize| pts[k].u;
        let p = |k: usize| law.pressure_at(pts[k].v);
        let mut report = ResidualReport {
            continuity: 0.0,
            momentum: 0.0,
        };
        for k in 2..n.saturating_sub(2) {
            let (v1, u1, u2) = (d1(&v, k), d1(&u, k), d2(&u, k));
            let vk = v(k);
            let continuity = -s * v1 - u1;
            let momentum = -s * u1 + d1(&p, k) - (u2 * vk - u1 * v1) / (vk * vk);
            report.continuity = report.continuity.max(continuity.abs());
            report.momentum = report.momentum.max(momentum.abs());
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::GasLaw;
    use crate::profile::{shock_curve_inflow, solve_left_state_impermeable};
    use proptest::prelude::*;

    fn wall(u_plus: f64) -> EndStates {
        solve_left_state_impermeable(1.0, u_plus, &GasLaw::new(2.0).unwrap()).unwrap()
    }

    fn preset_profile() -> ShockProfile {
        let end = wall(-0.1);
        build_profile(&end, 600.0, 24001).unwrap()
    }

    #[test]
    fn test_anchor_and_far_field() {
        let prof = preset_profile();
        let e = prof.end();
        let mid = 0.5 * (e.v_minus() + e.v_plus());
        assert!((prof.eval(0.0).v - mid).abs() < 1e-15);
        for z in [-1e6, 1e6] {
            let p = prof.eval(z);
            let (v, u) = if z < 0.0 {
                (e.v_minus(), e.u_minus())
            } else {
                (e.v_plus(), e.u_plus())
            };
            assert_eq!((p.v, p.u), (v, u));
            assert_eq!((p.v_slope, p.u_slope, p.u_curv), (0.0, 0.0, 0.0));
        }
        assert!(prof.eval(-600.0).gap_minus <= 1e-10);
        assert!(prof.eval(600.0).gap_plus <= 1e-10);
    }

    #[test]
    fn test_residual_small() {
        let prof = preset_profile();
        assert!(prof.residual().max() < 1e-9, "{:?}", prof.residual());
    }

    #[test]
    fn test_derivatives_match_differences() {
        let prof = preset_profile();
        let h = 1e-3;
        // Difference the near-side gap so round-off stays relative.
        let signed_gap = |z: f64| {
            let p = prof.eval(z);
            if z < 0.0 {
                p.gap_minus
            } else {
                -p.gap_plus
            }
        };
        for z in [-30.0, -3.0, -0.5, 0.7, 12.0, 40.0] {
            let p = prof.eval(z);
            let fd = (signed_gap(z + h) - signed_gap(z - h)) / (2.0 * h);
            assert!(
                (fd - p.v_slope).abs() < 1e-8 * p.v_slope.abs(),
                "z={z} fd={fd} ex={}",
                p.v_slope
            );
            let fd2 = (prof.eval(z + h).v_slope - prof.eval(z - h).v_slope) / (2.0 * h);
            assert!((fd2 - p.v_curv).abs() < 1e-6 * p.v_slope.abs(), "z={z}");
        }
    }

    #[test]
    fn test_tail_gap_keeps_relative_accuracy() {
        let prof = preset_profile();
        let (rate, _) = prof.tail_rates();
        let a = prof.eval(-500.0).gap_minus;
        let b = prof.eval(-550.0).gap_minus;
        assert!(a < 1e-20 && b > 0.0);
        assert!(((a / b).ln() / 50.0 - rate).abs() < 1e-6 * rate);
        let c = prof.eval(-2000.0).gap_minus;
        assert!(c > 0.0 && c < b);
    }

    #[test]
    fn test_translation_equivariance() {
        let end = wall(-0.1);
        let base = build_profile(&end, 600.0, 24001).unwrap();
        let shifted = build_profile_anchored(&end, 3.3, 600.0, 24001).unwrap();
        for z in [-40.0, -7.1, 0.0, 2.2, 19.0] {
            assert!((base.eval(z).v - shifted.eval(z + 3.3).v).abs() < 1e-10);
        }
    }

    #[test]
    fn test_active_range_brackets_the_transition() {
        let prof = preset_profile();
        let (lo, hi) = prof.active_range(1e-16);
        let peak = prof.eval(0.0).v_slope;
        assert!(lo < -100.0 && hi > 100.0);
        for (z, inside) in [
            (lo - 1.0, false),
            (lo + 1.0, true),
            (hi - 1.0, true),
            (hi + 1.0, false),
        ] {
            assert_eq!(prof.eval(z).v_slope > 1e-16 * peak, inside, "z={z}");
        }
        let (far_lo, far_hi) = prof.active_range(1e-40);
        assert!(far_lo < -600.0 && far_hi > 600.0);
        assert!(prof.eval(far_lo + 1.0).v_slope > 1e-40 * peak);
    }

    #[test]
    fn test_narrow_domain_rejected() {
        let end = wall(-0.1);
        assert!(matches!(
            build_profile(&end, 20.0, 801),
            Err(ProfileError::WidenDomain { .. })
        ));
    }

    #[test]
    fn test_too_few_samples_rejected() {
        assert!(matches!(
            build_profile(&wall(-0.1), 600.0, 10),
            Err(ProfileError::Precondition(_))
        ));
    }

    #[test]
    fn test_inflow_profile_builds() {
        let law = GasLaw::new(2.0).unwrap();
        let end = shock_curve_inflow(1.0, 0.1, 1.05, &law).unwrap();
        let prof = build_profile(&end, 60.0 / end.delta(), 8001).unwrap();
        assert!(prof.eval(-5.0).u > prof.eval(5.0).u);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn prop_linear_relation_and_monotone(z in -80.0f64..80.0, dz in 1e-3f64..5.0) {
            let prof = preset_profile_cached();
            let e = prof.end();
            let a = prof.eval(z);
            let b = prof.eval(z + dz);
            prop_assert!(b.v > a.v && b.u < a.u);
            prop_assert!((a.u - (e.u_minus() - e.sigma() * (a.v - e.v_minus()))).abs() < 1e-12);
            prop_assert!((a.u_slope + e.sigma() * a.v_slope).abs() <= 1e-12 * a.v_slope.abs());
            prop_assert!(a.v > e.v_minus() && a.v < e.v_plus());
        }
    }

    fn preset_profile_cached() -> &'static ShockProfile {
        static CELL: std::sync::OnceLock<ShockProfile> = std::sync::OnceLock::new();
        CELL.get_or_init(preset_profile)
    }
}
