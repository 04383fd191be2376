//! Quantitative bounds relating volume gaps, pressure jumps and relative quantities.
//!
//! The constants in these bounds are existential. They are calibrated on a coarse sweep
//! ([`calibrate_constants`]) and then re-verified on a finer one ([`verify_constants`]).

use super::{GasError, GasLaw};

/// Relative slack added on top of the largest constant seen on the coarse sweep.
pub const CALIBRATION_MARGIN: f64 = 0.01;

/// Each bound is stored as `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Inequality {
    /// `|v - w|² ≤ C Q(v|w)` for `0 < w < 2v₊`, `0 < v < 3v₊`.
    VolumeByEnergy,
    /// `|v - w|² ≤ C p(v|w)` on the same region.
    VolumeByPressure,
    /// `|p(v) - p(w)| ≤ C |v - w|` for `v, w > v₊/2`.
    PressureLipschitz,
    /// `p(v|w) ≤ ((γ+1)/(2γ p(w)) + Cδ) |Δp|²` for small pressure jumps near `p(v₊)`.
    PressureByJump,
    /// `p(w)^{-1/γ-1}/(2γ) |Δp|² - (1+γ)/(3γ²) p(w)^{-1/γ-2} Δp³ ≤ Q(v|w)` on the same region.
    EnergyLowerByJump,
    /// `Q(v|w) ≤ (p(w)^{-1/γ-1}/(2γ) + Cδ) |Δp|²` on the same region.
    EnergyUpperByJump,
}

impl Inequality {
    pub const ALL: [Inequality; 6] = [
        Inequality::VolumeByEnergy,
        Inequality::VolumeByPressure,
        Inequality::PressureLipschitz,
        Inequality::PressureByJump,
        Inequality::EnergyLowerByJump,
        Inequality::EnergyUpperByJump,
    ];
}

/// Constants for the calibrated bounds.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BoundConstants {
    pub volume_energy: f64,
    pub volume_pressure: f64,
    pub lipschitz: f64,
    pub pressure_jump: f64,
    pub energy_jump: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub inequality: Inequality,
    pub lhs: f64,
    pub rhs: f64,
    pub hypothesis_met: bool,
    /// Smallest constant making the bound hold at this point, when the bound has one.
    pub required: Option<f64>,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + 1e-12 * self.rhs.abs().max(self.lhs.abs()) + 1e-300
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    /// True when every bound whose hypothesis is met holds.
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| !c.hypothesis_met || c.holds())
    }

    pub fn get(&self, which: Inequality) -> &BoundCheck {
        self.checks
            .iter()
            .find(|c| c.inequality == which)
            .expect("every inequality is reported")
    }
}

/// Rectangular sweep of `(v, w)` in units of `v₊`, plus the resolution used for the
/// pressure-jump region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepBox {
    pub v: (f64, f64),
    pub vbar: (f64, f64),
    pub n: usize,
}

impl Default for SweepBox {
    fn default() -> Self {
        Self {
            v: (0.3, 2.7),
            vbar: (0.3, 1.9),
            n: 100,
        }
    }
}

impl SweepBox {
    pub fn with_resolution(self, n: usize) -> Self {
        Self { n, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub inequality: Inequality,
    pub v: f64,
    pub vbar: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl GasLaw {
    /// Evaluates both sides of every bound at `(v, vbar)`.
    ///
    /// Points outside a bound's hypothesis are reported with `hypothesis_met = false`.
    pub fn bound_certificate(
        &self,
        v: f64,
        vbar: f64,
        v_plus: f64,
        delta: f64,
        constants: &BoundConstants,
    ) -> Result<BoundReport, GasError> {
        self.certificate_with(v, vbar, v_plus, delta, constants, Hypotheses::Open)
    }

    fn certificate_with(
        &self,
        v: f64,
        vbar: f64,
        v_plus: f64,
        delta: f64,
        constants: &BoundConstants,
        hypotheses: Hypotheses,
    ) -> Result<BoundReport, GasError> {
        for x in [v, vbar, v_plus] {
            if !(x.is_finite() && x > 0.0) {
                return Err(GasError::NonPositiveVolume(x));
            }
        }
        let g = self.gamma;
        let gap2 = (v - vbar).powi(2);
        let q_rel = self.energy_excess(vbar, v - vbar);
        let p_rel = self.pressure_excess(vbar, v - vbar);
        let jump = self.pressure_jump(vbar, v - vbar);
        let p_bar = self.pressure_at(vbar);

        let below = |a: f64, b: f64| match hypotheses {
            Hypotheses::Open => a < b,
            Hypotheses::Closed => a <= b,
        };
        let near_wall = below(vbar, 2.0 * v_plus) && below(v, 3.0 * v_plus);
        let away_from_vacuum = below(0.5 * v_plus, v) && below(0.5 * v_plus, vbar);
        let small_jumps = delta > 0.0
            && below(jump.abs(), delta)
            && below((p_bar - self.pressure_at(v_plus)).abs(), delta);

        let ratio = |num: f64, den: f64| (den > 0.0).then(|| num / den);
        // On the diagonal both sides vanish; the required constants are the limits there.
        let diagonal = v == vbar;
        let local = |limit: f64, num: f64, den: f64| {
            if diagonal {
                Some(limit)
            } else {
                ratio(num, den)
            }
        };
        let slope = -self.pressure_slope_at(vbar);
        let jump2 = jump * jump;
        let p_coef = (g + 1.0) / (2.0 * g * p_bar);
        let q_coef = p_bar.powf(-1.0 / g - 1.0) / (2.0 * g);
        let q_cubic = (1.0 + g) / (3.0 * g * g) * p_bar.powf(-1.0 / g - 2.0);
        let excess_const =
            |lhs: f64, coef: f64| (jump2 > 0.0).then(|| ((lhs / jump2 - coef) / delta).max(0.0));

        let checks = vec![
            BoundCheck {
                inequality: Inequality::VolumeByEnergy,
                lhs: gap2,
                rhs: constants.volume_energy * q_rel,
                hypothesis_met: near_wall,
                required: local(2.0 / slope, gap2, q_rel),
            },
            BoundCheck {
                inequality: Inequality::VolumeByPressure,
                lhs: gap2,
                rhs: constants.volume_pressure * p_rel,
                hypothesis_met: near_wall,
                required: local(2.0 / self.pressure_curvature_at(vbar), gap2, p_rel),
            },
            BoundCheck {
                inequality: Inequality::PressureLipschitz,
                lhs: jump.abs(),
                rhs: constants.lipschitz * (v - vbar).abs(),
                hypothesis_met: away_from_vacuum,
                required: local(slope, jump.abs(), (v - vbar).abs()),
            },
            BoundCheck {
                inequality: Inequality::PressureByJump,
                lhs: p_rel,
                rhs: (p_coef + constants.pressure_jump * delta) * jump2,
                hypothesis_met: small_jumps,
                required: excess_const(p_rel, p_coef),
            },
            BoundCheck {
                inequality: Inequality::EnergyLowerByJump,
                lhs: q_coef * jump2 - q_cubic * jump2 * jump,
                rhs: q_rel,
                hypothesis_met: small_jumps,
                required: None,
            },
            BoundCheck {
                inequality: Inequality::EnergyUpperByJump,
                lhs: q_rel,
                rhs: (q_coef + constants.energy_jump * delta) * jump2,
                hypothesis_met: small_jumps,
                required: excess_const(q_rel, q_coef),
            },
        ];
        Ok(BoundReport { checks })
    }

    /// Inverse pressure `p ↦ p^{-1/γ}`.
    fn volume_at_pressure(&self, p: f64) -> f64 {
        p.powf(-1.0 / self.gamma)
    }
}

/// Whether hypothesis boundaries count as inside (calibration takes suprema over closures).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Hypotheses {
    Open,
    Closed,
}

/// Sample points: the `(v, vbar)` box, the Lipschitz region from `v₊/2` up, then pairs
/// with small pressure jumps around `p(v₊)`.
fn sweep_points(
    law: &GasLaw,
    v_plus: f64,
    delta: f64,
    sweep: &SweepBox,
    hypotheses: Hypotheses,
) -> Vec<(f64, f64)> {
    let n = sweep.n.max(2);
    let lin =
        |(lo, hi): (f64, f64), i: usize| v_plus * (lo + (hi - lo) * i as f64 / (n - 1) as f64);
    let mut points = Vec::with_capacity(3 * n * n);
    for i in 0..n {
        for j in 0..n {
            points.push((lin(sweep.v, i), lin(sweep.vbar, j)));
        }
    }
    let lipschitz_lo = 0.5f64.max(sweep.v.0.max(sweep.vbar.0));
    for i in 0..n {
        for j in 0..n {
            points.push((
                lin((lipschitz_lo, sweep.v.1), i),
                lin((lipschitz_lo, sweep.vbar.1), j),
            ));
        }
    }
    // Closed sweeps reach the ends of (-1, 1); open sweeps use cell centres.
    let centred = |i: usize| match hypotheses {
        Hypotheses::Closed => 2.0 * i as f64 / (n - 1) as f64 - 1.0,
        Hypotheses::Open => 2.0 * (i as f64 + 0.5) / n as f64 - 1.0,
    };
    let p_plus = law.pressure_at(v_plus);
    for i in 0..n {
        let p_bar = p_plus + delta * centred(i);
        if p_bar <= 0.0 {
            continue;
        }
        for j in 0..n {
            let p = p_bar + delta * centred(j);
            if p <= 0.0 {
                continue;
            }
            points.push((law.volume_at_pressure(p), law.volume_at_pressure(p_bar)));
        }
    }
    points
}

/// Smallest constants (plus [`CALIBRATION_MARGIN`]) that make every bound hold on the sweep.
pub fn calibrate_constants(
    law: &GasLaw,
    v_plus: f64,
    delta: f64,
    sweep: &SweepBox,
) -> Result<BoundConstants, GasError> {
    let zero = BoundConstants {
        volume_energy: 0.0,
        volume_pressure: 0.0,
        lipschitz: 0.0,
        pressure_jump: 0.0,
        energy_jump: 0.0,
    };
    let mut best = zero;
    for (v, vbar) in sweep_points(law, v_plus, delta, sweep, Hypotheses::Closed) {
        let report = law.certificate_with(v, vbar, v_plus, delta, &zero, Hypotheses::Closed)?;
        for check in report.checks.iter().filter(|c| c.hypothesis_met) {
            let Some(req) = check.required else { continue };
            let slot = match check.inequality {
                Inequality::VolumeByEnergy => &mut best.volume_energy,
                Inequality::VolumeByPressure => &mut best.volume_pressure,
                Inequality::PressureLipschitz => &mut best.lipschitz,
                Inequality::PressureByJump => &mut best.pressure_jump,
                Inequality::EnergyUpperByJump => &mut best.energy_jump,
                Inequality::EnergyLowerByJump => continue,
            };
            *slot = slot.max(req);
        }
    }
    let widen = |c: f64| c * (1.0 + CALIBRATION_MARGIN);
    Ok(BoundConstants {
        volume_energy: widen(best.volume_energy),
        volume_pressure: widen(best.volume_pressure),
        lipschitz: widen(best.lipschitz),
        pressure_jump: widen(best.pressure_jump),
        energy_jump: widen(best.energy_jump),
    })
}

/// Every sweep point where a bound with met hypothesis fails.
pub fn verify_constants(
    law: &GasLaw,
    v_plus: f64,
    delta: f64,
    constants: &BoundConstants,
    sweep: &SweepBox,
) -> Result<Vec<Violation>, GasError> {
    let mut out = Vec::new();
    for (v, vbar) in sweep_points(law, v_plus, delta, sweep, Hypotheses::Open) {
        let report = law.bound_certificate(v, vbar, v_plus, delta, constants)?;
        out.extend(
            report
                .checks
                .iter()
                .filter(|c| c.hypothesis_met && !c.holds())
                .map(|c| Violation {
                    inequality: c.inequality,
                    v,
                    vbar,
                    lhs: c.lhs,
                    rhs: c.rhs,
                }),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law() -> GasLaw {
        GasLaw::new(2.0).unwrap()
    }

    #[test]
    fn test_diagonal_is_trivially_fine() {
        let c = calibrate_constants(&law(), 1.0, 0.05, &SweepBox::default().with_resolution(20))
            .unwrap();
        let r = law().bound_certificate(1.0, 1.0, 1.0, 0.05, &c).unwrap();
        assert!(r.holds());
        for check in &r.checks {
            assert_eq!(check.lhs, 0.0);
        }
    }

    #[test]
    fn test_coarse_calibration_survives_fine_sweep() {
        let g = law();
        let coarse = calibrate_constants(&g, 1.0, 0.05, &SweepBox::default()).unwrap();
        let fine = verify_constants(
            &g,
            1.0,
            0.05,
            &coarse,
            &SweepBox::default().with_resolution(257),
        )
        .unwrap();
        assert!(fine.is_empty(), "{:?}", &fine[..fine.len().min(5)]);
    }

    #[test]
    fn test_lipschitz_constant_covers_the_derivative_at_the_corner() {
        // sup |p'| on v ≥ v₊/2 is |p'(1/2)| = 16, reached only in the limit v, w → 1/2.
        let g = law();
        let c = calibrate_constants(&g, 1.0, 0.05, &SweepBox::default()).unwrap();
        assert!(c.lipschitz >= 16.0, "{}", c.lipschitz);
        for n in [150, 200, 300, 400] {
            let fine = verify_constants(&g, 1.0, 0.05, &c, &SweepBox::default().with_resolution(n))
                .unwrap();
            assert!(fine.is_empty(), "{n}: {:?}", &fine[..fine.len().min(3)]);
        }
    }

    #[test]
    fn test_volume_energy_constant_near_local_limit() {
        // As v → vbar the ratio tends to 2/(-p'(vbar)); on vbar ≤ 1.9 this is 2·1.9³/2.
        let c = calibrate_constants(&law(), 1.0, 0.05, &SweepBox::default()).unwrap();
        assert!(c.volume_energy >= 1.9f64.powi(3));
        assert!(c.volume_energy < 20.0);
    }

    #[test]
    fn test_outside_hypothesis_is_reported_not_failed() {
        let c = calibrate_constants(&law(), 1.0, 0.05, &SweepBox::default().with_resolution(10))
            .unwrap();
        let r = law().bound_certificate(5.0, 3.0, 1.0, 0.05, &c).unwrap();
        assert!(!r.get(Inequality::VolumeByEnergy).hypothesis_met);
        assert!(!r.get(Inequality::PressureByJump).hypothesis_met);
        assert!(r.holds());
    }

    #[test]
    fn test_rejects_nonpositive_volume() {
        let c = calibrate_constants(&law(), 1.0, 0.05, &SweepBox::default().with_resolution(4))
            .unwrap();
        assert!(law().bound_certificate(0.0, 1.0, 1.0, 0.05, &c).is_err());
    }
}
