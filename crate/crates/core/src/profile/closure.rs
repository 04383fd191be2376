use super::{EndStates, ProblemKind, ProfileError};
use crate::gas::{GasError, GasLaw};

/// Bisection on a sign change of `f` over `[lo, hi]` until the bracket stops shrinking.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Left state of the wall problem: `u_minus = 0` and `v_minus` from the closed jump relation.
///
/// With `r = v_minus/v_plus` the relation reads `(r^{-γ} - 1)(1 - r) = u_plus² v_plus^{γ-1}`,
/// whose left side decreases strictly on `(0, 1)`.
pub fn solve_left_state_impermeable(
    v_plus: f64,
    u_plus: f64,
    law: &GasLaw,
) -> Result<EndStates, ProfileError> {
    if !(v_plus.is_finite() && v_plus > 0.0) {
        return Err(GasError::NonPositiveVolume(v_plus).into());
    }
    if u_plus == 0.0 {
        return Err(ProfileError::Degenerate);
    }
    if !(u_plus < 0.0) {
        return Err(ProfileError::EntropyViolation(format!(
            "the wall problem needs u_plus < 0 for an outgoing 2-shock, got {u_plus}"
        )));
    }
    let g = law.gamma();
    let target = u_plus * u_plus * v_plus.powf(g - 1.0);
    let lhs = |r: f64| (-g * r.ln()).exp_m1() * (1.0 - r) - target;
    let r = bisect(f64::MIN_POSITIVE.sqrt(), 1.0, lhs);
    if !(r > 0.0 && r < 1.0) || lhs(r).abs() > 1e-9 * target.max(1.0) {
        return Err(ProfileError::Infeasible(format!(
            "no root of the wall closure in (0, v_plus) for u_plus = {u_plus}"
        )));
    }
    let v_minus = r * v_plus;
    let dv = v_plus - v_minus;
    let sigma = -u_plus / dv;
    Ok(EndStates {
        kind: ProblemKind::Impermeable,
        law: *law,
        gamma: g,
        v_minus,
        v_plus,
        u_minus: 0.0,
        u_plus,
        sigma,
        sigma_minus: 0.0,
        delta: -u_plus,
    })
}

/// Whether `(v, u)` lies below the Lagrangian sound speed: `|u| < v √(-p'(v))`.
pub fn is_subsonic(v: f64, u: f64, law: &GasLaw) -> Result<bool, GasError> {
    law.pressure(v)?;
    Ok(u.abs() < v * law.sound_speed_at(v))
}

/// End states of the inflow problem on the 2-shock curve through `(v_minus, u_minus)`.
pub fn shock_curve_inflow(
    v_minus: f64,
    u_minus: f64,
    v_plus: f64,
    law: &GasLaw,
) -> Result<EndStates, ProfileError> {
    law.pressure(v_plus)?;
    if !is_subsonic(v_minus, u_minus, law)? {
        return Err(ProfileError::Precondition(format!(
            "boundary state (v, u) = ({v_minus}, {u_minus}) is not subsonic"
        )));
    }
    if !(u_minus > 0.0) {
        return Err(ProfileError::Precondition(format!(
            "inflow requires u_minus > 0, got {u_minus}"
        )));
    }
    if !(v_plus > v_minus) {
        return Err(ProfileError::Precondition(format!(
            "inflow 2-shock requires v_plus > v_minus, got {v_plus} <= {v_minus}"
        )));
    }
    let dv = v_plus - v_minus;
    let sigma = (-law.pressure_jump(v_minus, dv) / dv).sqrt();
    let u_plus = u_minus - sigma * dv;
    Ok(EndStates {
        kind: ProblemKind::Inflow,
        law: *law,
        gamma: law.gamma(),
        v_minus,
        v_plus,
        u_minus,
        u_plus,
        sigma,
        sigma_minus: -u_minus / v_minus,
        delta: u_minus - u_plus,
    })
}

/// Inflow end states whose strength `u_minus - u_plus` equals `delta`.
pub fn inflow_for_strength(
    v_minus: f64,
    u_minus: f64,
    delta: f64,
    law: &GasLaw,
) -> Result<EndStates, ProfileError> {
    if delta == 0.0 {
        return Err(ProfileError::Degenerate);
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(ProfileError::Precondition(format!(
            "shock strength must be positive, got {delta}"
        )));
    }
    law.pressure(v_minus)?;
    // Strength sqrt(-Δp Δv) increases strictly with v_plus.
    let strength = |v_plus: f64| {
        let dv = v_plus - v_minus;
        (-law.pressure_jump(v_minus, dv) * dv).sqrt()
    };
    let mut hi = 2.0 * v_minus;
    while strength(hi) < delta {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(ProfileError::Infeasible(format!(
                "no inflow shock of strength {delta}"
            )));
        }
    }
    let v_plus = bisect(v_minus, hi, |vp| strength(vp) - delta);
    shock_curve_inflow(v_minus, u_minus, v_plus, law)
}
