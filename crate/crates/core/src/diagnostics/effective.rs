//! Effective velocity `h = u - (ln v)_x` and its relative entropy.

use super::stencil::{first_derivative, trapezoid};
use super::{check_state, DiagnosticsError, Placement};
use crate::profile::ShockProfile;
use crate::shift::WeightParams;
use crate::solver::{Grid, State};

/// `h` at every node, differentiating `ln v` with the solver's stencils.
pub fn effective_velocity(state: &State, grid: &Grid) -> Result<Vec<f64>, DiagnosticsError> {
    check_state(state, grid)?;
    let log_v: Vec<f64> = state.v.iter().map(|v| v.ln()).collect();
    let slope = first_derivative(&log_v, grid.dx());
    Ok(state.u.iter().zip(slope).map(|(u, s)| u - s).collect())
}

/// `∫ (|h - h̃|²/2 + Q(v | ṽ))` with `h̃ = ũ - ṽ'/ṽ` taken from the exact profile.
pub fn h_entropy(
    state: &State,
    grid: &Grid,
    profile: &ShockProfile,
    params: &WeightParams,
    at: Placement,
) -> Result<f64, DiagnosticsError> {
    let h = effective_velocity(state, grid)?;
    let law = params.end().law();
    let density = h.iter().enumerate().map(|(i, h)| {
        let p = profile.eval(params.zeta(grid.x(i), at.t, at.shift));
        let gap = h - (p.u - p.v_slope / p.v);
        0.5 * gap * gap + law.energy_excess(p.v, state.v[i] - p.v)
    });
    Ok(trapezoid(density, grid.dx()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::GasLaw;
    use crate::profile::{build_profile, solve_left_state_impermeable};
    use crate::solver::{make_initial_data, Perturbation, Problem};

    fn sampled(grid: &Grid, v: impl Fn(f64) -> f64, u: impl Fn(f64) -> f64) -> State {
        let n = grid.n_nodes();
        State {
            t: 0.0,
            v: (0..n).map(|i| v(grid.x(i))).collect(),
            u: (0..n).map(|i| u(grid.x(i))).collect(),
        }
    }

    #[test]
    fn test_constant_volume_leaves_velocity_unchanged() {
        let grid = Grid::new(5.0, 50).unwrap();
        let state = sampled(&grid, |_| 1.7, |x| x.sin());
        let h = effective_velocity(&state, &grid).unwrap();
        assert!(h.iter().zip(&state.u).all(|(h, u)| (h - u).abs() < 1e-14));
    }

    #[test]
    fn test_smooth_fields_converge_at_second_order() {
        let v = |x: f64| 1.0 + 0.3 * (x / 2.0).sin().powi(2);
        let u = |x: f64| (0.7 * x).cos();
        let exact = |x: f64| u(x) - 0.3 * (x / 2.0).sin() * (x / 2.0).cos() / v(x);
        let error = |cells: usize| {
            let grid = Grid::new(6.0, cells).unwrap();
            let h = effective_velocity(&sampled(&grid, v, u), &grid).unwrap();
            h.iter()
                .enumerate()
                .fold(0.0f64, |m, (i, h)| m.max((h - exact(grid.x(i))).abs()))
        };
        let (coarse, fine) = (error(60), error(120));
        assert!((coarse / fine).log2() > 1.9, "{coarse} {fine}");
    }

    #[test]
    fn test_unperturbed_profile_has_small_h_entropy() {
        let end = solve_left_state_impermeable(1.0, -0.1, &GasLaw::new(2.0).unwrap()).unwrap();
        let profile = build_profile(&end, 400.0, 20001).unwrap();
        let params = WeightParams::new(&end, 100.0).unwrap();
        let entropy = |dx: f64| {
            let grid = Grid::with_spacing(250.0, dx).unwrap();
            let problem = Problem::new(end, grid, 100.0).unwrap();
            let state = make_initial_data(&problem, &profile, &Perturbation::none())
                .unwrap()
                .state;
            h_entropy(
                &state,
                &grid,
                &profile,
                &params,
                Placement { t: 0.0, shift: 0.0 },
            )
            .unwrap()
        };
        // Only the difference error of (ln v)_x and the boundary tail remain.
        let (coarse, fine) = (entropy(0.2), entropy(0.1));
        assert!(coarse < 1e-6 && fine < coarse / 8.0, "{coarse} {fine}");
    }
}
