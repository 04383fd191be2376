//! Size of the perturbation from the shifted wave, and of the shift.

use serde::Serialize;

use super::{check_state, DiagnosticsError};
use crate::profile::ShockProfile;
use crate::shift::{ShiftState, WeightParams};
use crate::solver::{Grid, State};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceMetrics {
    /// `max_x |(v - ṽ, u - ũ)|` with the Euclidean norm at each node.
    pub sup_perturbation: f64,
    pub xdot_abs: f64,
    /// `X/t`, once `t` exceeds the floor given to [`convergence_metrics`].
    pub x_over_t: Option<f64>,
    /// Same discrete `H¹` norm as the one reported for initial data.
    pub h1_perturbation: f64,
}

/// Metrics at `state` against the wave shifted by `shift.x`; `shift` must be at the state's time.
pub fn convergence_metrics(
    state: &State,
    grid: &Grid,
    profile: &ShockProfile,
    params: &WeightParams,
    shift: &ShiftState,
    t_floor: f64,
) -> Result<ConvergenceMetrics, DiagnosticsError> {
    check_state(state, grid)?;
    if shift.t != state.t {
        return Err(DiagnosticsError::InvalidInput(format!(
            "shift at t = {} but state at t = {}",
            shift.t, state.t
        )));
    }
    let n = grid.n_nodes();
    let dx = grid.dx();
    let (z, w): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|i| {
            let p = profile.eval(params.zeta(grid.x(i), state.t, shift.x));
            (state.v[i] - p.v, state.u[i] - p.u)
        })
        .unzip();
    let sup_perturbation = z
        .iter()
        .zip(&w)
        .fold(0.0f64, |m, (z, w)| m.max(z.hypot(*w)));
    let square = |f: &[f64]| {
        dx * (f.iter().map(|x| x * x).sum::<f64>() - 0.5 * (f[0] * f[0] + f[n - 1] * f[n - 1]))
    };
    let gradient = |f: &[f64]| f.windows(2).map(|p| (p[1] - p[0]).powi(2)).sum::<f64>() / dx;
    Ok(ConvergenceMetrics {
        sup_perturbation,
        xdot_abs: shift.xdot.abs(),
        x_over_t: (state.t > t_floor).then(|| shift.x / state.t),
        h1_perturbation: (square(&z) + square(&w) + gradient(&z) + gradient(&w)).sqrt(),
    })
}
