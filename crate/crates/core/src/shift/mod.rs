//! Weight function, contraction constants and the shift ODE.

mod io;

pub use io::write_shift_csv;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profile::{EndStates, ShockProfile};
use crate::solver::{Coupled, Grid, State};

/// Profile derivatives below this fraction of their peak are dropped from shift integrals.
pub const SHIFT_WINDOW_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShiftError {
    #[error("C* = {c_star} is not positive at strength delta = {delta}; the shock is too strong")]
    NonPositiveCStar { c_star: f64, delta: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Warnings for parameters outside the small-shock regime.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct WeightFlags {
    pub nonpositive_c_star: bool,
    /// `sup a = 1 + √δ` reaches `3/2`.
    pub weight_reaches_three_halves: bool,
}

impl WeightFlags {
    pub fn any(&self) -> bool {
        self.nonpositive_c_star || self.weight_reaches_three_halves
    }
}

/// Constants of the weighted relative-entropy estimate for one shock.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeightParams {
    #[serde(skip)]
    end: EndStates,
    pub delta: f64,
    pub beta: f64,
    /// Left sound speed `√(-p'(v_minus))`.
    pub sigma_l: f64,
    pub alpha_l: f64,
    /// Shift gain `M = (3/2) σ_l³ α_l`.
    pub big_m: f64,
    pub c_star: f64,
    /// Coefficient of the shock-localised good term in the leading-order estimate.
    pub c_one: f64,
    pub flags: WeightFlags,
}

impl WeightParams {
    /// Rejects shocks too strong for `C* > 0`.
    pub fn new(end: &EndStates, beta: f64) -> Result<Self, ShiftError> {
        let params = Self::new_unchecked(end, beta)?;
        if params.flags.nonpositive_c_star {
            return Err(ShiftError::NonPositiveCStar {
                c_star: params.c_star,
                delta: params.delta,
            });
        }
        Ok(params)
    }

    /// Same constants with violations reported in `flags` instead of rejected.
    pub fn new_unchecked(end: &EndStates, beta: f64) -> Result<Self, ShiftError> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(ShiftError::InvalidInput(format!(
                "beta must be positive, got {beta}"
            )));
        }
        let law = end.law();
        let gamma = law.gamma();
        let delta = end.delta();
        let p_minus = law.pressure_at(end.v_minus());
        let sigma_l = (-law.pressure_slope_at(end.v_minus())).sqrt();
        let alpha_l = (gamma + 1.0) / (2.0 * gamma * sigma_l * p_minus);
        let big_m = 1.5 * sigma_l.powi(3) * alpha_l;
        let c_star = 0.5 * (1.0 / sigma_l - delta.sqrt() * (gamma + 1.0) / (gamma * p_minus));
        let c_one = sigma_l.powi(3) * alpha_l / 8.0;
        let flags = WeightFlags {
            nonpositive_c_star: !(c_star > 0.0),
            weight_reaches_three_halves: delta.sqrt() >= 0.5,
        };
        Ok(Self {
            end: *end,
            delta,
            beta,
            sigma_l,
            alpha_l,
            big_m,
            c_star,
            c_one,
            flags,
        })
    }

    pub fn end(&self) -> &EndStates {
        &self.end
    }

    /// Speed of the profile in the computational frame.
    pub fn frame_speed(&self) -> f64 {
        self.end.frame_speed()
    }

    /// Profile argument `ζ = x - c t - X - β` at node `x`.
    #[inline]
    pub fn zeta(&self, x: f64, t: f64, shift: f64) -> f64 {
        x - self.frame_speed() * t - shift - self.beta
    }
}

/// `(a, a')` at `zeta`: `a = 1 + (u_minus - ũ)/√δ`, `a' = σ ṽ'/√δ`.
pub fn weight_eval(profile: &ShockProfile, params: &WeightParams, zeta: f64) -> (f64, f64) {
    let p = profile.eval(zeta);
    weight_from_point(params, p.gap_minus, p.v_slope)
}

#[inline]
pub(crate) fn weight_from_point(params: &WeightParams, gap_minus: f64, v_slope: f64) -> (f64, f64) {
    let scale = params.end.sigma() / params.delta.sqrt();
    (1.0 + scale * gap_minus, scale * v_slope)
}

/// Which perturbation the pressure-gradient integral of the shift ODE multiplies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftForm {
    /// `u - ũ`: the form for which `Ẋ = -(M/δ)(Y₁ + Y₂)` holds.
    #[default]
    Velocity,
    /// `v - ṽ`.
    Volume,
}

/// Index range `[lo, hi]` of grid nodes whose profile argument falls in `window`.
pub(crate) fn active_nodes(
    grid: &Grid,
    params: &WeightParams,
    window: (f64, f64),
    t: f64,
    shift: f64,
) -> Option<(usize, usize)> {
    let offset = params.frame_speed() * t + shift + params.beta;
    let (x_lo, x_hi) = (window.0 + offset, window.1 + offset);
    if x_hi < 0.0 || x_lo > grid.length() {
        return None;
    }
    let last = grid.n_cells();
    let i_lo = (x_lo / grid.dx()).floor().max(0.0) as usize;
    let i_hi = ((x_hi / grid.dx()).ceil() as usize).min(last);
    Some((i_lo.min(last), i_hi))
}

/// Right-hand side `Ẋ` of the shift ODE for the state at its own time.
pub fn shift_rhs(
    state: &State,
    grid: &Grid,
    profile: &ShockProfile,
    params: &WeightParams,
    shift: f64,
    form: ShiftForm,
) -> Result<f64, ShiftError> {
    if state.v.len() != grid.n_nodes() || state.u.len() != grid.n_nodes() {
        return Err(ShiftError::InvalidInput(format!(
            "state has {} nodes, grid has {}",
            state.v.len(),
            grid.n_nodes()
        )));
    }
    Ok(ShiftDynamics::new(grid, profile, params, form).rate(state, shift))
}

/// The shift ODE bound to a profile, ready to be co-integrated by the solver.
#[derive(Debug, Clone, Copy)]
pub struct ShiftDynamics<'a> {
    grid: &'a Grid,
    profile: &'a ShockProfile,
    params: &'a WeightParams,
    form: ShiftForm,
    /// Profile arguments outside which the integrand is dropped.
    window: (f64, f64),
}

impl<'a> ShiftDynamics<'a> {
    pub fn new(
        grid: &'a Grid,
        profile: &'a ShockProfile,
        params: &'a WeightParams,
        form: ShiftForm,
    ) -> Self {
        let window = profile.active_range(SHIFT_WINDOW_TOLERANCE);
        Self {
            grid,
            profile,
            params,
            form,
            window,
        }
    }

    pub fn form(&self) -> ShiftForm {
        self.form
    }
}

impl Coupled for ShiftDynamics<'_> {
    fn rate(&self, state: &State, shift: f64) -> f64 {
        let (grid, params) = (self.grid, self.params);
        let Some((lo, hi)) = active_nodes(grid, params, self.window, state.t, shift) else {
            return 0.0;
        };
        let end = params.end;
        let law = end.law();
        let sigma = end.sigma();
        let offset = params.frame_speed() * state.t + shift + params.beta;
        let scale = sigma / params.delta.sqrt();
        let last = grid.n_cells();
        let mut sum = 0.0;
        for i in lo..=hi {
            let (pv, pu, v_slope, gap_minus) = self.profile.eval_first_order(grid.x(i) - offset);
            let a = 1.0 + scale * gap_minus;
            // Direct differences are exactly zero on states sampled from the same profile point.
            let (z, w) = (state.v[i] - pv, state.u[i] - pu);
            let paired = match self.form {
                ShiftForm::Velocity => w,
                ShiftForm::Volume => z,
            };
            let integrand = a * v_slope * (-sigma * w + law.pressure_slope_at(pv) * paired / sigma);
            let weight = if i == 0 || i == last { 0.5 } else { 1.0 };
            sum += weight * integrand;
        }
        -(params.big_m / params.delta) * sum * grid.dx()
    }
}

/// No shift: the reference wave moves rigidly.
#[derive(Debug, Clone, Copy, Default)]
pub struct FrozenShift;

impl Coupled for FrozenShift {
    fn rate(&self, _: &State, _: f64) -> f64 {
        0.0
    }
}

/// One entry of the shift history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftSample {
    pub t: f64,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Xdot")]
    pub xdot: f64,
}

/// Shift value, its latest rate and the per-step history.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShiftState {
    pub t: f64,
    pub x: f64,
    pub xdot: f64,
    pub history: Vec<ShiftSample>,
}

impl ShiftState {
    /// `X(0) = 0`.
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets the rate at the current `(t, X)` and appends it to the history.
    pub fn record(&mut self, xdot: f64) {
        self.xdot = xdot;
        self.history.push(ShiftSample {
            t: self.t,
            x: self.x,
            xdot,
        });
    }

    /// Trapezoidal update matching the two stages of the field step.
    pub fn advance(&mut self, rate_start: f64, rate_predicted: f64, dt: f64) {
        self.x += 0.5 * dt * (rate_start + rate_predicted);
        self.t += dt;
    }
}

/// Change of variable `y = (u_minus - ũ)/δ` at time `t` and shift `X`.
#[derive(Debug, Clone, Copy)]
pub struct YMap<'a> {
    profile: &'a ShockProfile,
    params: &'a WeightParams,
    t: f64,
    shift: f64,
}

impl YMap<'_> {
    pub fn y(&self, x: f64) -> f64 {
        let p = self.profile.eval(self.params.zeta(x, self.t, self.shift));
        self.params.end.sigma() * p.gap_minus / self.params.delta
    }

    /// `y` at the boundary.
    pub fn y0(&self) -> f64 {
        self.y(0.0)
    }
}

/// The `y` map and its boundary value, which lies in `(0, 1)`.
pub fn y_coordinates<'a>(
    profile: &'a ShockProfile,
    params: &'a WeightParams,
    shift: f64,
    t: f64,
) -> (f64, YMap<'a>) {
    let map = YMap {
        profile,
        params,
        t,
        shift,
    };
    (map.y0(), map)
}
