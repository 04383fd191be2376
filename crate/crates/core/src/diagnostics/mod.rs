//! Functionals of the weighted relative-entropy method evaluated on solver states.
//!
//! Every integral is a trapezoid sum on the solver grid. Derivatives of the numerical
//! solution reuse the solver's difference stencils; derivatives of the reference wave come
//! from the exact profile evaluator.

mod effective;
mod identity;
mod io;
mod metrics;
mod poincare;
mod recorder;
mod stencil;

pub use effective::{effective_velocity, h_entropy};
pub use identity::{entropy_identity_residual, EntropySample, IdentityResidual, IDENTITY_FLOOR};
pub use io::{write_diagnostics_csv, DIAGNOSTICS_COLUMNS};
pub use metrics::{convergence_metrics, ConvergenceMetrics};
pub use poincare::{poincare_gap, PoincarePair};
pub use recorder::{DiagnosticsRecorder, DiagnosticsRow};

use serde::Serialize;
use thiserror::Error;

use crate::profile::ShockProfile;
use crate::shift::WeightParams;
use crate::solver::{Grid, State};
use stencil::{first_derivative, first_derivative_at_start, second_derivative, trapezoid};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagnosticsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("nonpositive specific volume {value} at node {node}")]
    Positivity { node: usize, value: f64 },
}

/// Where the reference wave sits: time and shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub t: f64,
    pub shift: f64,
}

/// Reference wave, weight and perturbation sampled on the grid nodes.
struct Sampled {
    weight: Vec<f64>,
    weight_slope: Vec<f64>,
    ref_v: Vec<f64>,
    ref_v_slope: Vec<f64>,
    ref_u_slope: Vec<f64>,
    /// `v - ṽ`.
    z: Vec<f64>,
    /// `u - ũ`.
    w: Vec<f64>,
    /// `p(v) - p(ṽ)`.
    dp: Vec<f64>,
    /// `p(v | ṽ)`.
    p_rel: Vec<f64>,
    /// `Q(v | ṽ)`.
    q_rel: Vec<f64>,
}

fn check_state(state: &State, grid: &Grid) -> Result<(), DiagnosticsError> {
    let n = grid.n_nodes();
    if state.v.len() != n || state.u.len() != n {
        return Err(DiagnosticsError::InvalidInput(format!(
            "state has {} / {} values for a grid with {n} nodes",
            state.v.len(),
            state.u.len()
        )));
    }
    match state.positivity_violation() {
        Some((node, value)) => Err(DiagnosticsError::Positivity { node, value }),
        None => Ok(()),
    }
}

impl Sampled {
    fn new(
        state: &State,
        grid: &Grid,
        profile: &ShockProfile,
        params: &WeightParams,
        at: Placement,
        nodes: usize,
    ) -> Self {
        let end = params.end();
        let law = end.law();
        let scale = end.sigma() / params.delta.sqrt();
        let mut s = Sampled {
            weight: Vec::with_capacity(nodes),
            weight_slope: Vec::with_capacity(nodes),
            ref_v: Vec::with_capacity(nodes),
            ref_v_slope: Vec::with_capacity(nodes),
            ref_u_slope: Vec::with_capacity(nodes),
            z: Vec::with_capacity(nodes),
            w: Vec::with_capacity(nodes),
            dp: Vec::with_capacity(nodes),
            p_rel: Vec::with_capacity(nodes),
            q_rel: Vec::with_capacity(nodes),
        };
        for i in 0..nodes {
            let p = profile.eval(params.zeta(grid.x(i), at.t, at.shift));
            let z = state.v[i] - p.v;
            s.weight.push(1.0 + scale * p.gap_minus);
            s.weight_slope.push(scale * p.v_slope);
            s.ref_v.push(p.v);
            s.ref_v_slope.push(p.v_slope);
            s.ref_u_slope.push(p.u_slope);
            s.z.push(z);
            s.w.push(state.u[i] - p.u);
            s.dp.push(law.pressure_jump(p.v, z));
            s.p_rel.push(law.pressure_excess(p.v, z));
            s.q_rel.push(law.energy_excess(p.v, z));
        }
        s
    }
}

/// Pointwise `η(U | Ũ) = (u - ũ)²/2 + Q(v | ṽ)` against the shifted wave.
pub fn relative_entropy_field(
    state: &State,
    grid: &Grid,
    profile: &ShockProfile,
    params: &WeightParams,
    at: Placement,
) -> Result<Vec<f64>, DiagnosticsError> {
    check_state(state, grid)?;
    let s = Sampled::new(state, grid, profile, params, at, grid.n_nodes());
    Ok(s.w
        .iter()
        .zip(&s.q_rel)
        .map(|(w, q)| 0.5 * w * w + q)
        .collect())
}

/// `∫ a η(U | Ũ)`.
pub fn weighted_entropy(
    state: &State,
    grid: &Grid,
    profile: &ShockProfile,
    params: &WeightParams,
    at: Placement,
) -> Result<f64, DiagnosticsError> {
    check_state(state, grid)?;
    let s = Sampled::new(state, grid, profile, params, at, grid.n_nodes());
    let dens = (0..s.w.len()).map(|i| s.weight[i] * (0.5 * s.w[i] * s.w[i] + s.q_rel[i]));
    Ok(trapezoid(dens, grid.dx()))
}

/// The boundary term of the entropy identity, split into its five point values.
///
/// With `z = v - ṽ`, `w = u - ũ` at `x = 0`: `a w Δp`, `-a σ_- w²/2`, `-a σ_- Q(v|ṽ)`,
/// `-(a/v) w w_x` and `(a/(v ṽ)) w z ũ_x`. The convective pair vanishes for the wall, where
/// `w(0) = -ũ(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct BoundaryTerms {
    pub parts: [f64; 5],
}

impl BoundaryTerms {
    pub fn total(&self) -> f64 {
        self.parts.iter().sum()
    }
}

fn boundary_from(s: &Sampled, state: &State, params: &WeightParams, dx: f64) -> BoundaryTerms {
    let sigma_minus = params.end().sigma_minus();
    let a = s.weight[0];
    let (w, z, v) = (s.w[0], s.z[0], state.v[0]);
    let w_x = first_derivative_at_start(&s.w, dx);
    BoundaryTerms {
        parts: [
            a * w * s.dp[0],
            -a * sigma_minus * 0.5 * w * w,
            -a * sigma_minus * s.q_rel[0],
            -(a / v) * w * w_x,
            a / (v * s.ref_v[0]) * w * z * s.ref_u_slope[0],
        ],
    }
}

/// Boundary term `P` alone; needs only the first three nodes.
pub fn boundary_terms(
    state: &State,
    grid: &Grid,
    profile: &ShockProfile,
    params: &WeightParams,
    at: Placement,
) -> Result<BoundaryTerms, DiagnosticsError> {
    check_state(state, grid)?;
    let s = Sampled::new(state, grid, profile, params, at, 3);
    Ok(boundary_from(&s, state, params, grid.dx()))
}

/// Every integral of the weighted entropy identity and of its bad/good splitting.
///
/// Index `k` of each array holds the `(k+1)`-th term in the usual order: `jbad` is
/// `[a_x Δp w, -a ũ_x p(v|ṽ), -a_x w w_x / v, a_x w z ũ_x/(vṽ), a w_x z ũ_x/(vṽ)]`,
/// `jgood` is `[σ/2 a_x w², σ a_x Q(v|ṽ), (a/v) w_x²]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermBreakdown {
    pub t: f64,
    pub xdot: f64,
    pub weighted_entropy: f64,
    pub y: f64,
    pub jbad: [f64; 5],
    pub jgood: [f64; 3],
    pub boundary: BoundaryTerms,
    /// `B₁..B₆`; the generic constants of `B₅`, `B₆` are set to one.
    pub b: [f64; 6],
    /// `C* ∫ a_x (Δp - w/(2C*))²`.
    pub g1: f64,
    /// `σ/2 ∫ a_x w²`.
    pub g2: f64,
    /// `∫ (a/v) w_x²`.
    pub d_visc: f64,
    /// `∫ |ũ_x| w²`.
    pub gs: f64,
    /// `∫ |(Δp)_x|²`.
    pub dv1: f64,
    /// `∫ w_x²`.
    pub du1: f64,
    /// `∫ w_xx²`.
    pub du2: f64,
    pub y_parts: [f64; 6],
}

impl TermBreakdown {
    pub fn p(&self) -> f64 {
        self.boundary.total()
    }

    pub fn jbad_total(&self) -> f64 {
        self.jbad.iter().sum()
    }

    pub fn jgood_total(&self) -> f64 {
        self.jgood.iter().sum()
    }

    /// `Ẋ Y + J^bad - J^good + P`, the predicted rate of the weighted entropy.
    pub fn identity_rhs(&self) -> f64 {
        self.xdot * self.y + self.jbad_total() - self.jgood_total() + self.p()
    }
}

/// All terms at one state. `xdot` is the shift rate at this state.
pub fn term_breakdown(
    state: &State,
    grid: &Grid,
    profile: &ShockProfile,
    params: &WeightParams,
    at: Placement,
    xdot: f64,
) -> Result<TermBreakdown, DiagnosticsError> {
    check_state(state, grid)?;
    let n = grid.n_nodes();
    let dx = grid.dx();
    let end = params.end();
    let law = end.law();
    let sigma = end.sigma();
    let (delta, c_star) = (params.delta, params.c_star);
    let s = Sampled::new(state, grid, profile, params, at, n);
    let w_x = first_derivative(&s.w, dx);
    let w_xx = second_derivative(&s.w, dx);
    let dp_x = first_derivative(&s.dp, dx);
    let v = &state.v;
    let integral = |f: &dyn Fn(usize) -> f64| trapezoid((0..n).map(f), dx);

    let (a, a_x) = (&s.weight, &s.weight_slope);
    let (z, w, dp) = (&s.z, &s.w, &s.dp);
    let (tv, tv_x, tu_x) = (&s.ref_v, &s.ref_v_slope, &s.ref_u_slope);
    let coupling = |i: usize| z[i] * tu_x[i] / (v[i] * tv[i]);
    let p_slope = |i: usize| law.pressure_slope_at(tv[i]);

    let weighted_entropy = integral(&|i| a[i] * (0.5 * w[i] * w[i] + s.q_rel[i]));
    let a_x_eta = integral(&|i| a_x[i] * (0.5 * w[i] * w[i] + s.q_rel[i]));
    let y1 = integral(&|i| a[i] * tu_x[i] * w[i]);
    let volume_part = integral(&|i| a[i] * p_slope(i) * tv_x[i] * z[i]);
    let y = -a_x_eta + y1 - volume_part;

    let jbad = [
        integral(&|i| a_x[i] * dp[i] * w[i]),
        -integral(&|i| a[i] * tu_x[i] * s.p_rel[i]),
        -integral(&|i| a_x[i] * w[i] / v[i] * w_x[i]),
        integral(&|i| a_x[i] * w[i] * coupling(i)),
        integral(&|i| a[i] * w_x[i] * coupling(i)),
    ];
    let a_x_w2 = integral(&|i| a_x[i] * w[i] * w[i]);
    let a_x_q = integral(&|i| a_x[i] * s.q_rel[i]);
    let d_visc = integral(&|i| a[i] / v[i] * w_x[i] * w_x[i]);
    let jgood = [0.5 * sigma * a_x_w2, sigma * a_x_q, d_visc];

    let a_x_dp2 = integral(&|i| a_x[i] * dp[i] * dp[i]);
    let b = [
        a_x_w2 / (4.0 * c_star),
        jbad[2],
        jbad[3],
        jbad[4],
        delta * a_x_dp2,
        integral(&|i| a_x[i] * dp[i].abs().powi(3)),
    ];
    let g1 = c_star * integral(&|i| a_x[i] * (dp[i] - w[i] / (2.0 * c_star)).powi(2));
    let g2 = 0.5 * sigma * a_x_w2;

    let two_c = 2.0 * c_star;
    let y_parts = [
        y1,
        integral(&|i| a[i] * p_slope(i) * tv_x[i] * w[i]) / sigma,
        -0.5 * integral(&|i| a_x[i] * (w[i] - two_c * dp[i]) * (w[i] + two_c * dp[i])),
        -2.0 * c_star * c_star * a_x_dp2 - a_x_q,
        -integral(&|i| a[i] * p_slope(i) * tv_x[i] * (z[i] + two_c / sigma * dp[i])),
        integral(&|i| a[i] * p_slope(i) * tv_x[i] * (two_c / sigma) * (dp[i] - w[i] / two_c)),
    ];

    Ok(TermBreakdown {
        t: at.t,
        xdot,
        weighted_entropy,
        y,
        jbad,
        jgood,
        boundary: boundary_from(&s, state, params, dx),
        b,
        g1,
        g2,
        d_visc,
        gs: integral(&|i| tu_x[i].abs() * w[i] * w[i]),
        dv1: integral(&|i| dp_x[i] * dp_x[i]),
        du1: integral(&|i| w_x[i] * w_x[i]),
        du2: integral(&|i| w_xx[i] * w_xx[i]),
        y_parts,
    })
}

/// Leading-order remainder `R₁ = -δ/(2M) Ẋ² + B₁ - G₂ - (3/4) D` and the margin
/// `-C₁ G^S - R₁`, nonnegative when the sharp estimate holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct R1Check {
    pub r1: f64,
    pub margin: f64,
}

pub fn r1_margin(breakdown: &TermBreakdown, params: &WeightParams) -> R1Check {
    let b = breakdown;
    let r1 =
        -params.delta / (2.0 * params.big_m) * b.xdot * b.xdot + b.b[0] - b.g2 - 0.75 * b.d_visc;
    R1Check {
        r1,
        margin: -params.c_one * b.gs - r1,
    }
}
