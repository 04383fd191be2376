//! End states, Rankine–Hugoniot closures and the viscous 2-shock profile.

mod closure;
mod decay;
mod io;
mod ode;
mod table;

pub use closure::{
    inflow_for_strength, is_subsonic, shock_curve_inflow, solve_left_state_impermeable,
};
pub use decay::{check_tail_decay, DecayReport, TailFit};
pub use io::{read_profile_csv, write_profile_csv, ProfileSample};
pub use table::{
    build_profile, build_profile_anchored, ProfilePoint, ResidualReport, ShockProfile,
    RESIDUAL_TOLERANCE, TAIL_TOLERANCE,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gas::{GasError, GasLaw};

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error(transparent)]
    Gas(#[from] GasError),
    #[error("zero-strength shock: u_plus = u_minus gives no shock")]
    Degenerate,
    #[error("entropy condition violated: {0}")]
    EntropyViolation(String),
    #[error("no admissible state: {0}")]
    Infeasible(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("profile integration left the state interval at zeta = {zeta}")]
    NumericalFailure { zeta: f64 },
    #[error("tails not converged at half width {half_width}: gap {gap:e} exceeds tolerance; widen the domain")]
    WidenDomain { half_width: f64, gap: f64 },
    #[error("profile residual {residual:e} exceeds tolerance")]
    Residual { residual: f64 },
    #[error("tail has only {found} usable samples")]
    InsufficientTail { found: usize },
    #[error("profile csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("profile csv: {0}")]
    Io(#[from] std::io::Error),
}

/// Which half-line problem the end states belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    /// Wall at `x = 0` with `u(t, 0) = 0`.
    Impermeable,
    /// Prescribed inflow state at the boundary, which moves with speed `σ_- < 0`.
    Inflow,
}

/// Far-field states of a 2-shock together with its speed and strength.
///
/// Invariants: `v_minus < v_plus`, `u_minus > u_plus`, `σ > 0`, and both jump
/// conditions hold to round-off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndStates {
    kind: ProblemKind,
    #[serde(skip)]
    law: GasLaw,
    gamma: f64,
    v_minus: f64,
    v_plus: f64,
    u_minus: f64,
    u_plus: f64,
    sigma: f64,
    sigma_minus: f64,
    delta: f64,
}

impl EndStates {
    pub fn kind(&self) -> ProblemKind {
        self.kind
    }
    pub fn law(&self) -> &GasLaw {
        &self.law
    }
    pub fn v_minus(&self) -> f64 {
        self.v_minus
    }
    pub fn v_plus(&self) -> f64 {
        self.v_plus
    }
    pub fn u_minus(&self) -> f64 {
        self.u_minus
    }
    pub fn u_plus(&self) -> f64 {
        self.u_plus
    }
    /// Shock speed in the Lagrangian frame.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    /// Boundary speed: zero for the wall, `-u_minus/v_minus` for inflow.
    pub fn sigma_minus(&self) -> f64 {
        self.sigma_minus
    }
    /// Shock strength `|u_plus - u_minus|`.
    pub fn delta(&self) -> f64 {
        self.delta
    }
    /// Speed of the shock relative to the computational coordinate.
    pub fn frame_speed(&self) -> f64 {
        self.sigma - self.sigma_minus
    }

    /// Residuals of the two jump conditions (mass, momentum).
    pub fn jump_residuals(&self) -> [f64; 2] {
        let dv = self.v_plus - self.v_minus;
        let du = self.u_plus - self.u_minus;
        let dp = self.law.pressure_jump(self.v_minus, dv);
        [-self.sigma * dv - du, -self.sigma * du + dp]
    }

    /// Residual of the squared-speed relation `σ² = -(p₊ - p₋)/(v₊ - v₋)`.
    pub fn speed_residual(&self) -> f64 {
        let dv = self.v_plus - self.v_minus;
        self.sigma * self.sigma + self.law.pressure_jump(self.v_minus, dv) / dv
    }
}
