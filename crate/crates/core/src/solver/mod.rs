//! Semi-discrete finite differences for the wall and inflow problems on `[0, L]`.
//!
//! Unknowns live at nodes `x_i = i dx`. Pressure and viscous flux use second-order
//! central differences (the flux `u_x / v` at half nodes), the inflow convection uses a
//! first-order upwind difference, and time stepping is Heun's two-stage method.

mod initial;
mod io;
mod kernel;
mod run;

pub use initial::{make_initial_data, Bump, InitialData, Perturbation};
pub use io::write_snapshot_csv;
pub use kernel::{cfl_dt, mass_budget_rate, semidiscrete_rhs, step, Tendency};
pub use run::{run, Coupled, Observer, RunFailure, RunRecord, SnapshotMark, StepView};

use serde::Serialize;
use thiserror::Error;

use crate::gas::GasLaw;
use crate::profile::{EndStates, ProblemKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("nonpositive specific volume {value} at node {node} (t = {t})")]
    Positivity { t: f64, node: usize, value: f64 },
}

/// Uniform grid on `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    length: f64,
    n_cells: usize,
    dx: f64,
}

impl Grid {
    pub fn new(length: f64, n_cells: usize) -> Result<Self, SolverError> {
        if !(length.is_finite() && length > 0.0) || n_cells < 3 {
            return Err(SolverError::InvalidInput(format!(
                "grid needs positive length and at least 3 cells, got L = {length}, n = {n_cells}"
            )));
        }
        Ok(Self {
            length,
            n_cells,
            dx: length / n_cells as f64,
        })
    }

    /// Grid whose spacing is as close to `dx` as an integer cell count allows.
    pub fn with_spacing(length: f64, dx: f64) -> Result<Self, SolverError> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(SolverError::InvalidInput(format!(
                "grid spacing must be positive, got {dx}"
            )));
        }
        Self::new(length, (length / dx).round().max(3.0) as usize)
    }

    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }
    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }
}

/// Nodal fields at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
}

impl State {
    /// First node with nonpositive (or non-finite) volume.
    pub fn positivity_violation(&self) -> Option<(usize, f64)> {
        self.v
            .iter()
            .position(|v| !(*v > 0.0 && v.is_finite()))
            .map(|i| (i, self.v[i]))
    }

    fn check_against(&self, grid: &Grid) -> Result<(), SolverError> {
        let n = grid.n_nodes();
        if self.v.len() != n || self.u.len() != n {
            return Err(SolverError::InvalidInput(format!(
                "state has {} / {} values for a grid with {n} nodes",
                self.v.len(),
                self.u.len()
            )));
        }
        match self.positivity_violation() {
            Some((node, value)) => Err(SolverError::Positivity {
                t: self.t,
                node,
                value,
            }),
            None => Ok(()),
        }
    }
}

/// A boundary problem on a truncated half-line.
#[derive(Debug, Clone, Copy)]
pub struct Problem {
    end: EndStates,
    grid: Grid,
    beta: f64,
}

impl Problem {
    pub fn new(end: EndStates, grid: Grid, beta: f64) -> Result<Self, SolverError> {
        match end.kind() {
            ProblemKind::Impermeable if end.u_minus() != 0.0 => {
                return Err(SolverError::InvalidInput(
                    "wall problem needs u_minus = 0".into(),
                ))
            }
            ProblemKind::Inflow if !(end.sigma_minus() < 0.0) => {
                return Err(SolverError::InvalidInput(
                    "inflow problem needs sigma_minus < 0".into(),
                ))
            }
            _ => {}
        }
        if !(beta > 0.0 && beta < grid.length()) {
            return Err(SolverError::InvalidInput(format!(
                "shift offset beta = {beta} must lie in (0, L = {})",
                grid.length()
            )));
        }
        Ok(Self { end, grid, beta })
    }

    pub fn kind(&self) -> ProblemKind {
        self.end.kind()
    }
    pub fn end(&self) -> &EndStates {
        &self.end
    }
    pub fn law(&self) -> &GasLaw {
        self.end.law()
    }
    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Writes the boundary data into `v`, `u`.
    #[inline]
    pub(crate) fn impose_boundaries(&self, v: &mut [f64], u: &mut [f64]) {
        let last = v.len() - 1;
        match self.kind() {
            ProblemKind::Impermeable => u[0] = 0.0,
            ProblemKind::Inflow => {
                v[0] = self.end.v_minus();
                u[0] = self.end.u_minus();
            }
        }
        v[last] = self.end.v_plus();
        u[last] = self.end.u_plus();
    }
}

/// Time-stepping controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub cfl: f64,
    pub t_end: f64,
    pub output_stride: usize,
}

impl SolverConfig {
    pub fn new(cfl: f64, t_end: f64, output_stride: usize) -> Result<Self, SolverError> {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(SolverError::InvalidInput(format!(
                "cfl must lie in (0, 1], got {cfl}"
            )));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(SolverError::InvalidInput(format!(
                "t_end must be finite and >= 0, got {t_end}"
            )));
        }
        if output_stride == 0 {
            return Err(SolverError::InvalidInput(
                "output stride must be at least 1".into(),
            ));
        }
        Ok(Self {
            cfl,
            t_end,
            output_stride,
        })
    }
}
