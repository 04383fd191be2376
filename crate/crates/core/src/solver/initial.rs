use serde::{Deserialize, Serialize};

use super::{Problem, SolverError, State};
use crate::profile::ShockProfile;

/// Smooth compactly supported bump `exp(1 - 1/(1 - r²))`, `r = (x - center)/half_width`,
/// scaled separately for the two fields. Its peak value is the amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
    #[serde(default)]
    pub amplitude_v: f64,
    #[serde(default)]
    pub amplitude_u: f64,
}

impl Bump {
    /// Unit-height shape and its derivative at `x`.
    pub fn shape(&self, x: f64) -> (f64, f64) {
        let r = (x - self.center) / self.half_width;
        let q = 1.0 - r * r;
        if q <= 0.0 {
            return (0.0, 0.0);
        }
        let f = (1.0 - 1.0 / q).exp();
        (f, f * (-2.0 * r / (q * q)) / self.half_width)
    }

    fn validate(&self, length: f64) -> Result<(), SolverError> {
        let finite = [
            self.center,
            self.half_width,
            self.amplitude_v,
            self.amplitude_u,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite || !(self.half_width > 0.0) {
            return Err(SolverError::InvalidInput(format!(
                "malformed bump {self:?}"
            )));
        }
        if self.center - self.half_width < 0.0 || self.center + self.half_width > length {
            return Err(SolverError::InvalidInput(format!(
                "bump support [{}, {}] leaves the domain [0, {length}] and would break the boundary data",
                self.center - self.half_width,
                self.center + self.half_width
            )));
        }
        Ok(())
    }
}

/// Sum of bumps added to the shifted profile.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub bumps: Vec<Bump>,
}

impl Perturbation {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn single(bump: Bump) -> Self {
        Self { bumps: vec![bump] }
    }

    /// `(δv, δu)` at `x`.
    pub fn value(&self, x: f64) -> (f64, f64) {
        self.bumps.iter().fold((0.0, 0.0), |(v, u), b| {
            let (f, _) = b.shape(x);
            (v + b.amplitude_v * f, u + b.amplitude_u * f)
        })
    }
}

/// Initial state and the size of the perturbation that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub state: State,
    /// Discrete `H¹` norm of `(δv, δu)`: trapezoid `L²` plus forward-difference gradient.
    pub perturbation_h1: f64,
    pub perturbation_sup: f64,
}

/// Profile shifted by `β`, sampled on the grid, plus the perturbation.
pub fn make_initial_data(
    problem: &Problem,
    profile: &ShockProfile,
    perturbation: &Perturbation,
) -> Result<InitialData, SolverError> {
    let grid = problem.grid();
    for b in &perturbation.bumps {
        b.validate(grid.length())?;
    }
    let n = grid.n_nodes();
    let dx = grid.dx();
    let (mut dv, mut du) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let (mut v, mut u) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..n {
        let x = grid.x(i);
        let base = profile.eval(x - problem.beta());
        let (pv, pu) = perturbation.value(x);
        dv.push(pv);
        du.push(pu);
        v.push(base.v + pv);
        u.push(base.u + pu);
    }
    problem.impose_boundaries(&mut v, &mut u);
    let state = State { t: 0.0, v, u };
    if let Some((node, value)) = state.positivity_violation() {
        return Err(SolverError::InvalidInput(format!(
            "perturbed volume {value} at node {node} is not positive"
        )));
    }
    let trapezoid = |f: &[f64]| {
        dx * (f.iter().map(|x| x * x).sum::<f64>() - 0.5 * (f[0] * f[0] + f[n - 1] * f[n - 1]))
    };
    let gradient = |f: &[f64]| f.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / dx;
    let perturbation_h1 = (trapezoid(&dv) + trapezoid(&du) + gradient(&dv) + gradient(&du)).sqrt();
    let perturbation_sup = dv.iter().chain(&du).fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(InitialData {
        state,
        perturbation_h1,
        perturbation_sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::GasLaw;
    use crate::profile::{build_profile, inflow_for_strength, solve_left_state_impermeable};
    use crate::solver::Grid;

    fn wall() -> (Problem, ShockProfile) {
        let end = solve_left_state_impermeable(1.0, -0.1, &GasLaw::new(2.0).unwrap()).unwrap();
        let prof = build_profile(&end, 600.0, 24001).unwrap();
        let problem = Problem::new(end, Grid::with_spacing(1400.0, 0.05).unwrap(), 600.0).unwrap();
        (problem, prof)
    }

    #[test]
    fn test_unperturbed_data_is_the_sampled_profile() {
        let (problem, prof) = wall();
        let data = make_initial_data(&problem, &prof, &Perturbation::none()).unwrap();
        assert_eq!(data.perturbation_h1, 0.0);
        let g = problem.grid();
        for i in (1..g.n_nodes() - 1).step_by(997) {
            let p = prof.eval(g.x(i) - 600.0);
            assert_eq!((data.state.v[i], data.state.u[i]), (p.v, p.u));
        }
        assert_eq!(data.state.u[0], 0.0);
    }

    #[test]
    fn test_bump_norm_matches_continuous_value() {
        // ‖φ‖_{H¹} of the unit bump with half width 5, by 60-digit quadrature.
        const UNIT_BUMP_H1: f64 = 2.349935407287464;
        let (problem, prof) = wall();
        let bump = Bump {
            center: 600.0,
            half_width: 5.0,
            amplitude_v: 0.01,
            amplitude_u: 0.0,
        };
        let data = make_initial_data(&problem, &prof, &Perturbation::single(bump)).unwrap();
        assert!(
            (data.perturbation_h1 - 0.01 * UNIT_BUMP_H1).abs() < 1e-6,
            "{}",
            data.perturbation_h1
        );
        assert!((data.perturbation_sup - 0.01).abs() < 1e-12);
    }

    #[test]
    fn test_shape_derivative_matches_difference() {
        let b = Bump {
            center: 1.0,
            half_width: 2.0,
            amplitude_v: 1.0,
            amplitude_u: 0.0,
        };
        for x in [-0.5, 0.3, 1.0, 2.2, 2.9] {
            let h = 1e-6;
            let fd = (b.shape(x + h).0 - b.shape(x - h).0) / (2.0 * h);
            assert!((fd - b.shape(x).1).abs() < 1e-8);
        }
        assert_eq!(b.shape(3.0), (0.0, 0.0));
        assert_eq!(b.shape(1.0).0, 1.0);
    }

    #[test]
    fn test_bump_touching_the_boundary_is_rejected() {
        let (problem, prof) = wall();
        let bump = Bump {
            center: 2.0,
            half_width: 5.0,
            amplitude_v: 0.0,
            amplitude_u: 0.01,
        };
        let err = make_initial_data(&problem, &prof, &Perturbation::single(bump)).unwrap_err();
        assert!(matches!(err, SolverError::InvalidInput(_)));
    }

    #[test]
    fn test_inflow_boundary_holds_end_state() {
        let law = GasLaw::new(2.0).unwrap();
        let end = inflow_for_strength(1.0, 0.1, 0.1, &law).unwrap();
        let prof = build_profile(&end, 600.0, 12001).unwrap();
        let problem = Problem::new(end, Grid::new(1500.0, 3000).unwrap(), 600.0).unwrap();
        let data = make_initial_data(&problem, &prof, &Perturbation::none()).unwrap();
        assert_eq!(
            (data.state.v[0], data.state.u[0]),
            (end.v_minus(), end.u_minus())
        );
        let last = data.state.v.len() - 1;
        assert_eq!(
            (data.state.v[last], data.state.u[last]),
            (end.v_plus(), end.u_plus())
        );
    }
}
