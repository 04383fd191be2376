//! Turning a scenario document into validated problem data.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{HarnessError, ScenarioConfig, DEFAULT_DX};
use crate::gas::GasLaw;
use crate::profile::{
    build_profile, inflow_for_strength, shock_curve_inflow, solve_left_state_impermeable,
    EndStates, ProblemKind, ShockProfile,
};
use crate::shift::WeightParams;
use crate::solver::{Bump, Grid, Perturbation, Problem, SolverConfig};

/// A validated scenario. `config` holds every resolved value, defaults included.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub end: EndStates,
    pub params: WeightParams,
    pub grid: Grid,
    pub solver: SolverConfig,
    pub perturbation: Perturbation,
    pub seed: Option<u64>,
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::Validation(msg.into())
}

fn end_states(config: &ScenarioConfig) -> Result<EndStates, HarnessError> {
    let law = GasLaw::new(config.gas.gamma).map_err(|e| invalid(e.to_string()))?;
    let s = &config.shock;
    let need = |x: Option<f64>, key: &str| {
        x.ok_or_else(|| invalid(format!("shock.{key} is required for {:?} problems", s.kind)))
    };
    let forbid = |x: Option<f64>, key: &str| match x {
        Some(_) => Err(invalid(format!(
            "shock.{key} does not apply to {:?} problems",
            s.kind
        ))),
        None => Ok(()),
    };
    let end = match s.kind {
        ProblemKind::Impermeable => {
            forbid(s.v_minus, "v_minus")?;
            forbid(s.u_minus, "u_minus")?;
            forbid(s.delta, "delta")?;
            solve_left_state_impermeable(need(s.v_plus, "v_plus")?, need(s.u_plus, "u_plus")?, &law)
        }
        ProblemKind::Inflow => {
            forbid(s.u_plus, "u_plus")?;
            let (v_minus, u_minus) = (need(s.v_minus, "v_minus")?, need(s.u_minus, "u_minus")?);
            match (s.v_plus, s.delta) {
                (Some(v_plus), None) => shock_curve_inflow(v_minus, u_minus, v_plus, &law),
                (None, Some(delta)) => inflow_for_strength(v_minus, u_minus, delta, &law),
                _ => {
                    return Err(invalid(
                        "inflow needs exactly one of shock.v_plus and shock.delta",
                    ))
                }
            }
        }
    };
    end.map_err(|e| invalid(e.to_string()))
}

impl Scenario {
    /// Validates `config` and fills in every derived default.
    pub fn resolve(mut config: ScenarioConfig) -> Result<Self, HarnessError> {
        let end = end_states(&config)?;
        let delta = end.delta();
        let g = &mut config.grid;
        let t = &config.time;
        let beta = g.beta.unwrap_or(g.beta_scale / delta);
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid(format!("grid.beta must be positive, got {beta}")));
        }
        let length = g
            .length
            .unwrap_or(beta + end.frame_speed() * t.t_end + g.tail_scale / delta);
        if !(length > beta) {
            return Err(invalid(format!(
                "grid.length = {length} does not contain the shock at beta = {beta}"
            )));
        }
        let grid = match (g.dx, g.n_cells) {
            (Some(_), Some(_)) => {
                return Err(invalid("give at most one of grid.dx and grid.n_cells"))
            }
            (_, Some(n)) => Grid::new(length, n),
            (dx, None) => Grid::with_spacing(length, dx.unwrap_or(DEFAULT_DX)),
        }
        .map_err(|e| invalid(e.to_string()))?;
        if !(g.profile_scale > 0.0) || g.profile_samples < 64 {
            return Err(invalid(
                "grid.profile_scale must be positive and grid.profile_samples at least 64",
            ));
        }
        (g.beta, g.length, g.dx, g.n_cells) = (
            Some(beta),
            Some(length),
            Some(grid.dx()),
            Some(grid.n_cells()),
        );

        let solver = SolverConfig::new(t.cfl, t.t_end, t.output_stride)
            .map_err(|e| invalid(e.to_string()))?;
        if !(t.x_over_t_floor >= 0.0) {
            return Err(invalid("time.x_over_t_floor must be nonnegative"));
        }
        let params = WeightParams::new_unchecked(&end, beta)?;
        if config.output.dir.is_none() {
            config.output.dir = Some(format!("runs/{}", config.name));
        }
        let mut scenario = Self {
            perturbation: Perturbation::none(),
            config,
            end,
            params,
            grid,
            solver,
            seed: None,
        };
        scenario.perturbation = scenario.place_bumps()?;
        Ok(scenario)
    }

    fn place_bumps(&self) -> Result<Perturbation, HarnessError> {
        let beta = self.params.beta;
        let length = self.grid.length();
        let bumps = self.config.perturbation.bumps.iter().map(|b| {
            let bump = Bump {
                center: beta + b.offset,
                half_width: b.half_width,
                amplitude_v: b.amplitude_v,
                amplitude_u: b.amplitude_u,
            };
            let (lo, hi) = (bump.center - bump.half_width, bump.center + bump.half_width);
            if !(b.half_width > 0.0) || lo < 0.0 || hi > length {
                return Err(invalid(format!(
                    "bump support [{lo}, {hi}] must be nonempty and inside [0, {length}]"
                )));
            }
            Ok(bump)
        });
        Ok(Perturbation {
            bumps: bumps.collect::<Result<_, _>>()?,
        })
    }

    /// Jitters every bump: offset by up to half its half width, amplitudes scaled by a
    /// factor in `[0.5, 1.5)`. The jittered values are written back into `config`.
    pub fn with_seed(mut self, seed: u64) -> Result<Self, HarnessError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for b in &mut self.config.perturbation.bumps {
            b.offset += rng.gen_range(-0.5..0.5) * b.half_width;
            let scale = rng.gen_range(0.5..1.5);
            b.amplitude_v *= scale;
            b.amplitude_u *= scale;
        }
        self.perturbation = self.place_bumps()?;
        self.seed = Some(seed);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.config.name
    }

    pub fn problem(&self) -> Result<Problem, HarnessError> {
        Ok(Problem::new(self.end, self.grid, self.params.beta)?)
    }

    pub fn build_profile(&self) -> Result<ShockProfile, HarnessError> {
        let g = &self.config.grid;
        Ok(build_profile(
            &self.end,
            g.profile_scale / self.end.delta(),
            g.profile_samples,
        )?)
    }

    /// The configured output directory.
    pub fn output_dir(&self) -> PathBuf {
        PathBuf::from(self.config.output.dir.as_deref().unwrap_or("runs"))
    }
}
