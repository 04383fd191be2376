use super::{Problem, SolverError, State};
use crate::profile::ProblemKind;

/// Time derivatives of the nodal fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Tendency {
    pub dv: Vec<f64>,
    pub du: Vec<f64>,
}

impl Tendency {
    pub(crate) fn zeros(n: usize) -> Self {
        Self {
            dv: vec![0.0; n],
            du: vec![0.0; n],
        }
    }
}

fn first_bad_volume(t: f64, v: &[f64]) -> SolverError {
    let node = v
        .iter()
        .position(|x| !(*x > 0.0 && x.is_finite()))
        .unwrap_or(0);
    SolverError::Positivity {
        t,
        node,
        value: v[node],
    }
}

/// Interior nodes handled per block; the block's work arrays stay in L1.
const BLOCK: usize = 256;

/// Core stencil over interior nodes in blocks: `emit(first, dv, du)` receives the
/// tendencies of nodes `first..first + dv.len()`. Dirichlet and wall rows are emitted
/// as single-node blocks at either end.
#[inline(always)]
fn sweep(
    problem: &Problem,
    t: f64,
    v: &[f64],
    u: &[f64],
    mut emit: impl FnMut(usize, &[f64], &[f64]),
) -> Result<(), SolverError> {
    let law = problem.law();
    let n = v.len();
    let dx = problem.grid().dx();
    let half_inv_dx = 0.5 / dx;
    let inv_dx2 = 1.0 / (dx * dx);
    match problem.kind() {
        ProblemKind::Impermeable => emit(
            0,
            &[(4.0 * (u[1] - u[0]) - (u[2] - u[0])) * half_inv_dx],
            &[0.0],
        ),
        ProblemKind::Inflow => emit(0, &[0.0], &[0.0]),
    }
    // The boundary moves left through the fluid: information enters from x = 0, so the
    // convective difference looks at the left neighbour.
    let convect = match problem.kind() {
        ProblemKind::Impermeable => None,
        ProblemKind::Inflow => Some(problem.end().sigma_minus() / dx),
    };

    let mut pressure = [0.0; BLOCK + 2];
    let mut flux = [0.0; BLOCK + 1];
    let mut dv = [0.0; BLOCK];
    let mut du = [0.0; BLOCK];
    let mut first = 1;
    while first < n - 1 {
        let m = BLOCK.min(n - 1 - first);
        // Nodes first-1 ..= first+m and the m+1 half nodes between them.
        let vb = &v[first - 1..first + m + 1];
        let ub = &u[first - 1..first + m + 1];
        let p = &mut pressure[..m + 2];
        if !law.fill_pressure(vb, p) {
            return Err(first_bad_volume(t, v));
        }
        // Viscous flux (u_x / v) at half nodes, times dx.
        let f = &mut flux[..m + 1];
        for ((f, uw), vw) in f.iter_mut().zip(ub.windows(2)).zip(vb.windows(2)) {
            *f = 2.0 * (uw[1] - uw[0]) / (vw[0] + vw[1]);
        }
        let (dvb, dub) = (&mut dv[..m], &mut du[..m]);
        let (u_left, u_right) = (&ub[..m], &ub[2..]);
        let (p_left, p_right) = (&p[..m], &p[2..]);
        let (f_left, f_right) = (&f[..m], &f[1..]);
        for j in 0..m {
            dvb[j] = (u_right[j] - u_left[j]) * half_inv_dx;
            dub[j] = (p_left[j] - p_right[j]) * half_inv_dx + (f_right[j] - f_left[j]) * inv_dx2;
        }
        if let Some(c) = convect {
            let (v_left, v_mid, u_mid) = (&vb[..m], &vb[1..m + 1], &ub[1..m + 1]);
            for j in 0..m {
                dvb[j] += c * (v_mid[j] - v_left[j]);
                dub[j] += c * (u_mid[j] - u_left[j]);
            }
        }
        emit(first, dvb, dub);
        first += m;
    }
    emit(n - 1, &[0.0], &[0.0]);
    Ok(())
}

/// Tendency at `(v, u)` written into `out`.
pub(crate) fn rhs_into(
    problem: &Problem,
    t: f64,
    v: &[f64],
    u: &[f64],
    out: &mut Tendency,
) -> Result<(), SolverError> {
    sweep(problem, t, v, u, |first, dv, du| {
        out.dv[first..first + dv.len()].copy_from_slice(dv);
        out.du[first..first + du.len()].copy_from_slice(du);
    })
}

/// Right-hand side of the semi-discrete system at `state`.
pub fn semidiscrete_rhs(problem: &Problem, state: &State) -> Result<Tendency, SolverError> {
    state.check_against(problem.grid())?;
    let n = state.v.len();
    let mut out = Tendency::zeros(n);
    rhs_into(problem, state.t, &state.v, &state.u, &mut out)?;
    Ok(out)
}

/// Largest stable step: parabolic `dx² min v / 2` against hyperbolic `dx / max speed`.
pub fn cfl_dt(problem: &Problem, state: &State, cfl: f64) -> f64 {
    // Four independent lanes so the reduction vectorises.
    let mut min_v = [f64::INFINITY; 4];
    let mut max_u = [0.0f64; 4];
    let (vc, uc) = (state.v.chunks_exact(4), state.u.chunks_exact(4));
    let (v_rest, u_rest) = (vc.remainder(), uc.remainder());
    for (v, u) in vc.zip(uc) {
        for k in 0..4 {
            min_v[k] = if v[k] < min_v[k] { v[k] } else { min_v[k] };
            max_u[k] = if u[k].abs() > max_u[k] {
                u[k].abs()
            } else {
                max_u[k]
            };
        }
    }
    let min_v = v_rest
        .iter()
        .chain(&min_v)
        .fold(f64::INFINITY, |m, &v| m.min(v));
    let max_u = u_rest
        .iter()
        .map(|u| u.abs())
        .chain(max_u)
        .fold(0.0f64, f64::max);
    let dx = problem.grid().dx();
    let sound = problem.law().sound_speed_at(min_v);
    let speed = max_u + problem.end().sigma_minus().abs() + sound;
    cfl * (0.5 * dx * dx * min_v).min(dx / speed)
}

/// Rate of change of the trapezoid mass minus the boundary fluxes it should equal.
///
/// The discrete flux through `x = L` is `u_N` and through the boundary `u_0` (plus the
/// convective `σ_-(v_N - v_0)` for inflow); the result vanishes to `O(dx²)` for smooth
/// states whose velocity is flat at `x = L`.
pub fn mass_budget_rate(problem: &Problem, state: &State) -> Result<f64, SolverError> {
    let tend = semidiscrete_rhs(problem, state)?;
    let dx = problem.grid().dx();
    let n = tend.dv.len();
    let interior: f64 = tend.dv[1..n - 1].iter().sum();
    let mass_rate = dx * (interior + 0.5 * (tend.dv[0] + tend.dv[n - 1]));
    let mut flux = state.u[n - 1] - state.u[0];
    if problem.kind() == ProblemKind::Inflow {
        flux += problem.end().sigma_minus() * (state.v[n - 1] - state.v[0]);
    }
    Ok(mass_rate - flux)
}

/// `out = base + dt rate`.
fn euler(out: &mut [f64], base: &[f64], rate: &[f64], dt: f64) {
    for ((o, b), r) in out.iter_mut().zip(base).zip(rate) {
        *o = b + dt * r;
    }
}

/// `out = (base + stage + dt rate) / 2`, the Heun corrector.
fn average(out: &mut [f64], base: &[f64], stage: &[f64], rate: &[f64], dt: f64) {
    for (((o, b), s), r) in out.iter_mut().zip(base).zip(stage).zip(rate) {
        *o = 0.5 * (b + s + dt * r);
    }
}

/// Buffers for repeated Heun steps.
pub(crate) struct Stepper {
    stage: State,
    next: State,
}

impl Stepper {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            stage: State {
                t: 0.0,
                v: vec![0.0; n],
                u: vec![0.0; n],
            },
            next: State {
                t: 0.0,
                v: vec![0.0; n],
                u: vec![0.0; n],
            },
        }
    }

    /// Writes the Euler predictor `U + dt F(U)` into the stage buffer and returns it.
    pub(crate) fn predict(
        &mut self,
        problem: &Problem,
        state: &State,
        dt: f64,
    ) -> Result<&State, SolverError> {
        let s = &mut self.stage;
        let (v0, u0) = (&state.v, &state.u);
        sweep(problem, state.t, v0, u0, |first, dv, du| {
            let range = first..first + dv.len();
            euler(&mut s.v[range.clone()], &v0[range.clone()], dv, dt);
            euler(&mut s.u[range.clone()], &u0[range], du, dt);
        })?;
        s.t = state.t + dt;
        problem.impose_boundaries(&mut s.v, &mut s.u);
        Ok(&self.stage)
    }

    /// Completes the step from the predictor stored by [`Stepper::predict`] as
    /// `(U + stage + dt F(stage)) / 2`; `state` is left untouched on failure.
    pub(crate) fn correct(
        &mut self,
        problem: &Problem,
        state: &mut State,
        dt: f64,
    ) -> Result<(), SolverError> {
        let s = &self.stage;
        let next = &mut self.next;
        sweep(problem, s.t, &s.v, &s.u, |first, dv, du| {
            let range = first..first + dv.len();
            let (v0, u0) = (&state.v[range.clone()], &state.u[range.clone()]);
            average(&mut next.v[range.clone()], v0, &s.v[range.clone()], dv, dt);
            average(&mut next.u[range.clone()], u0, &s.u[range], du, dt);
        })?;
        next.t = s.t;
        problem.impose_boundaries(&mut next.v, &mut next.u);
        if !next
            .v
            .iter()
            .fold(true, |ok, x| ok & (*x > 0.0 && *x < f64::INFINITY))
        {
            return Err(first_bad_volume(next.t, &next.v));
        }
        std::mem::swap(state, next);
        Ok(())
    }
}

/// One Heun step of size `dt` with the boundary data re-imposed after each stage.
pub fn step(problem: &Problem, state: &State, dt: f64) -> Result<State, SolverError> {
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(SolverError::InvalidInput(format!(
            "time step must be finite and >= 0, got {dt}"
        )));
    }
    state.check_against(problem.grid())?;
    let mut next = state.clone();
    let mut stepper = Stepper::new(state.v.len());
    stepper.predict(problem, state, dt)?;
    stepper.correct(problem, &mut next, dt)?;
    Ok(next)
}
