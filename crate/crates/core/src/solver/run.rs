use super::kernel::{cfl_dt, Stepper};
use super::{Problem, SolverConfig, SolverError, State};
use crate::shift::ShiftState;

/// A scalar ODE driven by the fields and advanced with the same stages.
pub trait Coupled {
    /// Rate at `state` (which carries its own time) for the scalar value `value`.
    fn rate(&self, state: &State, value: f64) -> f64;
}

/// What observers see after each accepted step (and once at `t = 0`).
#[derive(Debug, Clone, Copy)]
pub struct StepView<'a> {
    pub step: usize,
    pub state: &'a State,
    pub shift: &'a ShiftState,
    /// This step is emitted as a snapshot.
    pub snapshot: bool,
    /// The next step will be a snapshot.
    pub snapshot_next: bool,
    /// No step follows.
    pub last: bool,
}

pub trait Observer {
    fn observe(&mut self, view: &StepView<'_>);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotMark {
    pub step: usize,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub state: State,
    pub shift: ShiftState,
    pub steps: usize,
    pub snapshots: Vec<SnapshotMark>,
}

/// A blow-up together with everything accepted before it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error} after {} accepted steps", record.steps)]
pub struct RunFailure {
    pub error: SolverError,
    pub record: Box<RunRecord>,
}

/// Advances `initial` to `config.t_end`, co-integrating the coupled shift.
pub fn run(
    problem: &Problem,
    config: &SolverConfig,
    initial: State,
    coupled: &dyn Coupled,
    observers: &mut [&mut dyn Observer],
) -> Result<RunRecord, RunFailure> {
    let mut record = RunRecord {
        state: initial,
        shift: ShiftState::new(),
        steps: 0,
        snapshots: Vec::new(),
    };
    if let Err(error) = record.state.check_against(problem.grid()) {
        return Err(RunFailure {
            error,
            record: Box::new(record),
        });
    }
    record.shift.t = record.state.t;
    let mut stepper = Stepper::new(record.state.v.len());
    let t_end = config.t_end;
    let stride = config.output_stride;

    let rate = coupled.rate(&record.state, record.shift.x);
    record.shift.record(rate);
    loop {
        let step = record.steps;
        let remaining = t_end - record.state.t;
        let dt = if remaining > 0.0 {
            Some(cfl_dt(problem, &record.state, config.cfl).min(remaining))
        } else {
            None
        };
        let last = dt.is_none();
        let snapshot = step.is_multiple_of(stride) || last;
        let snapshot_next = !last && ((step + 1).is_multiple_of(stride) || dt == Some(remaining));
        if snapshot {
            record.snapshots.push(SnapshotMark {
                step,
                t: record.state.t,
            });
        }
        let view = StepView {
            step,
            state: &record.state,
            shift: &record.shift,
            snapshot,
            snapshot_next,
            last,
        };
        for obs in observers.iter_mut() {
            obs.observe(&view);
        }
        let Some(dt) = dt else { break };

        let rate_start = record.shift.xdot;
        let advanced = stepper
            .predict(problem, &record.state, dt)
            .map(|stage| coupled.rate(stage, record.shift.x + dt * rate_start))
            .and_then(|predicted| {
                stepper
                    .correct(problem, &mut record.state, dt)
                    .map(|_| predicted)
            });
        let rate_predicted = match advanced {
            Ok(r) => r,
            Err(error) => {
                return Err(RunFailure {
                    error,
                    record: Box::new(record),
                })
            }
        };
        record.shift.advance(rate_start, rate_predicted, dt);
        if dt == remaining {
            // Land exactly on t_end despite rounding in the sum of steps.
            record.state.t = t_end;
            record.shift.t = t_end;
        }
        record.steps += 1;
        let rate = coupled.rate(&record.state, record.shift.x);
        record.shift.record(rate);
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::GasLaw;
    use crate::profile::solve_left_state_impermeable;
    use crate::shift::FrozenShift;
    use crate::solver::Grid;

    fn problem() -> Problem {
        let end = solve_left_state_impermeable(1.0, -0.1, &GasLaw::new(2.0).unwrap()).unwrap();
        Problem::new(end, Grid::new(20.0, 200).unwrap(), 10.0).unwrap()
    }

    fn smooth_state(p: &Problem) -> State {
        let g = p.grid();
        let e = p.end();
        State {
            t: 0.0,
            v: (0..g.n_nodes())
                .map(|i| 1.0 + 0.05 * (-(g.x(i) - 10.0).powi(2)).exp())
                .collect(),
            u: (0..g.n_nodes())
                .map(|i| e.u_plus() * (g.x(i) / 20.0).powi(2))
                .collect(),
        }
    }

    struct Counter {
        seen: usize,
        snaps: Vec<usize>,
        pre: Vec<usize>,
        last: Option<usize>,
    }

    impl Observer for Counter {
        fn observe(&mut self, view: &StepView<'_>) {
            self.seen += 1;
            if view.snapshot {
                self.snaps.push(view.step);
            }
            if view.snapshot_next {
                self.pre.push(view.step);
            }
            if view.last {
                self.last = Some(view.step);
            }
        }
    }

    #[test]
    fn test_zero_horizon_records_only_initial_snapshot() {
        let p = problem();
        let cfg = SolverConfig::new(0.4, 0.0, 10).unwrap();
        let rec = run(&p, &cfg, smooth_state(&p), &FrozenShift, &mut []).unwrap();
        assert_eq!(rec.steps, 0);
        assert_eq!(rec.snapshots, vec![SnapshotMark { step: 0, t: 0.0 }]);
        assert_eq!(rec.shift.history.len(), 1);
    }

    #[test]
    fn test_observers_and_snapshot_schedule() {
        let p = problem();
        let cfg = SolverConfig::new(0.4, 0.1, 7).unwrap();
        let mut c = Counter {
            seen: 0,
            snaps: vec![],
            pre: vec![],
            last: None,
        };
        let rec = run(&p, &cfg, smooth_state(&p), &FrozenShift, &mut [&mut c]).unwrap();
        assert_eq!(rec.state.t, 0.1);
        assert_eq!(c.seen, rec.steps + 1);
        assert_eq!(c.last, Some(rec.steps));
        assert_eq!(*c.snaps.last().unwrap(), rec.steps);
        for s in &c.snaps[1..] {
            assert!(c.pre.contains(&(s - 1)), "step {s} not announced");
        }
        assert_eq!(rec.snapshots.len(), c.snaps.len());
        assert_eq!(rec.state.u[0], 0.0);
    }

    #[test]
    fn test_replay_is_bit_identical() {
        let p = problem();
        let cfg = SolverConfig::new(0.4, 0.05, 5).unwrap();
        let a = run(&p, &cfg, smooth_state(&p), &FrozenShift, &mut []).unwrap();
        let b = run(&p, &cfg, smooth_state(&p), &FrozenShift, &mut []).unwrap();
        assert_eq!(a, b);
    }

    struct ConstantRate(f64);
    impl Coupled for ConstantRate {
        fn rate(&self, _: &State, _: f64) -> f64 {
            self.0
        }
    }

    #[test]
    fn test_coupled_constant_rate_integrates_exactly() {
        let p = problem();
        let cfg = SolverConfig::new(0.4, 0.05, 5).unwrap();
        let rec = run(&p, &cfg, smooth_state(&p), &ConstantRate(2.0), &mut []).unwrap();
        assert!((rec.shift.x - 0.1).abs() < 1e-14);
        assert!(rec.shift.history.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn test_blow_up_returns_partial_record() {
        // Colliding streams compress node 100 past zero volume within one step.
        let p = problem();
        let mut s = smooth_state(&p);
        for i in 1..s.u.len() - 1 {
            s.u[i] = if i <= 100 { 100.0 } else { -100.0 };
        }
        s.v[100] = 0.5;
        let start = s.clone();
        let cfg = SolverConfig::new(1.0, 1.0, 1).unwrap();
        match run(&p, &cfg, s, &FrozenShift, &mut []) {
            Err(RunFailure {
                error: SolverError::Positivity { node, .. },
                record,
            }) => {
                assert_eq!(record.steps, 0);
                assert_eq!(record.state, start);
                assert!((99..=101).contains(&node));
            }
            other => panic!("expected blow-up, got {:?}", other.map(|r| r.steps)),
        }
    }
}
