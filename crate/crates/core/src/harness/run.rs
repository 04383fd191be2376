//! Executing a scenario and writing its artifacts.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{HarnessError, Scenario};
use crate::diagnostics::{write_diagnostics_csv, DiagnosticsRecorder, DiagnosticsRow};
use crate::profile::ShockProfile;
use crate::shift::{write_shift_csv, FrozenShift, ShiftDynamics, ShiftSample, WeightFlags};
use crate::solver::{
    make_initial_data, run, write_snapshot_csv, Coupled, Grid, Observer, RunRecord, StepView,
};

/// Comparison with the rigidly translated wave, for unperturbed scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleReport {
    /// `max_x max(|v - ṽ|, |u - ũ|)` against the wave moved by `c t` only.
    pub max_error: f64,
    pub final_shift: f64,
    /// `5 dx²`.
    pub budget: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.max_error <= self.budget && self.final_shift.abs() <= self.budget
    }
}

/// Post-transient statistics of the R₁ margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct R1Summary {
    pub checked: usize,
    pub violations: usize,
    pub min_margin: f64,
}

impl R1Summary {
    /// Fraction of checked snapshots with a nonnegative margin; one when none were checked.
    pub fn fraction_held(&self) -> f64 {
        if self.checked == 0 {
            1.0
        } else {
            1.0 - self.violations as f64 / self.checked as f64
        }
    }
}

/// Summary written to the metadata and used for the exit status.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub name: String,
    pub out_dir: PathBuf,
    pub steps: usize,
    pub snapshots: usize,
    pub t_final: f64,
    pub shift_final: f64,
    pub xdot_final: f64,
    pub xdot_running_max: f64,
    pub sup_perturbation_initial: f64,
    pub sup_perturbation_final: f64,
    pub x_over_t_final: Option<f64>,
    pub max_identity_residual: Option<f64>,
    /// `max_t (E(t) - E(0) - ∫₀ᵗ |P|)`; nonpositive when the entropy stays within its budget.
    pub entropy_budget_excess: f64,
    pub cumulative_abs_boundary: f64,
    pub r1: R1Summary,
    pub weight_flags: WeightFlags,
    pub oracle: Option<OracleReport>,
    /// Sign conditions that failed, one message each.
    pub invariant_violations: Vec<String>,
    /// Solver blow-up; the artifacts cover the steps before it.
    pub failure: Option<String>,
}

impl RunReport {
    /// Completed with every hard invariant intact.
    pub fn success(&self) -> bool {
        self.failure.is_none() && self.invariant_violations.is_empty()
    }
}

/// Report plus the in-memory data behind the files.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub rows: Vec<DiagnosticsRow>,
    pub record: RunRecord,
}

#[derive(Serialize)]
struct Metadata<'a> {
    scenario: &'a super::ScenarioConfig,
    seed: Option<u64>,
    end_states: &'a crate::profile::EndStates,
    weight: &'a crate::shift::WeightParams,
    dx: f64,
    n_nodes: usize,
    version: &'static str,
    report: &'a RunReport,
}

/// Writes the fields at every `stride`-th snapshot and at the last one.
struct FieldWriter<'a> {
    grid: &'a Grid,
    dir: PathBuf,
    stride: usize,
    count: usize,
    error: Option<HarnessError>,
}

impl Observer for FieldWriter<'_> {
    fn observe(&mut self, view: &StepView<'_>) {
        if !view.snapshot {
            return;
        }
        let index = self.count;
        self.count += 1;
        if self.error.is_some()
            || self.stride == 0
            || !(index.is_multiple_of(self.stride) || view.last)
        {
            return;
        }
        let path = self.dir.join(format!("fields_{index:05}.csv"));
        if let Err(e) =
            create(&path).and_then(|f| Ok(write_snapshot_csv(self.grid, view.state, f)?))
        {
            self.error = Some(e);
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })
}

fn create_dir(path: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn oracle(scenario: &Scenario, profile: &ShockProfile, record: &RunRecord) -> Option<OracleReport> {
    if !scenario.perturbation.bumps.is_empty() {
        return None;
    }
    let (grid, params, state) = (&scenario.grid, &scenario.params, &record.state);
    let max_error = (0..grid.n_nodes()).fold(0.0f64, |m, i| {
        let p = profile.eval(params.zeta(grid.x(i), state.t, 0.0));
        m.max((state.v[i] - p.v).abs())
            .max((state.u[i] - p.u).abs())
    });
    Some(OracleReport {
        max_error,
        final_shift: record.shift.x,
        budget: 5.0 * grid.dx() * grid.dx(),
    })
}

fn invariant_violations(rows: &[DiagnosticsRow]) -> Vec<String> {
    let mut out = Vec::new();
    for row in rows {
        let b = &row.terms;
        let named = [
            ("weighted_entropy", b.weighted_entropy),
            ("Jgood1", b.jgood[0]),
            ("Jgood2", b.jgood[1]),
            ("Jgood3", b.jgood[2]),
            ("G1", b.g1),
            ("G2", b.g2),
            ("D", b.d_visc),
            ("GS", b.gs),
            ("Dv1", b.dv1),
            ("Du1", b.du1),
            ("Du2", b.du2),
            ("h_entropy", row.h_entropy),
        ];
        out.extend(
            named
                .iter()
                .filter(|(_, x)| !(*x >= 0.0))
                .map(|(k, x)| format!("{k} = {x:e} at t = {}", b.t)),
        );
    }
    out
}

fn summarise(
    scenario: &Scenario,
    out_dir: &Path,
    rows: &[DiagnosticsRow],
    record: &RunRecord,
    failure: Option<String>,
    oracle: Option<OracleReport>,
) -> RunReport {
    let transient = scenario.config.time.transient;
    let late: Vec<f64> = rows
        .iter()
        .filter(|r| r.terms.t >= transient)
        .map(|r| r.r1.margin)
        .collect();
    let entropy_start = rows.first().map_or(0.0, |r| r.terms.weighted_entropy);
    let last = rows.last();
    RunReport {
        name: scenario.name().to_string(),
        out_dir: out_dir.to_path_buf(),
        steps: record.steps,
        snapshots: rows.len(),
        t_final: record.state.t,
        shift_final: record.shift.x,
        xdot_final: record.shift.xdot,
        xdot_running_max: record
            .shift
            .history
            .iter()
            .fold(0.0, |m, s| m.max(s.xdot.abs())),
        sup_perturbation_initial: rows.first().map_or(0.0, |r| r.metrics.sup_perturbation),
        sup_perturbation_final: last.map_or(0.0, |r| r.metrics.sup_perturbation),
        x_over_t_final: last.and_then(|r| r.metrics.x_over_t),
        max_identity_residual: rows
            .iter()
            .filter_map(|r| r.identity.map(|i| i.normalised))
            .reduce(f64::max),
        entropy_budget_excess: rows
            .iter()
            .map(|r| r.terms.weighted_entropy - entropy_start - r.cumulative_abs_boundary)
            .fold(f64::NEG_INFINITY, f64::max),
        cumulative_abs_boundary: last.map_or(0.0, |r| r.cumulative_abs_boundary),
        r1: R1Summary {
            checked: late.len(),
            violations: late.iter().filter(|m| !(**m >= 0.0)).count(),
            min_margin: late.iter().copied().fold(f64::INFINITY, f64::min),
        },
        weight_flags: scenario.params.flags,
        oracle,
        invariant_violations: invariant_violations(rows),
        failure,
    }
}

/// Runs `scenario`, writing into `out_dir`: `metadata.json`, `diagnostics.csv`, `shift.csv`,
/// `plot.csv` and `fields/fields_NNNNN.csv`. A blow-up still writes everything recorded
/// before it and is reported through [`RunReport::failure`].
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<RunOutcome, HarnessError> {
    let fields_dir = out_dir.join("fields");
    create_dir(&fields_dir)?;
    let problem = scenario.problem()?;
    let profile = scenario.build_profile()?;
    let (grid, params) = (&scenario.grid, &scenario.params);
    let initial = make_initial_data(&problem, &profile, &scenario.perturbation)?.state;

    let dynamics = ShiftDynamics::new(grid, &profile, params, scenario.config.shift.form);
    let coupled: &dyn Coupled = if scenario.config.shift.frozen {
        &FrozenShift
    } else {
        &dynamics
    };
    let mut recorder =
        DiagnosticsRecorder::new(grid, &profile, params, scenario.config.time.x_over_t_floor);
    let mut fields = FieldWriter {
        grid,
        dir: fields_dir,
        stride: scenario.config.output.field_stride,
        count: 0,
        error: None,
    };
    let result = run(
        &problem,
        &scenario.solver,
        initial,
        coupled,
        &mut [&mut recorder, &mut fields],
    );
    let (record, failure) = match result {
        Ok(record) => (record, None),
        Err(f) => (*f.record, Some(f.error.to_string())),
    };
    if let Some(e) = fields.error {
        return Err(e);
    }
    let rows = recorder.finish()?;
    let oracle = if failure.is_none() {
        oracle(scenario, &profile, &record)
    } else {
        None
    };
    let report = summarise(scenario, out_dir, &rows, &record, failure, oracle);

    write_diagnostics_csv(&rows, create(&out_dir.join("diagnostics.csv"))?)?;
    let at_snapshots: Vec<&ShiftSample> = record
        .snapshots
        .iter()
        .map(|m| &record.shift.history[m.step])
        .collect();
    write_shift_csv(at_snapshots, create(&out_dir.join("shift.csv"))?)?;
    write_plot_csv(&rows, create(&out_dir.join("plot.csv"))?)?;
    let metadata = Metadata {
        scenario: &scenario.config,
        seed: scenario.seed,
        end_states: &scenario.end,
        weight: params,
        dx: grid.dx(),
        n_nodes: grid.n_nodes(),
        version: env!("CARGO_PKG_VERSION"),
        report: &report,
    };
    serde_json::to_writer_pretty(create(&out_dir.join("metadata.json"))?, &metadata)?;
    Ok(RunOutcome {
        report,
        rows,
        record,
    })
}

#[derive(Serialize)]
struct PlotRow {
    t: f64,
    sup_pert: f64,
    xdot_abs: f64,
    x_over_t: Option<f64>,
    weighted_entropy: f64,
}

fn write_plot_csv<W: std::io::Write>(rows: &[DiagnosticsRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(PlotRow {
            t: r.terms.t,
            sup_pert: r.metrics.sup_perturbation,
            xdot_abs: r.metrics.xdot_abs,
            x_over_t: r.metrics.x_over_t,
            weighted_entropy: r.terms.weighted_entropy,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::DIAGNOSTICS_COLUMNS;
    use crate::harness::parse_config;

    const SHORT: &str = r#"
name = "short"
[gas]
gamma = 2.0
[shock]
v_plus = 1.0
u_plus = -0.1
[grid]
dx = 0.2
beta = 150.0
length = 300.0
[time]
t_end = 1.0
output_stride = 40
[output]
field_stride = 2
"#;

    fn scenario(text: &str) -> Scenario {
        Scenario::resolve(parse_config(text).unwrap()).unwrap()
    }

    fn lines(path: &Path) -> Vec<String> {
        fs::read_to_string(path)
            .unwrap()
            .lines()
            .map(String::from)
            .collect()
    }

    #[test]
    fn test_artifacts_have_one_row_per_snapshot() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_scenario(&scenario(SHORT), dir.path()).unwrap();
        assert!(out.report.success(), "{:?}", out.report);
        let n = out.record.snapshots.len();
        assert_eq!(out.rows.len(), n);
        let diag = lines(&dir.path().join("diagnostics.csv"));
        assert_eq!(diag[0], DIAGNOSTICS_COLUMNS.join(","));
        assert_eq!(diag.len(), n + 1);
        assert_eq!(lines(&dir.path().join("shift.csv")).len(), n + 1);
        assert_eq!(
            lines(&dir.path().join("plot.csv"))[0],
            "t,sup_pert,xdot_abs,x_over_t,weighted_entropy"
        );
        assert_eq!(lines(&dir.path().join("plot.csv")).len(), n + 1);
        let fields = fs::read_dir(dir.path().join("fields")).unwrap().count();
        assert_eq!(fields, n.div_ceil(2) + usize::from(n.is_multiple_of(2)));
        let meta: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("metadata.json")).unwrap())
                .unwrap();
        assert_eq!(meta["scenario"]["time"]["cfl"], 0.4);
        assert_eq!(meta["scenario"]["grid"]["n_cells"], 1500);
    }

    #[test]
    fn test_outputs_are_byte_identical_on_replay() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let s = scenario(SHORT);
        run_scenario(&s, a.path()).unwrap();
        run_scenario(&s, b.path()).unwrap();
        for f in [
            "diagnostics.csv",
            "shift.csv",
            "plot.csv",
            "fields/fields_00000.csv",
        ] {
            assert_eq!(
                fs::read(a.path().join(f)).unwrap(),
                fs::read(b.path().join(f)).unwrap(),
                "{f}"
            );
        }
    }

    #[test]
    fn test_zero_horizon_gives_a_single_snapshot() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_scenario(
            &scenario(&SHORT.replace("t_end = 1.0", "t_end = 0.0")),
            dir.path(),
        )
        .unwrap();
        assert!(out.report.success());
        assert_eq!(out.rows.len(), 1);
        assert_eq!(lines(&dir.path().join("diagnostics.csv")).len(), 2);
    }

    #[test]
    fn test_blow_up_is_reported_with_partial_artifacts() {
        // A violent velocity bump compresses a thin layer past zero volume.
        let text = SHORT.replace("output_stride = 40", "output_stride = 1\ncfl = 1.0").replace(
            "[output]",
            "[perturbation]\nbumps = [{ half_width = 0.5, amplitude_v = -0.5, amplitude_u = 100.0 }]\n[output]",
        );
        let dir = tempfile::tempdir().unwrap();
        let out = run_scenario(&scenario(&text), dir.path()).unwrap();
        assert!(out.report.failure.is_some(), "{:?}", out.report);
        assert!(!out.report.success());
        assert_eq!(
            lines(&dir.path().join("diagnostics.csv")).len(),
            out.rows.len() + 1
        );
        assert!(dir.path().join("metadata.json").exists());
    }
}
