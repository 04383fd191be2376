//! The scenario document: sections, defaults and presets.

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::profile::ProblemKind;
use crate::shift::ShiftForm;

/// A scenario as written. Omitted keys take the documented defaults when resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub gas: GasSection,
    pub shock: ShockSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub perturbation: PerturbationSection,
    #[serde(default)]
    pub shift: ShiftSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_name() -> String {
    "scenario".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSection {
    pub gamma: f64,
}

/// End states. The wall problem takes `v_plus`, `u_plus`; inflow takes `v_minus`,
/// `u_minus` and exactly one of `v_plus`, `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShockSection {
    #[serde(default = "default_kind")]
    pub kind: ProblemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_plus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_plus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_minus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_minus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

fn default_kind() -> ProblemKind {
    ProblemKind::Impermeable
}

/// Domain and profile placement. `beta` defaults to `beta_scale/δ` and `length` to
/// `β + c t_end + tail_scale/δ`, `c` being the shock speed in computational coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_cells: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default = "default_beta_scale")]
    pub beta_scale: f64,
    #[serde(default = "default_tail_scale")]
    pub tail_scale: f64,
    /// Half width of the tabulated profile, as a multiple of `1/δ`; tails beyond it are
    /// continued exponentially.
    #[serde(default = "default_profile_scale")]
    pub profile_scale: f64,
    #[serde(default = "default_profile_samples")]
    pub profile_samples: usize,
}

fn default_beta_scale() -> f64 {
    60.0
}
fn default_tail_scale() -> f64 {
    80.0
}
fn default_profile_scale() -> f64 {
    40.0
}
fn default_profile_samples() -> usize {
    40001
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            dx: None,
            n_cells: None,
            length: None,
            beta: None,
            beta_scale: default_beta_scale(),
            tail_scale: default_tail_scale(),
            profile_scale: default_profile_scale(),
            profile_samples: default_profile_samples(),
        }
    }
}

/// `dx` when neither `dx` nor `n_cells` is given.
pub const DEFAULT_DX: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// Steps between diagnostics snapshots.
    #[serde(default = "default_stride")]
    pub output_stride: usize,
    /// `X/t` is reported only after this time.
    #[serde(default = "default_t_floor")]
    pub x_over_t_floor: f64,
    /// Snapshots before this time are excluded from the R₁ margin statistics.
    #[serde(default = "default_transient")]
    pub transient: f64,
}

fn default_t_end() -> f64 {
    200.0
}
fn default_cfl() -> f64 {
    0.4
}
fn default_stride() -> usize {
    1000
}
fn default_t_floor() -> f64 {
    1.0
}
fn default_transient() -> f64 {
    20.0
}

impl Default for TimeSection {
    fn default() -> Self {
        Self {
            t_end: default_t_end(),
            cfl: default_cfl(),
            output_stride: default_stride(),
            x_over_t_floor: default_t_floor(),
            transient: default_transient(),
        }
    }
}

/// A bump placed relative to the initial shock location `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    #[serde(default)]
    pub offset: f64,
    pub half_width: f64,
    #[serde(default)]
    pub amplitude_v: f64,
    #[serde(default)]
    pub amplitude_u: f64,
}

/// The default perturbation: a volume bump of height 0.01 on `[β - 5, β + 5]`.
pub const DEFAULT_BUMP: BumpSpec = BumpSpec {
    offset: 0.0,
    half_width: 5.0,
    amplitude_v: 0.01,
    amplitude_u: 0.0,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSection {
    #[serde(default = "default_bumps")]
    pub bumps: Vec<BumpSpec>,
}

fn default_bumps() -> Vec<BumpSpec> {
    vec![DEFAULT_BUMP]
}

impl Default for PerturbationSection {
    fn default() -> Self {
        Self {
            bumps: default_bumps(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSection {
    #[serde(default = "default_form")]
    pub form: ShiftForm,
    /// Keep `X ≡ 0`.
    #[serde(default)]
    pub frozen: bool,
}

fn default_form() -> ShiftForm {
    ShiftForm::Velocity
}

impl Default for ShiftSection {
    fn default() -> Self {
        Self {
            form: default_form(),
            frozen: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Defaults to `runs/<name>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// Write the fields at every n-th diagnostics snapshot (and the last); 0 writes none.
    #[serde(default = "default_field_stride")]
    pub field_stride: usize,
}

fn default_field_stride() -> usize {
    20
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: None,
            field_stride: default_field_stride(),
        }
    }
}

/// Parses a TOML scenario. Errors name the offending key path.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, HarnessError> {
    let de = toml::Deserializer::parse(text).map_err(|e| HarnessError::Parse {
        path: String::new(),
        message: e.message().to_string(),
    })?;
    serde_path_to_error::deserialize(de).map_err(|e| HarnessError::Parse {
        path: e.path().to_string(),
        message: e.inner().message().to_string(),
    })
}

/// Identifiers accepted by [`preset`].
pub const PRESET_NAMES: [&str; 4] = [
    "impermeable-weak-shock",
    "inflow-weak-shock",
    "traveling-wave-oracle",
    "strong-shock-control",
];

const PRESETS: [&str; 4] = [
    r#"
name = "impermeable-weak-shock"
[gas]
gamma = 2.0
[shock]
kind = "impermeable"
v_plus = 1.0
u_plus = -0.1
"#,
    r#"
name = "inflow-weak-shock"
[gas]
gamma = 2.0
[shock]
kind = "inflow"
v_minus = 1.0
u_minus = 0.1
delta = 0.1
"#,
    r#"
name = "traveling-wave-oracle"
[gas]
gamma = 2.0
[shock]
kind = "impermeable"
v_plus = 1.0
u_plus = -0.1
[time]
t_end = 50.0
[perturbation]
bumps = []
"#,
    r#"
name = "strong-shock-control"
[gas]
gamma = 2.0
[shock]
kind = "impermeable"
v_plus = 1.0
u_plus = -0.5
[time]
t_end = 50.0
output_stride = 200
"#,
];

/// A pinned scenario by name.
pub fn preset(name: &str) -> Result<ScenarioConfig, HarnessError> {
    let k = PRESET_NAMES
        .iter()
        .position(|p| *p == name)
        .ok_or_else(|| HarnessError::UnknownPreset(name.to_string()))?;
    parse_config(PRESETS[k])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_minimal_document_takes_defaults() {
        let c = parse_config("[gas]\ngamma = 2.0\n[shock]\nv_plus = 1.0\nu_plus = -0.1\n").unwrap();
        assert_eq!(c.name, "scenario");
        assert_eq!(c.shock.kind, ProblemKind::Impermeable);
        assert_eq!(c.grid, GridSection::default());
        assert_eq!(c.time, TimeSection::default());
        assert_eq!(c.perturbation.bumps, vec![DEFAULT_BUMP]);
        assert_eq!(c.shift, ShiftSection::default());
        assert_eq!(c.output, OutputSection::default());
    }

    #[test]
    fn test_unknown_key_reports_its_path() {
        let text = "[gas]\ngamma = 2.0\n[shock]\nv_plus = 1.0\nu_plus = -0.1\n[grid]\ndx = 0.1\nbogus = 3\n";
        match parse_config(text) {
            Err(HarnessError::Parse { path, message }) => {
                assert_eq!(path, "grid.bogus");
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn test_wrong_type_reports_its_path() {
        let text = "[gas]\ngamma = \"two\"\n[shock]\nv_plus = 1.0\n";
        match parse_config(text) {
            Err(HarnessError::Parse { path, .. }) => assert_eq!(path, "gas.gamma"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn test_malformed_toml_is_a_parse_error() {
        assert!(matches!(
            parse_config("[gas\n"),
            Err(HarnessError::Parse { .. })
        ));
    }

    #[test]
    fn test_presets_load_and_round_trip() {
        for name in PRESET_NAMES {
            let c = preset(name).unwrap();
            assert_eq!(c.name, name);
            let text = toml::to_string(&c).unwrap();
            assert_eq!(parse_config(&text).unwrap(), c);
        }
        assert!(matches!(
            preset("nope"),
            Err(HarnessError::UnknownPreset(_))
        ));
    }
}
