//! Running one scenario over a list of values of a single key.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{run_scenario, HarnessError, RunReport, Scenario, ScenarioConfig};

/// Returns `config` with the dotted `key` (for example `grid.beta_scale`) set to `value`.
/// Integer-valued keys accept only whole numbers.
pub fn set_key(
    config: &ScenarioConfig,
    key: &str,
    value: f64,
) -> Result<ScenarioConfig, HarnessError> {
    let parse_error = |message: String| HarnessError::Parse {
        path: key.to_string(),
        message,
    };
    let mut doc = toml::Table::try_from(config).map_err(|e| parse_error(e.to_string()))?;
    let mut parts: Vec<&str> = key.split('.').collect();
    let leaf = parts
        .pop()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| parse_error("empty key".into()))?;
    let mut table = &mut doc;
    for part in parts {
        table = table
            .entry(part)
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| parse_error(format!("`{part}` is not a section")))?;
    }
    let integral =
        matches!(table.get(leaf), Some(toml::Value::Integer(_))) || INTEGER_KEYS.contains(&leaf);
    let item = if integral {
        if value.fract() != 0.0 || !(value >= 0.0) {
            return Err(parse_error(format!("expected a whole number, got {value}")));
        }
        toml::Value::Integer(value as i64)
    } else {
        toml::Value::Float(value)
    };
    table.insert(leaf.to_string(), item);
    let text = toml::to_string(&doc).map_err(|e| parse_error(e.to_string()))?;
    super::parse_config(&text)
}

const INTEGER_KEYS: [&str; 4] = [
    "n_cells",
    "profile_samples",
    "output_stride",
    "field_stride",
];

/// One run of a sweep.
#[derive(Debug)]
pub struct SweepEntry {
    pub value: f64,
    pub dir: PathBuf,
    pub result: Result<RunReport, HarnessError>,
}

/// Runs every value in parallel, each in `root/<key>=<value>`. Keys that the base config
/// resolved from others (`grid.beta`, `grid.length`, grid spacing) are recomputed per run
/// unless the base document set them explicitly.
pub fn sweep(
    base: &ScenarioConfig,
    key: &str,
    values: &[f64],
    root: &Path,
    seed: Option<u64>,
) -> Result<Vec<SweepEntry>, HarnessError> {
    let configs = values
        .iter()
        .map(|&v| {
            let mut c = set_key(base, key, v)?;
            c.name = format!("{}-{key}={v}", base.name);
            c.output.dir = None;
            Ok((v, c))
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(configs
        .into_par_iter()
        .map(|(value, config)| {
            let dir = root.join(format!("{key}={value}"));
            let result = Scenario::resolve(config)
                .and_then(|s| match seed {
                    Some(seed) => s.with_seed(seed),
                    None => Ok(s),
                })
                .and_then(|s| run_scenario(&s, &dir))
                .map(|o| o.report);
            SweepEntry { value, dir, result }
        })
        .collect())
}
