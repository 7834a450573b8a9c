//! TOML configuration for scenarios and sweeps.
//!
//! A scenario file holds the [`Scenario`] fields at the top level. Setting
//! `extends = "<built-in name>"` starts from a built-in scenario and merges
//! the file's tables over it, so a file may contain only what it changes.
//!
//! A sweep file has a `[sweep]` table (`axis`, `values`, `metrics`, optional
//! `workers`) and a `[scenario]` table in the scenario format above.
//!
//! Overrides are `dotted.key=value` pairs applied to the effective document
//! after defaults are filled in. The parent table must exist and the result
//! must still parse, so misspelled keys are rejected. For sweep files, keys
//! that do not start with `sweep.` or `scenario.` address the scenario.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::scenarios::{builtin, Metric, Scenario, SweepSpec, BUILTIN_NAMES};

#[derive(Debug, Clone, PartialEq)]
pub enum Config {
    Scenario(Scenario),
    Sweep(SweepSpec),
}

impl Config {
    pub fn name(&self) -> &str {
        match self {
            Config::Scenario(s) => &s.name,
            Config::Sweep(sw) => &sw.base.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepTable {
    axis: String,
    values: Vec<f64>,
    metrics: Vec<Metric>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    workers: Option<usize>,
}

fn config_error(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string().trim_end().to_string())
}

fn to_value<T: Serialize>(item: &T) -> Result<Value> {
    Value::try_from(item).map_err(config_error)
}

fn from_value<T: DeserializeOwned>(v: Value) -> Result<T> {
    v.try_into().map_err(config_error)
}

/// Recursively overlays `top` onto `base`.
fn merge(base: &mut Table, top: Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(t)) => {
                // a different tagged variant replaces the table wholesale
                let same_family = match (b.get("family"), t.get("family")) {
                    (Some(x), Some(y)) => x == y,
                    _ => true,
                };
                if same_family {
                    merge(b, t);
                } else {
                    *b = t;
                }
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn scenario_from_table(mut table: Table) -> Result<Scenario> {
    let scenario: Scenario = match table.remove("extends") {
        Some(Value::String(name)) => {
            let base = builtin(&name).ok_or_else(|| {
                Error::Config(format!(
                    "unknown built-in scenario '{name}' (available: {})",
                    BUILTIN_NAMES.join(", ")
                ))
            })?;
            let Value::Table(mut merged) = to_value(&base)? else {
                unreachable!("scenarios serialize to tables")
            };
            merge(&mut merged, table);
            from_value(Value::Table(merged))?
        }
        Some(other) => {
            return Err(Error::Config(format!(
                "'extends' must be a string, got {other}"
            )))
        }
        None => from_value(Value::Table(table))?,
    };
    Ok(scenario)
}

/// Parses a scenario or sweep without overrides.
pub fn parse_config(text: &str) -> Result<Config> {
    parse_config_with(text, &[])
}

/// Parses, applies `overrides` and validates.
pub fn parse_config_with(text: &str, overrides: &[(String, Value)]) -> Result<Config> {
    let mut table: Table = text.parse().map_err(config_error)?;
    let config = match table.remove("sweep") {
        Some(Value::Table(sweep)) => {
            let scenario = match table.remove("scenario") {
                Some(Value::Table(s)) => scenario_from_table(s)?,
                Some(_) => return Err(Error::Config("'scenario' must be a table".into())),
                None => return Err(Error::Config("sweep file needs a [scenario] table".into())),
            };
            if let Some(k) = table.keys().next() {
                return Err(Error::Config(format!(
                    "unknown top-level key '{k}' in sweep file"
                )));
            }
            let sweep: SweepTable = from_value(Value::Table(sweep))?;
            Config::Sweep(SweepSpec {
                base: scenario,
                axis: sweep.axis,
                values: sweep.values,
                metrics: sweep.metrics,
                workers: sweep.workers,
            })
        }
        Some(_) => return Err(Error::Config("'sweep' must be a table".into())),
        None => Config::Scenario(scenario_from_table(table)?),
    };
    let config = apply_overrides(config, overrides)?;
    validate(&config)?;
    Ok(config)
}

pub fn validate(config: &Config) -> Result<()> {
    match config {
        Config::Scenario(s) => s.validate(),
        Config::Sweep(sw) => {
            sw.base.validate()?;
            sw.validate()
        }
    }
}

/// The effective document: a scenario table, or `{sweep, scenario}`.
fn document(config: &Config) -> Result<Value> {
    match config {
        Config::Scenario(s) => to_value(s),
        Config::Sweep(sw) => {
            let mut t = Table::new();
            t.insert(
                "sweep".into(),
                to_value(&SweepTable {
                    axis: sw.axis.clone(),
                    values: sw.values.clone(),
                    metrics: sw.metrics.clone(),
                    workers: sw.workers,
                })?,
            );
            t.insert("scenario".into(), to_value(&sw.base)?);
            Ok(Value::Table(t))
        }
    }
}

fn from_document(doc: Value, sweep: bool) -> Result<Config> {
    if !sweep {
        return Ok(Config::Scenario(from_value(doc)?));
    }
    let Value::Table(mut t) = doc else {
        unreachable!("documents are tables")
    };
    let sw: SweepTable = from_value(t.remove("sweep").expect("sweep table"))?;
    let base: Scenario = from_value(t.remove("scenario").expect("scenario table"))?;
    Ok(Config::Sweep(SweepSpec {
        base,
        axis: sw.axis,
        values: sw.values,
        metrics: sw.metrics,
        workers: sw.workers,
    }))
}

/// Splits `key=value`. The value is read as a TOML value when it parses as
/// one and as a bare string otherwise.
pub fn parse_override(raw: &str) -> Result<(String, Value)> {
    let (key, value) = raw
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{raw}' is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::Config(format!(
            "override '{raw}' has an invalid key"
        )));
    }
    let value = value.trim();
    let parsed = format!("v = {value}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(value.to_string()));
    Ok((key.to_string(), parsed))
}

fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut parts: Vec<&str> = path.split('.').collect();
    let leaf = parts.pop().expect("non-empty path");
    let mut node = doc;
    for (depth, part) in parts.iter().enumerate() {
        node = match node {
            Value::Table(t) => t.get_mut(*part),
            Value::Array(a) => part.parse::<usize>().ok().and_then(|i| a.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| {
            Error::Config(format!(
                "override key '{path}' does not exist (no '{}')",
                parts[..=depth].join(".")
            ))
        })?;
    }
    let slot = match node {
        Value::Table(t) => {
            if !t.contains_key(leaf) {
                // only optional fields can be created; the re-parse rejects the rest
                t.insert(leaf.to_string(), value);
                return Ok(());
            }
            t.get_mut(leaf).expect("checked above")
        }
        Value::Array(a) => leaf
            .parse::<usize>()
            .ok()
            .and_then(|i| a.get_mut(i))
            .ok_or_else(|| {
                Error::Config(format!("override key '{path}' indexes past the array"))
            })?,
        _ => {
            return Err(Error::Config(format!(
                "override key '{path}' does not address a table field"
            )))
        }
    };
    *slot = match (&*slot, value) {
        // sweep values arrive as floats; integral ones may fill integer fields
        (Value::Integer(_), Value::Float(f)) if f.fract() == 0.0 && f.abs() < 9.0e15 => {
            Value::Integer(f as i64)
        }
        (_, v) => v,
    };
    Ok(())
}

pub fn apply_overrides(config: Config, overrides: &[(String, Value)]) -> Result<Config> {
    if overrides.is_empty() {
        return Ok(config);
    }
    let sweep = matches!(config, Config::Sweep(_));
    let mut doc = document(&config)?;
    for (key, value) in overrides {
        let path = if sweep && !key.starts_with("sweep.") && !key.starts_with("scenario.") {
            format!("scenario.{key}")
        } else {
            key.clone()
        };
        set_path(&mut doc, &path, value.clone())?;
        from_document(doc.clone(), sweep)
            .map_err(|e| Error::Config(format!("override '{key}' rejected: {e}")))?;
    }
    from_document(doc, sweep)
}

/// `item` with one dotted field replaced.
pub fn with_override<T: Serialize + DeserializeOwned>(
    item: &T,
    path: &str,
    value: Value,
) -> Result<T> {
    let mut doc = to_value(item)?;
    set_path(&mut doc, path, value)?;
    from_value(doc).map_err(|e| Error::Config(format!("cannot set '{path}': {e}")))
}

/// Serializes the effective configuration; re-parsing gives the same value.
pub fn to_toml(config: &Config) -> Result<String> {
    let doc = document(config)?;
    toml::to_string(&doc).map_err(config_error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Envelope;
    use crate::scenarios::{builtins, Output};

    const MINIMAL: &str = r#"
[pulse]
detuning = 1.0
envelope = { family = "gaussian", peak = 0.2, center = 0.0, width = 50.0 }

[grid]
points = 101
"#;

    fn scenario(c: Config) -> Scenario {
        match c {
            Config::Scenario(s) => s,
            Config::Sweep(_) => panic!("expected a scenario"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let s = scenario(parse_config(MINIMAL).unwrap());
        assert_eq!(s.name, "scenario");
        assert_eq!(s.numerics.rel_tol, 1e-10);
        assert_eq!(s.numerics.anchor_ratio, 1e-6);
        assert_eq!(s.initial.a1, [1.0, 0.0]);
        assert_eq!(s.outputs.len(), 4);
        assert!(s.system.omega2 > s.system.omega1);
    }

    #[test]
    fn unknown_field_is_named() {
        let text = MINIMAL.replace("points = 101", "points = 101\nspacing = 3");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("spacing"), "{err}");
        let text = MINIMAL.replace("width = 50.0", "wdith = 50.0");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("wdith"), "{err}");
    }

    #[test]
    fn nonpositive_width_is_rejected() {
        let err = parse_config(&MINIMAL.replace("width = 50.0", "width = -1.0")).unwrap_err();
        assert!(matches!(err, Error::InvalidPulse(_)), "{err}");
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err = parse_config("[pulse\ndetuning = 1")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn echoed_builtins_round_trip() {
        for s in builtins() {
            let c = Config::Scenario(s.resolved().unwrap());
            let text = to_toml(&c).unwrap();
            assert_eq!(parse_config(&text).unwrap(), c, "{text}");
        }
    }

    #[test]
    fn extends_merges_over_a_builtin() {
        let text = r#"
extends = "gaussian-adiabatic"
name = "faster"
[pulse.envelope]
width = 400.0
"#;
        let s = scenario(parse_config(text).unwrap());
        assert_eq!(s.name, "faster");
        assert_eq!(
            s.pulse.envelope,
            Envelope::Gaussian {
                peak: 0.2,
                center: 0.0,
                width: 400.0
            }
        );
        assert!(parse_config("extends = \"nope\"").is_err());
    }

    #[test]
    fn overrides_apply_and_must_name_real_keys() {
        let o = |s: &str| parse_override(s).unwrap();
        let s = scenario(
            parse_config_with(
                MINIMAL,
                &[
                    o("pulse.detuning=2"),
                    o("grid.points=11"),
                    o("grid.start=-5"),
                ],
            )
            .unwrap(),
        );
        assert_eq!(s.pulse.detuning, 2.0);
        assert_eq!(s.grid.points, 11);
        assert_eq!(s.grid.start, Some(-5.0));
        assert!(parse_config_with(MINIMAL, &[o("pulse.detunning=2")]).is_err());
        assert!(parse_config_with(MINIMAL, &[o("nothing.here=2")]).is_err());
        assert!(parse_override("novalue").is_err());
        let outputs =
            scenario(parse_config_with(MINIMAL, &[o("outputs=[\"adiabaticity\"]")]).unwrap())
                .outputs;
        assert_eq!(
            outputs.into_iter().collect::<Vec<_>>(),
            vec![Output::Adiabaticity]
        );
    }

    #[test]
    fn sweep_files() {
        let text = r#"
[sweep]
axis = "pulse.envelope.width"
values = [100.0, 200.0]
metrics = ["margin", "max-population-error"]

[scenario]
extends = "gaussian-adiabatic"
"#;
        let Config::Sweep(sw) = parse_config(text).unwrap() else {
            panic!()
        };
        assert_eq!(sw.values, vec![100.0, 200.0]);
        assert_eq!(sw.metrics, vec![Metric::Margin, Metric::MaxPopulationError]);
        let c = Config::Sweep(sw);
        assert_eq!(parse_config(&to_toml(&c).unwrap()).unwrap(), c);

        let o = |s: &str| parse_override(s).unwrap();
        let Config::Sweep(sw) =
            parse_config_with(text, &[o("sweep.values=[1.0]"), o("pulse.detuning=2.0")]).unwrap()
        else {
            panic!()
        };
        assert_eq!(sw.values, vec![1.0]);
        assert_eq!(sw.base.pulse.detuning, 2.0);
        assert!(parse_config(&text.replace("\"margin\"", "\"mragin\"")).is_err());
        assert!(parse_config(&text.replace("values = [100.0, 200.0]", "values = []")).is_err());
    }
}
