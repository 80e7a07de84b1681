//! Run configuration: a TOML document with four flat sections.
//!
//! ```toml
//! [scenario]
//! name = "dumbbell"      # round_sphere | bump_sphere | dumbbell
//! grid_n = 256
//! neck = 0.5             # scenario parameters sit beside the name
//! w = 0.4
//!
//! [flow]
//! cfl_factor = 0.2
//! t_end = 0.25
//!
//! [verify]
//! checks = ["area_law", "monotonicity"]   # default: all
//! seed = 0
//!
//! [output]
//! dir = "out"
//! csv = true
//! json = true
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use cheeger_flow::{Error as CoreError, FlowSettings, Scenario, ScenarioSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};

pub const DEFAULT_GRID: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verification {
    AreaLaw,
    #[serde(rename = "residual_12a")]
    Residual12a,
    #[serde(rename = "residual_12b")]
    Residual12b,
    #[serde(rename = "residual_heat_9")]
    ResidualHeat9,
    #[serde(rename = "identities_13")]
    Identities13,
    Monotonicity,
    Papasoglu,
    Stationarity,
    Convergence,
}

impl Verification {
    pub const ALL: [Verification; 9] = [
        Verification::AreaLaw,
        Verification::Residual12a,
        Verification::Residual12b,
        Verification::ResidualHeat9,
        Verification::Identities13,
        Verification::Monotonicity,
        Verification::Papasoglu,
        Verification::Stationarity,
        Verification::Convergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Verification::AreaLaw => "area_law",
            Verification::Residual12a => "residual_12a",
            Verification::Residual12b => "residual_12b",
            Verification::ResidualHeat9 => "residual_heat_9",
            Verification::Identities13 => "identities_13",
            Verification::Monotonicity => "monotonicity",
            Verification::Papasoglu => "papasoglu",
            Verification::Stationarity => "stationarity",
            Verification::Convergence => "convergence",
        }
    }

    /// Parses a comma-separated list, keeping registry order and dropping repeats.
    pub fn parse_list<S: AsRef<str>>(names: &[S]) -> Result<Vec<Self>, ConfigError> {
        let mut out = Vec::new();
        for n in names {
            let v: Verification = n.as_ref().trim().parse()?;
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out.sort();
        Ok(out)
    }
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Verification {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Verification::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| ConfigError::UnknownVerification {
                name: s.to_string(),
                accepted: names(Verification::ALL.iter().map(|v| v.name())),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative deviation from `A(0) − 8πt`.
    pub area_law: f64,
    /// Residual sup norm per unit of `max(1, sup |K|)`.
    pub residual: f64,
    pub monotonicity: f64,
    pub stationarity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            area_law: 1e-5,
            residual: 5e-3,
            monotonicity: 1e-6,
            stationarity: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    pub verify: Vec<Verification>,
    pub seed: u64,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
    #[serde(skip)]
    pub emit_csv: bool,
    #[serde(skip)]
    pub emit_json: bool,
}

impl RunConfig {
    pub fn new(scenario: ScenarioSpec) -> Self {
        Self {
            scenario,
            verify: Verification::ALL.to_vec(),
            seed: 0,
            tolerances: Tolerances::default(),
            output_dir: None,
            emit_csv: true,
            emit_json: true,
        }
    }

    /// Checks every range by building the initial profile and step control.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let spec = &self.scenario;
        spec.build().map_err(|e| core_error("scenario", e))?;
        spec.prepare().map_err(|e| core_error("flow", e))?;
        for (key, value) in [
            ("verify.area_law_tol", self.tolerances.area_law),
            ("verify.residual_tol", self.tolerances.residual),
            ("verify.monotonicity_tol", self.tolerances.monotonicity),
            ("verify.stationarity_tol", self.tolerances.stationarity),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ConfigError::Range {
                    key: key.to_string(),
                    value: value.to_string(),
                    range: "(0, ∞)".to_string(),
                });
            }
        }
        Ok(())
    }

    /// Renders the configuration in the same format [`parse_config`] reads.
    pub fn to_toml(&self) -> String {
        let mut scenario = Table::new();
        scenario.insert(
            "name".into(),
            Value::String(self.scenario.name.name().into()),
        );
        scenario.insert("grid_n".into(), Value::Integer(self.scenario.grid_n as i64));
        for (k, v) in &self.scenario.parameters {
            scenario.insert(k.clone(), Value::Float(*v));
        }
        let f = &self.scenario.flow;
        let mut flow = Table::new();
        for (k, v) in [
            ("cfl_factor", f.cfl_factor),
            ("dt_min", f.dt_min),
            ("dt_max", f.dt_max),
            ("t_end", f.t_end),
            ("min_area_fraction", f.min_area_fraction),
            ("max_curvature", f.max_curvature),
        ] {
            flow.insert(k.into(), Value::Float(v));
        }
        let mut verify = Table::new();
        verify.insert(
            "checks".into(),
            Value::Array(
                self.verify
                    .iter()
                    .map(|v| Value::String(v.name().into()))
                    .collect(),
            ),
        );
        verify.insert("seed".into(), Value::Integer(self.seed as i64));
        let t = &self.tolerances;
        for (k, v) in [
            ("area_law_tol", t.area_law),
            ("residual_tol", t.residual),
            ("monotonicity_tol", t.monotonicity),
            ("stationarity_tol", t.stationarity),
        ] {
            verify.insert(k.into(), Value::Float(v));
        }
        let mut output = Table::new();
        if let Some(dir) = &self.output_dir {
            output.insert("dir".into(), Value::String(dir.display().to_string()));
        }
        output.insert("csv".into(), Value::Boolean(self.emit_csv));
        output.insert("json".into(), Value::Boolean(self.emit_json));

        let mut doc = Table::new();
        doc.insert("scenario".into(), Value::Table(scenario));
        doc.insert("flow".into(), Value::Table(flow));
        doc.insert("verify".into(), Value::Table(verify));
        doc.insert("output".into(), Value::Table(output));
        toml::to_string(&doc).expect("a plain table always serializes")
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed configuration: {0}")]
    Syntax(String),
    #[error("unknown section `[{section}]`; accepted: {accepted}")]
    UnknownSection { section: String, accepted: String },
    #[error("unknown key `{key}`; accepted: {accepted}")]
    UnknownKey { key: String, accepted: String },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("`{key}` must be {expected}")]
    Type { key: String, expected: &'static str },
    #[error("`{key}` = {value} is outside {range}")]
    Range {
        key: String,
        value: String,
        range: String,
    },
    #[error("`scenario.name` = \"{name}\" is not a registered scenario; accepted: {accepted}")]
    UnknownScenario { name: String, accepted: String },
    #[error("unknown verification `{name}`; accepted: {accepted}")]
    UnknownVerification { name: String, accepted: String },
    #[error("{section}: {source}")]
    Invalid {
        section: &'static str,
        source: CoreError,
    },
}

fn names<'a>(it: impl Iterator<Item = &'a str>) -> String {
    it.collect::<Vec<_>>().join(", ")
}

fn core_error(section: &'static str, e: CoreError) -> ConfigError {
    match e {
        CoreError::InvalidParameter { name, value, range } => ConfigError::Range {
            key: format!("{section}.{name}"),
            value: value.to_string(),
            range,
        },
        CoreError::GridTooCoarse { n_intervals, min } => ConfigError::Range {
            key: "scenario.grid_n".to_string(),
            value: n_intervals.to_string(),
            range: format!("[{min}, ∞)"),
        },
        source => ConfigError::Invalid { section, source },
    }
}

const SECTIONS: [&str; 4] = ["scenario", "flow", "verify", "output"];
const FLOW_KEYS: [&str; 6] = [
    "cfl_factor",
    "dt_min",
    "dt_max",
    "t_end",
    "min_area_fraction",
    "max_curvature",
];
const VERIFY_KEYS: [&str; 6] = [
    "checks",
    "seed",
    "area_law_tol",
    "residual_tol",
    "monotonicity_tol",
    "stationarity_tol",
];
const OUTPUT_KEYS: [&str; 3] = ["dir", "csv", "json"];

struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
}

impl<'a> Section<'a> {
    fn get(&self, key: &str) -> Option<&'a Value> {
        self.table.and_then(|t| t.get(key))
    }

    fn key(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn check_keys(&self, accepted: &[&str]) -> Result<(), ConfigError> {
        if let Some(t) = self.table {
            if let Some(k) = t.keys().find(|k| !accepted.contains(&k.as_str())) {
                return Err(ConfigError::UnknownKey {
                    key: self.key(k),
                    accepted: names(accepted.iter().copied()),
                });
            }
        }
        Ok(())
    }

    fn float(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Float(v)) => Ok(*v),
            Some(Value::Integer(v)) => Ok(*v as f64),
            Some(_) => Err(ConfigError::Type {
                key: self.key(key),
                expected: "a number",
            }),
        }
    }

    fn unsigned(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Integer(v)) => u64::try_from(*v).map_err(|_| ConfigError::Range {
                key: self.key(key),
                value: v.to_string(),
                range: "[0, 2^63)".to_string(),
            }),
            Some(_) => Err(ConfigError::Type {
                key: self.key(key),
                expected: "a non-negative integer",
            }),
        }
    }

    fn boolean(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Boolean(b)) => Ok(*b),
            Some(_) => Err(ConfigError::Type {
                key: self.key(key),
                expected: "true or false",
            }),
        }
    }

    fn string(&self, key: &str) -> Result<Option<&'a str>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(ConfigError::Type {
                key: self.key(key),
                expected: "a string",
            }),
        }
    }
}

/// Parses and validates a configuration document, applying defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let doc: Table = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    for (k, v) in &doc {
        if !SECTIONS.contains(&k.as_str()) {
            return Err(ConfigError::UnknownSection {
                section: k.clone(),
                accepted: names(SECTIONS.into_iter()),
            });
        }
        if !v.is_table() {
            return Err(ConfigError::Type {
                key: k.clone(),
                expected: "a table",
            });
        }
    }
    let section = |name: &'static str| Section {
        name,
        table: doc.get(name).and_then(Value::as_table),
    };

    let sc = section("scenario");
    let name = sc
        .string("name")?
        .ok_or_else(|| ConfigError::Missing("scenario.name".into()))?;
    let scenario: Scenario = name.parse().map_err(|_| ConfigError::UnknownScenario {
        name: name.to_string(),
        accepted: names(Scenario::ALL.iter().map(|s| s.name())),
    })?;
    let schema = scenario.parameters();
    let mut accepted = vec!["name", "grid_n"];
    accepted.extend(schema.iter().map(|p| p.name));
    sc.check_keys(&accepted)?;
    let grid_n = sc.unsigned("grid_n", DEFAULT_GRID as u64)?;
    let mut spec = ScenarioSpec::new(scenario, usize::try_from(grid_n).unwrap_or(usize::MAX));
    for p in schema {
        spec.parameters
            .insert(p.name.to_string(), sc.float(p.name, p.default)?);
    }

    let fl = section("flow");
    fl.check_keys(&FLOW_KEYS)?;
    let d = FlowSettings::default();
    spec.flow = FlowSettings {
        cfl_factor: fl.float("cfl_factor", d.cfl_factor)?,
        dt_min: fl.float("dt_min", d.dt_min)?,
        dt_max: fl.float("dt_max", d.dt_max)?,
        t_end: fl.float("t_end", d.t_end)?,
        min_area_fraction: fl.float("min_area_fraction", d.min_area_fraction)?,
        max_curvature: fl.float("max_curvature", d.max_curvature)?,
    };

    let ve = section("verify");
    ve.check_keys(&VERIFY_KEYS)?;
    let verify = match ve.get("checks") {
        None => Verification::ALL.to_vec(),
        Some(Value::Array(items)) => {
            let list = items
                .iter()
                .map(|v| {
                    v.as_str().ok_or(ConfigError::Type {
                        key: "verify.checks".into(),
                        expected: "a list of strings",
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Verification::parse_list(&list)?
        }
        Some(_) => {
            return Err(ConfigError::Type {
                key: "verify.checks".into(),
                expected: "a list of strings",
            })
        }
    };
    let t = Tolerances::default();
    let tolerances = Tolerances {
        area_law: ve.float("area_law_tol", t.area_law)?,
        residual: ve.float("residual_tol", t.residual)?,
        monotonicity: ve.float("monotonicity_tol", t.monotonicity)?,
        stationarity: ve.float("stationarity_tol", t.stationarity)?,
    };

    let out = section("output");
    out.check_keys(&OUTPUT_KEYS)?;
    let config = RunConfig {
        scenario: spec,
        verify,
        seed: ve.unsigned("seed", 0)?,
        tolerances,
        output_dir: out.string("dir")?.map(PathBuf::from),
        emit_csv: out.boolean("csv", true)?,
        emit_json: out.boolean("json", true)?,
    };
    config.validate()?;
    Ok(config)
}
