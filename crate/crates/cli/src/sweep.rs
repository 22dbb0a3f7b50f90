//! One-parameter sweeps over a config.

use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::config::{check_sweep, ConfigError, Experiment, ExperimentConfig, Format, RunMode, SweepSection};
use crate::run::{run_single, OutputFile, RunResult};
use crate::table::{json_num, mixed_csv};

/// Parse a number or a product/quotient involving `pi`, such as `pi/2`,
/// `-pi/3`, `2*pi` or `1.5e-3`.
pub fn parse_value(s: &str) -> Result<f64, ConfigError> {
    let bad = || ConfigError::Invalid(format!("cannot read `{s}` as a number"));
    let t = s.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, t),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let factor = |f: &str| -> Result<f64, ConfigError> {
        match f.trim() {
            "pi" | "PI" => Ok(std::f64::consts::PI),
            x => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    let mut parts = body.split('/');
    let num = parts.next().ok_or_else(bad)?;
    let mut value = num.split('*').map(factor).try_fold(1.0, |acc, f| f.map(|f| acc * f))?;
    for den in parts {
        value /= den.split('*').map(factor).try_fold(1.0, |acc, f| f.map(|f| acc * f))?;
    }
    if value.is_finite() {
        Ok(sign * value)
    } else {
        Err(bad())
    }
}

/// Comma-separated list of [`parse_value`] items.
pub fn parse_values(s: &str) -> Result<Vec<f64>, ConfigError> {
    let v = s.split(',').filter(|x| !x.trim().is_empty()).map(parse_value).collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err(ConfigError::Invalid("empty value list".into()));
    }
    Ok(v)
}

fn set_path(root: &mut toml::Value, path: &str, x: toml::Value) -> Result<(), ConfigError> {
    let mut keys: Vec<&str> = path.split('.').collect();
    let last = keys
        .pop()
        .filter(|k| !k.is_empty())
        .ok_or_else(|| ConfigError::Invalid(format!("bad parameter path `{path}`")))?;
    let mut node = root;
    for k in keys {
        let table =
            node.as_table_mut().ok_or_else(|| ConfigError::Invalid(format!("`{path}` does not name a field")))?;
        node = table.entry(k.to_string()).or_insert_with(|| toml::Value::Table(Default::default()));
    }
    let table = node.as_table_mut().ok_or_else(|| ConfigError::Invalid(format!("`{path}` does not name a field")))?;
    if let Some(old) = table.get(last) {
        if !(old.is_float() || old.is_integer()) {
            return Err(ConfigError::Invalid(format!("`{path}` is not a numeric field")));
        }
    }
    table.insert(last.to_string(), x);
    Ok(())
}

/// The experiment for one sweep point: `base` with `path` set to `x`.
pub fn point_config(base: &ExperimentConfig, mode: RunMode, path: &str, x: f64) -> Result<Experiment, ConfigError> {
    if path == "mode" || path == "preset" {
        return Err(ConfigError::Invalid(format!("`{path}` is not a numeric field")));
    }
    let root = toml::Value::try_from(base).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let attempt = |v: toml::Value| -> Result<ExperimentConfig, ConfigError> {
        let mut r = root.clone();
        set_path(&mut r, path, v)?;
        let mut c: ExperimentConfig = r.try_into().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        c.mode = Some(mode);
        c.sweep = None;
        Ok(c)
    };
    let c = match attempt(toml::Value::Float(x)) {
        Ok(c) => c,
        // Integer fields such as grid.nz.
        Err(float_err) if x.fract() == 0.0 && x.abs() < 9.0e15 => {
            attempt(toml::Value::Integer(x as i64)).map_err(|_| float_err)?
        }
        Err(e) => return Err(e),
    };
    c.validate()
}

/// One sweep row: the parameter value, the requested metrics (NaN on
/// failure) and the error message if the point failed.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub metrics: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub param: String,
    pub metrics: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut header = vec![self.param.clone()];
        header.extend(self.metrics.iter().cloned());
        header.push("error".into());
        let rows: Vec<(Vec<f64>, String)> = self
            .rows
            .iter()
            .map(|r| {
                let mut nums = vec![r.value];
                nums.extend(&r.metrics);
                (nums, r.error.clone().unwrap_or_default())
            })
            .collect();
        mixed_csv(&header, &rows)
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut obj = Map::new();
                obj.insert(self.param.clone(), json_num(r.value));
                for (k, v) in self.metrics.iter().zip(&r.metrics) {
                    obj.insert(k.clone(), json_num(*v));
                }
                obj.insert("error".into(), r.error.clone().map_or(Value::Null, Value::String));
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("sweep serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> OutputFile {
        match format {
            Format::Csv => OutputFile { name: "sweep.csv".into(), contents: self.to_csv() },
            Format::Json => OutputFile { name: "sweep.json".into(), contents: self.to_json() },
        }
    }
}

/// Worker count from `SIM_THREADS`; `None` lets rayon decide.
pub fn thread_cap() -> Option<usize> {
    std::env::var("SIM_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0)
}

/// Evaluate every point of the sweep concurrently. The path is checked on
/// the first value; later per-point failures are recorded in their rows.
pub fn run_sweep(base: &ExperimentConfig, sweep: &SweepSection) -> Result<SweepTable, ConfigError> {
    check_sweep(sweep)?;
    point_config(base, sweep.base_mode, &sweep.param, sweep.values[0])?;
    let eval = |&x: &f64| -> SweepRow {
        let result = point_config(base, sweep.base_mode, &sweep.param, x)
            .map_err(|e| e.to_string())
            .and_then(|e| run_single(&e, false).map_err(|e| e.to_string()));
        match result {
            Ok(r) => SweepRow { value: x, metrics: pick(&r, &sweep.metrics), error: None },
            Err(msg) => SweepRow { value: x, metrics: vec![f64::NAN; sweep.metrics.len()], error: Some(msg) },
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| ConfigError::Invalid(format!("thread pool: {e}")))?;
    let rows = pool.install(|| sweep.values.par_iter().map(eval).collect());
    Ok(SweepTable { param: sweep.param.clone(), metrics: sweep.metrics.clone(), rows })
}

fn pick(r: &RunResult, names: &[String]) -> Vec<f64> {
    names.iter().map(|n| r.metric(n).unwrap_or(f64::NAN)).collect()
}
