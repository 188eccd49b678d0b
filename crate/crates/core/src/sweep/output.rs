//! CSV tables with a `#` header echoing the config, and their JSON mirrors.
//!
//! Floats are written with 12 significant digits; the JSON mirror holds the
//! same rounded values, with `null` where the CSV has `NaN`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::{SweepConfig, TransientConfig};
use super::run::{SweepResult, TransientResult};
use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn fmt(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.11e}")
    }
}

/// The value a reader of the CSV sees.
fn rounded(x: f64) -> Value {
    if x.is_finite() {
        json!(fmt(x).parse::<f64>().unwrap_or(x))
    } else {
        Value::Null
    }
}

fn header(out: &mut String, title: &str, config: &str) {
    let _ = writeln!(out, "# qsync {VERSION} {title}");
    for line in config.lines() {
        let _ = writeln!(out, "# {line}");
    }
}

fn config_object(config: &str) -> Value {
    let map: serde_json::Map<String, Value> = config
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), Value::String(v.to_string())))
        .collect();
    Value::Object(map)
}

fn sweep_columns(result: &SweepResult) -> Vec<String> {
    let mut cols = vec!["delta".to_string(), "g".to_string()];
    cols.extend(result.measures.iter().map(|m| m.name().to_string()));
    cols.extend(["cutoff", "leakage", "residual", "error"].map(String::from));
    cols
}

pub fn sweep_csv(cfg: &SweepConfig, result: &SweepResult) -> String {
    let mut out = String::new();
    header(&mut out, "sweep", &cfg.to_config_string());
    let _ = writeln!(out, "{}", sweep_columns(result).join(","));
    for r in &result.rows {
        let mut fields = vec![fmt(r.delta), fmt(r.g)];
        fields.extend(r.values.iter().map(|&v| fmt(v)));
        fields.push(r.cutoff.map_or_else(|| "NaN".to_string(), |c| c.to_string()));
        fields.push(fmt(r.leakage));
        fields.push(fmt(r.residual));
        fields.push(r.error.clone().unwrap_or_default());
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

pub fn sweep_json(cfg: &SweepConfig, result: &SweepResult) -> String {
    let rows: Vec<Value> = result
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![rounded(r.delta), rounded(r.g)];
            row.extend(r.values.iter().map(|&v| rounded(v)));
            row.push(r.cutoff.map_or(Value::Null, |c| json!(c)));
            row.push(rounded(r.leakage));
            row.push(rounded(r.residual));
            row.push(r.error.clone().map_or(Value::Null, Value::String));
            Value::Array(row)
        })
        .collect();
    let doc = json!({
        "version": VERSION,
        "config": config_object(&cfg.to_config_string()),
        "columns": sweep_columns(result),
        "rows": rows,
    });
    serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n"
}

fn transient_columns(result: &TransientResult) -> Vec<String> {
    let mut cols: Vec<String> = ["t", "sx1", "sx2", "sp", "mi"].map(String::from).to_vec();
    cols.extend(result.extra.iter().map(|(n, _)| n.clone()));
    cols
}

fn transient_row(result: &TransientResult, i: usize) -> Vec<f64> {
    let mut row = vec![
        result.times[i],
        result.sx1.values[i],
        result.sx2.values[i],
        result.sp.values[i],
        result.mi[i],
    ];
    row.extend(result.extra.iter().map(|(_, v)| v[i]));
    row
}

pub fn transient_csv(cfg: &TransientConfig, result: &TransientResult) -> String {
    let mut out = String::new();
    header(&mut out, "transient", &cfg.to_config_string());
    let _ = writeln!(out, "{}", transient_columns(result).join(","));
    for i in 0..result.times.len() {
        let row: Vec<String> = transient_row(result, i).into_iter().map(fmt).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn transient_json(cfg: &TransientConfig, result: &TransientResult) -> String {
    let rows: Vec<Value> = (0..result.times.len())
        .map(|i| Value::Array(transient_row(result, i).into_iter().map(rounded).collect()))
        .collect();
    let doc = json!({
        "version": VERSION,
        "config": config_object(&cfg.to_config_string()),
        "columns": transient_columns(result),
        "rows": rows,
    });
    serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n"
}

/// Path of the JSON mirror next to a CSV output.
pub fn json_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes the CSV and, when given, the JSON mirror beside it.
pub fn write_outputs(path: &Path, csv: &str, json: Option<&str>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, csv)?;
    if let Some(json) = json {
        std::fs::write(json_path(path), json)?;
    }
    Ok(())
}

/// Data lines of a CSV, without the `#` header.
pub fn csv_body(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}
