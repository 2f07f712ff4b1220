//! Report files written next to each other in one directory:
//!
//! - `records.csv`: one row per sweep point × trial. Columns are the point
//!   parameters, then `point,trial,seed`, then the metrics, then `error`.
//! - `summary.json`: metadata and per-point metric summaries.
//! - `long.csv`: `param,x,metric,y,series,point`, one line per row and metric.
//!
//! Numbers carry at most 12 significant digits.

use std::fs;
use std::path::Path;

use serde_json::json;

use super::experiment::RecordSet;
use crate::error::Result;

pub const RECORDS_FILE: &str = "records.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const LONG_FILE: &str = "long.csv";

/// Shortest decimal form of `x` rounded to 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let a = rounded.abs();
    if rounded == 0.0 {
        "0".into()
    } else if !(1e-6..1e15).contains(&a) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

/// Rounded JSON number; `null` for NaN and infinities.
fn json_num(x: f64) -> serde_json::Value {
    fmt_num(x)
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .and_then(serde_json::Number::from_f64)
        .map_or(serde_json::Value::Null, serde_json::Value::Number)
}

pub fn records_header(rs: &RecordSet) -> Vec<String> {
    let mut h: Vec<String> = rs.param_names.clone();
    h.extend(["point", "trial", "seed"].map(String::from));
    h.extend(rs.metric_names.iter().cloned());
    h.push("error".into());
    h
}

fn records_csv(rs: &RecordSet) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| crate::error::Error::Io(e.to_string());
    w.write_record(records_header(rs)).map_err(io)?;
    for r in &rs.rows {
        let mut line: Vec<String> = r.params.iter().map(|&p| fmt_num(p)).collect();
        line.push(r.point.to_string());
        line.push(r.trial.to_string());
        line.push(r.seed.to_string());
        line.extend(r.metrics.iter().map(|&m| fmt_num(m)));
        line.push(r.error.clone().unwrap_or_default());
        w.write_record(&line).map_err(io)?;
    }
    w.into_inner().map_err(|e| crate::error::Error::Io(e.to_string()))
}

/// The first parameter that takes more than one value, or the first parameter.
fn swept_param(rs: &RecordSet) -> usize {
    (0..rs.param_names.len())
        .find(|&i| {
            let first = rs.rows.first().map(|r| r.params[i]);
            rs.rows.iter().any(|r| Some(r.params[i]) != first)
        })
        .unwrap_or(0)
}

fn long_csv(rs: &RecordSet) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| crate::error::Error::Io(e.to_string());
    w.write_record(["param", "x", "metric", "y", "series", "point"]).map_err(io)?;
    if !rs.param_names.is_empty() {
        let p = swept_param(rs);
        for r in &rs.rows {
            for (name, &y) in rs.metric_names.iter().zip(&r.metrics) {
                w.write_record([
                    rs.param_names[p].clone(),
                    fmt_num(r.params[p]),
                    name.clone(),
                    fmt_num(y),
                    r.trial.to_string(),
                    r.point.to_string(),
                ])
                .map_err(io)?;
            }
        }
    }
    w.into_inner().map_err(|e| crate::error::Error::Io(e.to_string()))
}

fn summary_json(rs: &RecordSet) -> Result<String> {
    let points: Vec<serde_json::Value> = rs
        .summaries
        .iter()
        .map(|s| {
            let params: serde_json::Map<String, serde_json::Value> = rs
                .param_names
                .iter()
                .zip(&s.params)
                .map(|(k, &v)| (k.clone(), json_num(v)))
                .collect();
            let metrics: serde_json::Map<String, serde_json::Value> = s
                .metrics
                .iter()
                .map(|m| {
                    (
                        m.name.clone(),
                        json!({
                            "count": m.count,
                            "mean": json_num(m.mean),
                            "median": json_num(m.median),
                            "q05": json_num(m.q05),
                            "q95": json_num(m.q95),
                        }),
                    )
                })
                .collect();
            json!({
                "point": s.point,
                "params": params,
                "trials": s.trials,
                "errors": s.errors,
                "metrics": metrics,
            })
        })
        .collect();
    let doc = json!({
        "metadata": {
            "kind": rs.metadata.kind.name(),
            "config_hash": rs.metadata.config_hash,
            "tool_version": rs.metadata.tool_version,
            "timestamp": rs.metadata.timestamp,
            "master_seed": rs.metadata.master_seed.to_string(),
            "trials": rs.metadata.trials,
        },
        "param_names": rs.param_names,
        "metric_names": rs.metric_names,
        "error_rows": rs.error_rows(),
        "points": points,
    });
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| crate::error::Error::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Writes the three report files into `dir`, creating it if needed.
pub fn emit_report(rs: &RecordSet, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(RECORDS_FILE), records_csv(rs)?)?;
    fs::write(dir.join(SUMMARY_FILE), summary_json(rs)?)?;
    fs::write(dir.join(LONG_FILE), long_csv(rs)?)?;
    Ok(())
}
