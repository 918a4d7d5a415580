//! Reading back `verify` output: a text summary or a flat CSV table.

use std::io::{BufRead, Write};

use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

pub struct ParsedReport {
    pub samples: Vec<Map<String, Value>>,
    pub summary: Map<String, Value>,
}

pub fn parse_report(input: impl BufRead) -> CliResult<ParsedReport> {
    let mut samples = Vec::new();
    let mut summary = None;
    for (lineno, line) in input.lines().enumerate() {
        let line = line.map_err(|e| CliError::io("<report>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::Config(format!("report line {}: {msg}", lineno + 1));
        let value: Value = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        let Value::Object(obj) = value else {
            return Err(bad("not a JSON object".into()));
        };
        match obj.get("kind").and_then(Value::as_str) {
            Some("sample") => samples.push(obj),
            Some("summary") if summary.is_none() => summary = Some(obj),
            Some("summary") => return Err(bad("second summary record".into())),
            _ => return Err(bad("missing or unknown `kind`".into())),
        }
    }
    let summary = summary.ok_or_else(|| CliError::Config("report has no summary record".into()))?;
    Ok(ParsedReport { samples, summary })
}

/// Nested objects become dotted column names; arrays get index suffixes.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(a) if a.is_empty() => out.push((prefix.to_string(), String::new())),
        Value::Array(a) if a.iter().all(|x| !x.is_object()) => {
            if a.iter().all(Value::is_number) {
                for (i, x) in a.iter().enumerate() {
                    out.push((format!("{prefix}{i}"), x.to_string()));
                }
            } else {
                let parts: Vec<String> = a
                    .iter()
                    .map(|x| x.as_str().map_or(x.to_string(), str::to_string))
                    .collect();
                out.push((prefix.to_string(), parts.join(";")));
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}{i}"), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn write_csv(report: &ParsedReport, out: impl Write) -> CliResult<()> {
    let rows: Vec<Vec<(String, String)>> = report
        .samples
        .iter()
        .map(|s| {
            let mut row = Vec::new();
            flatten("", &Value::Object(s.clone()), &mut row);
            row
        })
        .collect();
    // Union of columns in first-seen order, so failed samples (no metrics)
    // still line up with evaluated ones.
    let mut header: Vec<String> = Vec::new();
    for row in &rows {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let csv_err = |e: csv::Error| CliError::Config(format!("writing CSV: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&header).map_err(csv_err)?;
    for row in &rows {
        let cells = header.iter().map(|h| {
            row.iter()
                .find(|(k, _)| k == h)
                .map_or("", |(_, v)| v.as_str())
        });
        w.write_record(cells).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io("<csv>", e))
}

pub fn render_text(report: &ParsedReport) -> String {
    let s = &report.summary;
    let get = |k: &str| {
        s.get(k).map_or("?".to_string(), |v| {
            v.as_str().map_or(v.to_string(), str::to_string)
        })
    };
    let mut text = format!(
        "{}: {} samples (seed {}), {} passed, {} failed, {} errors -> {}\n",
        get("example"),
        get("samples"),
        get("seed"),
        get("passed"),
        get("failed"),
        get("errors"),
        if s.get("pass") == Some(&Value::Bool(true)) {
            "PASS"
        } else {
            "FAIL"
        }
    );
    if let Some(Value::Object(e)) = s.get("extremes") {
        for (k, v) in e {
            text.push_str(&format!("  {k:<28} {v}\n"));
        }
    }
    for r in &report.samples {
        if r.get("pass") != Some(&Value::Bool(true)) {
            let failures = r.get("failures").map_or(String::new(), Value::to_string);
            text.push_str(&format!(
                "  sample {} fails {failures}\n",
                r.get("sample").map_or("?".into(), Value::to_string)
            ));
        }
    }
    text
}

pub fn report_passes(report: &ParsedReport) -> bool {
    report.summary.get("pass") == Some(&Value::Bool(true))
}
