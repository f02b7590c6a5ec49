//! Report emission: digests, atomic writes, and the CSV renderings.

use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::schema::ReportFile;
use crate::CliError;

/// Lowercase hex SHA-256 of the exact input bytes (file contents for
/// `--input` commands, the canonical parameter string otherwise).
pub fn digest_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Writes atomically: a temporary sibling file is renamed over the target
/// so readers never observe a partial report.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    let failure = |what: &str, err: std::io::Error| {
        CliError::Validation(format!("cannot {what} {}: {err}", path.display()))
    };
    let mut file = fs::File::create(&tmp).map_err(|e| failure("create output file near", e))?;
    file.write_all(bytes)
        .and_then(|_| file.sync_all())
        .map_err(|e| failure("write output file", e))?;
    drop(file);
    fs::rename(&tmp, path).map_err(|e| failure("finalize output file", e))
}

/// Emits to the output path when given, otherwise to stdout.
pub fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// 17-significant-digit scientific notation, enough to round-trip f64.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Shortest decimal form that round-trips, matching the JSON encoding.
fn shortest_float(x: f64) -> String {
    serde_json::Number::from_f64(x)
        .map(|n| n.to_string())
        .unwrap_or_else(|| x.to_string())
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn flatten_value(prefix: &str, value: &serde_json::Value, rows: &mut Vec<(String, String)>) {
    match value {
        serde_json::Value::Object(map) => {
            for (key, inner) in map {
                let next = if prefix.is_empty() {
                    key.clone()
                } else {
                    format!("{prefix}.{key}")
                };
                flatten_value(&next, inner, rows);
            }
        }
        serde_json::Value::Array(items) => {
            for (index, inner) in items.iter().enumerate() {
                flatten_value(&format!("{prefix}[{index}]"), inner, rows);
            }
        }
        serde_json::Value::Null => rows.push((prefix.to_string(), String::new())),
        serde_json::Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
        serde_json::Value::Number(num) => rows.push((prefix.to_string(), num.to_string())),
        serde_json::Value::String(s) => rows.push((prefix.to_string(), csv_field(s))),
    }
}

/// Renders a report as `#`-prefixed metadata lines followed by flattened
/// `key,value` rows in deterministic key order.
pub fn report_to_csv(report: &ReportFile) -> String {
    let mut text = String::new();
    text.push_str(&format!("# command: {}\n", report.command));
    text.push_str(&format!("# input_digest: {}\n", report.input_digest));
    let c = &report.conventions;
    text.push_str(&format!("# tolerance: {}\n", shortest_float(c.tolerance)));
    if let Some(seed) = c.seed {
        text.push_str(&format!("# seed: {seed}\n"));
    }
    text.push_str(&format!("# pairing_sign: {}\n", c.pairing_sign));
    text.push_str(&format!("# antisym_extraction: {}\n", c.antisym_extraction));
    text.push_str(&format!("# eigenvalue_order: {}\n", c.eigenvalue_order));
    text.push_str("key,value\n");
    let mut rows = Vec::new();
    flatten_value("", &report.payload, &mut rows);
    for (key, value) in rows {
        text.push_str(&format!("{},{}\n", csv_field(&key), value));
    }
    text
}

/// Renders a parameter sweep as metadata, a header row, and one line of
/// 17-significant-digit values per sample.
pub fn sweep_to_csv(
    report: &ReportFile,
    quantity: &str,
    columns: &[&str],
    rows: &[Vec<f64>],
) -> String {
    let mut text = String::new();
    text.push_str(&format!("# command: {}\n", report.command));
    text.push_str(&format!("# input_digest: {}\n", report.input_digest));
    text.push_str(&format!(
        "# tolerance: {}\n",
        shortest_float(report.conventions.tolerance)
    ));
    text.push_str(&format!("# quantity: {quantity}\n"));
    text.push_str(&columns.join(","));
    text.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|x| float17(*x)).collect();
        text.push_str(&line.join(","));
        text.push('\n');
    }
    text
}

/// Renders the report envelope as pretty JSON with a trailing newline.
pub fn report_to_json(report: &ReportFile) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|err| CliError::Validation(format!("cannot serialize report: {err}")))?;
    text.push('\n');
    Ok(text)
}
