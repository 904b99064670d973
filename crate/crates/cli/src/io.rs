//! Model and instance loading, run manifests, and output writing.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use xtree_core::Ensemble;

use crate::error::{invalid, CliResult};

pub fn load_model(path: &Path) -> CliResult<Ensemble> {
    Ensemble::load(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Instances from a CSV file (one per row), or one instance from a JSON array.
/// The flag says which form was read.
pub fn load_instances(path: &Path, skip_header: bool) -> CliResult<(Vec<Vec<f64>>, bool)> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    if !is_csv(path) {
        let x: Vec<f64> = serde_json::from_str(&text)
            .map_err(|e| invalid(format!("{}: expected a JSON array of numbers: {e}", path.display())))?;
        return Ok((vec![x], false));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(skip_header)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let row = record
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| invalid(format!("{}: row {}: {e}", path.display(), r + 1)))?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(invalid(format!("{}: no instances", path.display())));
    }
    Ok((rows, true))
}

/// Exactly one instance, from either input form.
pub fn load_one_instance(path: &Path, skip_header: bool) -> CliResult<Vec<f64>> {
    let (mut rows, _) = load_instances(path, skip_header)?;
    if rows.len() != 1 {
        return Err(invalid(format!(
            "{}: expected one instance, found {}",
            path.display(),
            rows.len()
        )));
    }
    Ok(rows.remove(0))
}

/// What produced an output file. Everything except `wall_times` is a function
/// of the inputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub flags: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_times: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(command: &str, flags: &impl Serialize, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            flags: serde_json::to_value(flags).expect("flags serialize"),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_times: BTreeMap::new(),
        }
    }

    /// Runs `f` and records its wall time under `phase`.
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.wall_times.entry(phase.to_string()).or_default() += start.elapsed().as_secs_f64();
        out
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("manifest serializes")
    }

    /// The `# manifest: {...}` first line of CSV outputs.
    pub fn csv_line(&self) -> String {
        format!("# manifest: {}\n", serde_json::to_string(self).expect("manifest serializes"))
    }
}

/// Writes to `path`, or to stdout when it is absent.
pub fn emit(path: Option<&PathBuf>, content: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| invalid(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| invalid(format!("stdout: {e}")))
        }
    }
}

/// JSON document with the manifest as its first field.
pub fn json_document(manifest: &RunManifest, body: Value) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("manifest".into(), manifest.to_value());
    if let Value::Object(fields) = body {
        doc.extend(fields);
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("document serializes");
    text.push('\n');
    text
}

/// CSV text with the manifest line on top.
pub fn csv_document(manifest: &RunManifest, header: &[&str], rows: &[Vec<String>]) -> CliResult<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).map_err(|e| invalid(e.to_string()))?;
    for row in rows {
        writer.write_record(row).map_err(|e| invalid(e.to_string()))?;
    }
    let body = writer.into_inner().map_err(|e| invalid(e.to_string()))?;
    Ok(manifest.csv_line() + &String::from_utf8(body).expect("csv output is UTF-8"))
}

/// Shortest round-trip text, in scientific notation for very small or large
/// magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e6).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}
