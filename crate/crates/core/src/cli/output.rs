//! File formats: CSV tables with fixed headers and JSON run manifests.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PREDICT_HEADER: [&str; 11] = [
    "b",
    "d",
    "m",
    "rho",
    "regime",
    "t_root",
    "t_predicted",
    "term_leading",
    "term_m",
    "term_correction",
    "warnings",
];
pub const SAMPLES_HEADER: [&str; 5] = ["replica", "hit_time", "censoring", "events", "peak_pop"];
pub const BALLOT_HEADER: [&str; 7] = ["lambda", "n", "p_mc", "std_err", "normalized", "p_exact", "note"];
pub const FIG1A_HEADER: [&str; 3] = ["rho", "x0", "r"];
pub const FIG1B_HEADER: [&str; 3] = ["m", "t_root", "t_expansion"];
pub const FIG2_HEADER: [&str; 2] = ["rho", "t_root"];

/// Provenance written next to (or inside) every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub subcommand: String,
    /// Every resolved flag, including defaults and config-file values.
    pub config: BTreeMap<String, String>,
    pub master_seed: Option<u64>,
    pub rng_name: Option<String>,
    pub seed_rule: Option<String>,
    pub started_at: String,
    pub finished_at: String,
    pub hypotheses_warnings: Vec<String>,
}

pub fn timestamp() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn new(subcommand: &str, args: &impl Serialize, started_at: String) -> Result<Self> {
        Ok(Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            config: flatten_args(args)?,
            master_seed: None,
            rng_name: None,
            seed_rule: None,
            started_at,
            finished_at: String::new(),
            hypotheses_warnings: Vec::new(),
        })
    }

    pub fn with_rng(mut self, master_seed: u64) -> Self {
        self.master_seed = Some(master_seed);
        self.rng_name = Some(crate::simulator::RNG_NAME.to_string());
        self.seed_rule = Some(crate::simulator::SEED_RULE.to_string());
        self
    }

    pub fn finish(mut self) -> Self {
        self.finished_at = timestamp();
        self
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(path, json + "\n").map_err(|e| io_error(path, e))
    }
}

fn flatten_args(args: &impl Serialize) -> Result<BTreeMap<String, String>> {
    fn walk(prefix: &str, v: &serde_json::Value, out: &mut BTreeMap<String, String>) {
        match v {
            serde_json::Value::Object(map) => {
                for (k, v) in map {
                    // flattened groups (model flags) share the top-level namespace
                    let key = if v.is_object() { prefix.to_string() } else { k.replace('_', "-") };
                    walk(&key, v, out);
                }
            }
            serde_json::Value::Null => {}
            serde_json::Value::String(s) => {
                out.insert(prefix.to_string(), s.clone());
            }
            serde_json::Value::Array(items) => {
                let joined: Vec<String> = items.iter().map(|i| i.to_string().trim_matches('"').to_string()).collect();
                out.insert(prefix.to_string(), joined.join(","));
            }
            other => {
                out.insert(prefix.to_string(), other.to_string());
            }
        }
    }
    let value = serde_json::to_value(args).map_err(|e| Error::Config(e.to_string()))?;
    let mut out = BTreeMap::new();
    walk("", &value, &mut out);
    Ok(out)
}

pub fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Sidecar manifest path: `out.csv` -> `out.csv.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Formats a float in its shortest round-trip form.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Writes a header and rows as comma-separated values with LF line endings.
pub fn write_table<W: Write>(sink: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    let wrap = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Io(format!("row has {} fields, header has {}", row.len(), header.len())));
        }
        w.write_record(row).map_err(wrap)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table_file(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
    write_table(std::io::BufWriter::new(file), header, rows).map_err(|e| io_error(path, e))
}

/// A parsed CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("missing column {name}")))
    }

    /// Column `name` parsed as floats; empty cells become `None`.
    pub fn floats(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let c = self.column(name)?;
        self.rows
            .iter()
            .map(|r| {
                let cell = &r[c];
                if cell.is_empty() {
                    return Ok(None);
                }
                cell.parse().map(Some).map_err(|e| Error::Config(format!("column {name}: {cell:?}: {e}")))
            })
            .collect()
    }
}

/// Reads a CSV table and checks that its header is exactly `expected`.
pub fn read_table(path: &Path, expected: &[&str]) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_path(path).map_err(|e| io_error(path, e))?;
    let header: Vec<String> = r.headers().map_err(|e| io_error(path, e))?.iter().map(String::from).collect();
    if header != expected {
        return Err(Error::Config(format!(
            "{}: header {:?} does not match {:?}",
            path.display(),
            header,
            expected
        )));
    }
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| io_error(path, e))?;
    Ok(Table { header, rows })
}
