use crate::config::{Format, RunConfig};
use anyhow::{Context, Result};
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One result table: `csv` carries the rows, `json` the full record.
pub struct Artifact {
    pub id: String,
    pub csv: String,
    pub json: Value,
}

pub fn csv_header(cfg: &RunConfig) -> String {
    format!("# qftorus {VERSION}\n# config {}\n# seed {}\n", cfg.hash(), cfg.seed)
}

pub fn json_document(cfg: &RunConfig, data: &Value) -> Value {
    json!({
        "tool": "qftorus",
        "version": VERSION,
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
        "data": data,
    })
}

/// Writes files into the output directory (with headers) and the payload to
/// stdout. Returns the paths written.
pub fn emit(cfg: &RunConfig, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if let Some(dir) = &cfg.output_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for a in artifacts {
            if cfg.format.csv() {
                let path = dir.join(format!("{}.csv", a.id));
                std::fs::write(&path, csv_header(cfg) + &a.csv).with_context(|| format!("cannot write {}", path.display()))?;
                written.push(path);
            }
            if cfg.format.json() {
                let path = dir.join(format!("{}.json", a.id));
                let text = serde_json::to_string_pretty(&json_document(cfg, &a.json))? + "\n";
                std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
                written.push(path);
            }
        }
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if cfg.format == Format::Csv {
        for a in artifacts {
            if artifacts.len() > 1 {
                writeln!(out, "# {}", a.id)?;
            }
            write!(out, "{}", a.csv)?;
        }
    } else if let [single] = artifacts {
        writeln!(out, "{}", serde_json::to_string_pretty(&single.json)?)?;
    } else {
        let all: Vec<&Value> = artifacts.iter().map(|a| &a.json).collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&all)?)?;
    }
    Ok(written)
}
