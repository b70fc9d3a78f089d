//! Report emission: JSON documents with embedded provenance (config hash,
//! tolerances, grid ladder) so every output file is reproducible from the
//! config alone.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::Result;
use crate::testfn::Convention;

/// SHA-256 of the canonical JSON serialization of the config.
pub fn config_sha256(cfg: &RunConfig) -> Result<String> {
    let bytes = serde_json::to_vec(cfg)?;
    let digest = Sha256::digest(&bytes);
    Ok(format!("{digest:x}"))
}

/// Provenance block embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub convention: Convention,
    pub tolerance: f64,
    pub theta_max: f64,
    pub margin: f64,
    pub samples: usize,
    pub epsilon: f64,
    pub grid_ladder: Vec<(f64, usize)>,
}

impl Meta {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        Ok(Meta {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: config_sha256(cfg)?,
            convention: cfg.convention,
            tolerance: cfg.tolerance,
            theta_max: cfg.theta_max,
            margin: cfg.margin,
            samples: cfg.samples,
            epsilon: cfg.epsilon,
            grid_ladder: cfg.grid_ladder.clone(),
        })
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    kind: &'a str,
    meta: &'a Meta,
    result: &'a T,
}

/// Writes `{kind, meta, result}` as pretty JSON; serde struct field order
/// makes identical inputs produce byte-identical files.
pub fn write_report<T: Serialize, P: AsRef<Path>>(
    path: P,
    kind: &str,
    meta: &Meta,
    result: &T,
) -> Result<()> {
    let doc = Report { kind, meta, result };
    let mut bytes = serde_json::to_vec_pretty(&doc)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes)?;
    Ok(())
}

/// One line of a report-directory summary.
#[derive(Debug, Clone, Serialize)]
pub struct ReportSummary {
    pub file: PathBuf,
    pub kind: String,
    pub config_sha256: String,
}

/// Scans a directory for report JSON files and lists their kind and
/// config hash, in filename order.
pub fn summarize_dir<P: AsRef<Path>>(dir: P) -> Result<Vec<ReportSummary>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    let mut out = Vec::new();
    for f in files {
        let Ok(bytes) = std::fs::read(&f) else { continue };
        let Ok(v) = serde_json::from_slice::<serde_json::Value>(&bytes) else { continue };
        let kind = v.get("kind").and_then(|k| k.as_str());
        let hash = v
            .get("meta")
            .and_then(|m| m.get("config_sha256"))
            .and_then(|h| h.as_str());
        if let (Some(kind), Some(hash)) = (kind, hash) {
            out.push(ReportSummary {
                file: f,
                kind: kind.to_string(),
                config_sha256: hash.to_string(),
            });
        }
    }
    Ok(out)
}
