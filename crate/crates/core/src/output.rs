//! CSV, resolved-config and manifest files for one experiment run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::experiments::Table;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub command: String,
    pub config: BTreeMap<String, String>,
    /// File name -> hex SHA-256 of its contents.
    pub checksums: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone)]
pub struct EmittedRun {
    pub csv_path: PathBuf,
    pub config_path: PathBuf,
    pub manifest_path: PathBuf,
    pub manifest: RunManifest,
}

/// Write `<stem>.csv`, `<stem>.cfg` (the resolved config, reusable with
/// `--config`) and `<stem>.manifest.json` into the configured output dir.
pub fn emit_outputs(table: &Table, cfg: &ExperimentConfig) -> Result<EmittedRun> {
    let dir: &Path = &cfg.output_dir;
    std::fs::create_dir_all(dir)?;
    let stem = table.experiment.name();
    let csv = table.to_csv()?;
    let cfg_text = cfg.to_text();

    let csv_name = format!("{stem}.csv");
    let cfg_name = format!("{stem}.cfg");
    let csv_path = dir.join(&csv_name);
    let config_path = dir.join(&cfg_name);
    std::fs::write(&csv_path, &csv)?;
    std::fs::write(&config_path, &cfg_text)?;

    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        command: stem.to_string(),
        config: cfg
            .entries()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        checksums: BTreeMap::from([
            (csv_name, sha256_hex(csv.as_bytes())),
            (cfg_name, sha256_hex(cfg_text.as_bytes())),
        ]),
    };
    let manifest_path = dir.join(format!("{stem}.manifest.json"));
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&manifest_path, json + "\n")?;
    Ok(EmittedRun {
        csv_path,
        config_path,
        manifest_path,
        manifest,
    })
}
