//! Run reports: a versioned JSON summary written next to the CSV
//! artifacts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct ReportError {
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub kind: String,
    pub seed: u64,
    pub out_dir: String,
    /// Echo of the effective configuration, key by key.
    pub config: BTreeMap<String, String>,
    /// Headline metrics of the scenario.
    pub metrics: BTreeMap<String, serde_json::Value>,
    /// Artifact files, relative to `out_dir`.
    pub artifacts: Vec<String>,
    pub wall_time_s: f64,
    pub errors: Vec<ReportError>,
}

impl RunReport {
    pub fn metric_f64(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.into(), value.into());
    }

    pub fn metric_str(&mut self, key: &str, value: impl Into<String>) {
        self.metrics.insert(key.into(), value.into().into());
    }

    pub fn metric_u64(&mut self, key: &str, value: u64) {
        self.metrics.insert(key.into(), value.into());
    }

    /// Serialize to `out_dir/report.json`. Every listed artifact must
    /// exist on disk at this point.
    pub fn write(&self, out_dir: &Path) -> std::io::Result<PathBuf> {
        for artifact in &self.artifacts {
            let p = out_dir.join(artifact);
            if !p.exists() {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    format!("artifact listed in report does not exist: {}", p.display()),
                ));
            }
        }
        let path = out_dir.join("report.json");
        let mut json = serde_json::to_string_pretty(self).expect("report serializes");
        json.push('\n');
        std::fs::write(&path, json)?;
        Ok(path)
    }
}
