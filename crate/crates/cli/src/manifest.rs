//! Run manifests: a JSON record written next to every output file.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Full command line, program name included.
    pub arguments: Vec<String>,
    /// Resolved configuration after defaults were applied.
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
    pub wall_time_seconds: f64,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        arguments: &[String],
        config: serde_json::Value,
        seed: Option<u64>,
        outputs: Vec<String>,
        wall_time: Duration,
    ) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            arguments: arguments.to_vec(),
            config,
            seed,
            outputs,
            wall_time_seconds: wall_time.as_secs_f64(),
        }
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(path, text + "\n")
    }

    pub fn read(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(std::io::Error::other)
    }
}

/// `out.csv` -> `out.csv.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_next_to_output() {
        assert_eq!(manifest_path(Path::new("/tmp/x/curve.csv")), PathBuf::from("/tmp/x/curve.csv.manifest.json"));
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let m = RunManifest::new(
            "boundary",
            &["discpower".into(), "boundary".into()],
            serde_json::json!({"points": 3}),
            None,
            vec!["b.csv".into()],
            Duration::from_millis(1500),
        );
        m.write(&path).unwrap();
        assert_eq!(RunManifest::read(&path).unwrap(), m);
    }
}
