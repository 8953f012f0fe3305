use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Written next to every output as `<output>.manifest.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub command: Vec<String>,
    pub config_hashes: BTreeMap<String, String>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub counters: BTreeMap<String, serde_json::Value>,
}

pub fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn start() -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION"),
            command: std::env::args().collect(),
            config_hashes: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started_unix_ms: now_ms(),
            finished_unix_ms: 0,
            counters: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn config(&mut self, name: &str, content: &[u8]) {
        self.config_hashes.insert(name.to_string(), sha256_hex(content));
    }

    pub fn count(&mut self, name: &str, value: impl Serialize) {
        self.counters.insert(
            name.to_string(),
            serde_json::to_value(value).expect("counter serializes"),
        );
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn finish(mut self, primary_output: &Path) -> std::io::Result<()> {
        self.finished_unix_ms = now_ms();
        let text = serde_json::to_string_pretty(&self).expect("manifest serializes");
        std::fs::write(Self::path_for(primary_output), text + "\n")
    }
}
