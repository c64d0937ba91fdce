//! Run manifests: enough resolved configuration to reproduce any run.
//!
//! Every command writes one next to its outputs. Re-running the recorded
//! command line reproduces the result files byte-for-byte; the manifest
//! itself carries timestamps and is excluded from byte comparison.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    pub started_utc: String,
    pub finished_utc: String,
    pub seed: Option<u64>,
    /// Resolved configuration after defaults, flag parsing, and config files.
    pub config: BTreeMap<String, String>,
    /// sha256 digest per input file.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: Vec<String>) -> Self {
        RunManifest {
            tool: "prana".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            started_utc: chrono::Utc::now().to_rfc3339(),
            finished_utc: String::new(),
            seed: None,
            config: BTreeMap::new(),
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.to_string(), value.to_string());
    }

    pub fn add_input(&mut self, path: &Path) -> anyhow::Result<()> {
        let digest = sha256_file(path)?;
        self.inputs.insert(path.display().to_string(), digest);
        Ok(())
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn write(&mut self, path: &Path) -> anyhow::Result<()> {
        self.finished_utc = chrono::Utc::now().to_rfc3339();
        let text = toml::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let mut file = std::fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 65536];
    loop {
        let read = file.read(&mut buf)?;
        if read == 0 {
            break;
        }
        hasher.update(&buf[..read]);
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{:02x}", byte));
    }
    Ok(format!("sha256:{}", hex))
}
