use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigRef {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
struct Versions {
    tvc_cli: &'static str,
    tvc_core: &'static str,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    verb: &'a str,
    seed: Option<u64>,
    config: Option<&'a ConfigRef>,
    profile_digest: Option<&'a str>,
    parameters: &'a Value,
    versions: Versions,
    outputs: &'a [OutputFile],
    /// The only field that changes between identical runs.
    created_unix_s: u64,
}

pub const MANIFEST: &str = "manifest.json";

/// Output directory of one run; records every file for the manifest.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<OutputFile>,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Outputs { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(OutputFile { file: name.into(), bytes: bytes.len(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn finish(self, verb: &str, seed: Option<u64>, config: Option<&ConfigRef>, profile_digest: Option<&str>, parameters: &Value) -> Result<()> {
        let created_unix_s = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let manifest = Manifest {
            verb,
            seed,
            config,
            profile_digest,
            parameters,
            versions: Versions { tvc_cli: env!("CARGO_PKG_VERSION"), tvc_core: tvc::VERSION },
            outputs: &self.files,
            created_unix_s,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let path = self.dir.join(MANIFEST);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
