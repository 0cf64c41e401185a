//! Run manifests written next to every output file.

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use ptheta::verify::{to_canonical_json, SCHEMA_VERSION};

/// The reproducible part of a run. Its hash is embedded in every output, so
/// outputs of identical invocations stay byte-identical.
#[derive(Debug, Clone, Serialize)]
struct ManifestCore<'a> {
    schema: u32,
    command: &'a str,
    args: &'a [String],
    seed: Option<u64>,
    version: &'a str,
    outputs: &'a [String],
}

#[derive(Debug, Clone, Serialize)]
struct RunManifest<'a> {
    #[serde(flatten)]
    core: ManifestCore<'a>,
    hash: &'a str,
    wall_time_s: f64,
}

pub struct ManifestWriter {
    command: String,
    args: Vec<String>,
    seed: Option<u64>,
    outputs: Vec<PathBuf>,
    hash: String,
}

impl ManifestWriter {
    pub fn new(command: &str, args: Vec<String>, seed: Option<u64>, outputs: Vec<PathBuf>) -> Self {
        let mut w = Self {
            command: command.to_string(),
            args,
            seed,
            outputs,
            hash: String::new(),
        };
        w.hash = sha256_hex(&to_canonical_json(&w.core(&w.output_strings())).unwrap_or_default());
        w
    }

    fn output_strings(&self) -> Vec<String> {
        self.outputs.iter().map(|p| p.display().to_string()).collect()
    }

    fn core<'a>(&'a self, outputs: &'a [String]) -> ManifestCore<'a> {
        ManifestCore {
            schema: SCHEMA_VERSION,
            command: &self.command,
            args: &self.args,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION"),
            outputs,
        }
    }

    /// `sha256:<hex>` of the canonical manifest without the wall time.
    pub fn reference(&self) -> String {
        format!("sha256:{}", self.hash)
    }

    /// Writes `<first output>.manifest.json`.
    pub fn write(&self, wall: Duration) -> anyhow::Result<PathBuf> {
        let Some(first) = self.outputs.first() else {
            anyhow::bail!("no outputs to describe");
        };
        let path = manifest_path(first);
        let outputs = self.output_strings();
        let m = RunManifest {
            core: self.core(&outputs),
            hash: &self.reference(),
            wall_time_s: wall.as_secs_f64(),
        };
        let text = to_canonical_json(&m)?;
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn sha256_hex(s: &str) -> String {
    format!("{:x}", Sha256::digest(s.as_bytes()))
}

/// Canonical JSON of `value` with a top-level `manifest` key added.
pub fn json_with_manifest<S: Serialize>(value: &S, reference: &str) -> anyhow::Result<String> {
    let mut v = serde_json::to_value(value)?;
    if let Value::Object(map) = &mut v {
        map.insert("manifest".into(), Value::String(reference.into()));
    }
    Ok(to_canonical_json(&v)?)
}
