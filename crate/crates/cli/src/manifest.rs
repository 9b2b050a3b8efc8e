//! Run manifests: one JSON document per invocation.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Version of the manifest layout and of the JSON-lines/CSV schemas it lists.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    /// File path, or `-` for standard output.
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

impl OutputDigest {
    pub fn of(path: &str, data: &[u8]) -> Self {
        Self { path: path.to_string(), bytes: data.len(), sha256: hex::encode(Sha256::digest(data)) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command_line: Vec<String>,
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub rng_algorithm: &'static str,
    pub library_version: &'static str,
    pub threads: usize,
    /// Schema of the primary output, e.g. `gtree-jsonl/1`.
    pub output_schema: Option<String>,
    pub elapsed_seconds: f64,
    pub outputs: Vec<OutputDigest>,
    pub summary: Value,
    pub exit_code: i32,
    pub error: Option<String>,
}
