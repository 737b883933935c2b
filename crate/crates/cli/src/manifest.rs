//! Run manifests: every report embeds the command, a content digest of its
//! canonicalized inputs, the seed when one was used, the tool version, and
//! the tolerance snapshot. Identical manifests imply byte-identical reports.

use macroscope_core::ToleranceConfig;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub input_digest: String,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub tolerances: ToleranceConfig,
}

impl RunManifest {
    pub fn new(
        command: &str,
        inputs: &[Value],
        params: Value,
        seed: Option<u64>,
        tolerances: &ToleranceConfig,
    ) -> Self {
        Self {
            command: command.to_string(),
            input_digest: digest_inputs(inputs, &params),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            tolerances: *tolerances,
        }
    }
}

/// Sorted-key compact serialization; `serde_json` maps iterate in key order,
/// so re-encoding a parsed value is canonical.
pub fn canonical_string(value: &Value) -> String {
    serde_json::to_string(value).expect("JSON values serialize")
}

fn digest_inputs(inputs: &[Value], params: &Value) -> String {
    let combined = json!({ "files": inputs, "params": params });
    let mut hasher = Sha256::new();
    hasher.update(canonical_string(&combined).as_bytes());
    let digest = hasher.finalize();
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}
