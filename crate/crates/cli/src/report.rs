//! Report assembly and deterministic emission.
//!
//! Reports are re-encoded through `serde_json::Value`, whose map type keeps
//! keys sorted, and floats print through the shortest round-trip formatter,
//! so identical runs emit byte-identical documents.

use macroscope_core::paths::KlResult;
use serde_json::{json, Value};

use crate::manifest::RunManifest;

/// Infinite KL values are not representable as JSON numbers, so results are
/// emitted with an explicit `finite` flag and a null value when infinite.
pub fn kl_to_json(kl: &KlResult) -> Value {
    json!({
        "finite": kl.is_finite(),
        "value": kl.is_finite().then_some(kl.value),
        "witness": kl.infinite_support_witness,
    })
}

/// Wraps a report body with its manifest; key order is canonical.
pub fn envelope(manifest: &RunManifest, body: Value) -> Value {
    let manifest_value = serde_json::to_value(manifest).expect("manifest serializes");
    json!({ "manifest": manifest_value, "report": body })
}

pub fn render(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("reports serialize");
    out.push('\n');
    out
}
