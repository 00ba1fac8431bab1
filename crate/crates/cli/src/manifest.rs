use std::collections::BTreeMap;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Set to `1` to record wall-clock seconds; otherwise timing is `null` so
/// manifests stay byte-identical across runs.
pub const TIMING_ENV: &str = "POLYTOPO_RECORD_TIMING";

#[derive(Clone, Debug, Default)]
pub struct RunManifest {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub timing: Option<f64>,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn timing_enabled() -> bool {
    std::env::var(TIMING_ENV).is_ok_and(|v| v.trim() == "1")
}

impl RunManifest {
    pub fn to_value(&self) -> Value {
        json!({
            "command": self.command,
            "tool": { "name": "polytopo", "version": env!("CARGO_PKG_VERSION") },
            "inputs": self.inputs,
            "outputs": self.outputs,
            "params": self.params,
            "seed": self.seed,
            "timing": self.timing.map(|s| json!({ "seconds": s })),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(digest(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
