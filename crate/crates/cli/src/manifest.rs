//! Run manifest recorded at the top of every output artifact.

use crate::config::Settings;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
}

impl Manifest {
    /// Hash the fully resolved settings so identical runs carry identical
    /// manifests.
    pub fn for_run(settings: &Settings) -> Manifest {
        let canonical = serde_json::to_string(settings).expect("settings serialize");
        let digest = Sha256::digest(canonical.as_bytes());
        let config_hash = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        Manifest {
            tool: "finsent".to_string(),
            version: TOOL_VERSION.to_string(),
            seed: settings.seed,
            config_hash,
        }
    }

    /// Comment line placed before the header row of CSV outputs.
    pub fn csv_line(&self) -> String {
        format!(
            "# {} {} seed={} config={}\n",
            self.tool, self.version, self.seed, self.config_hash
        )
    }
}
