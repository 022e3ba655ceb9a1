use proxylab::vecm::tables::{ADF_TABLE, JOHANSEN_TABLE};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::run_config::RunConfig;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tables {
    pub adf: String,
    pub johansen: String,
}

impl Default for Tables {
    fn default() -> Self {
        Self {
            adf: ADF_TABLE.into(),
            johansen: JOHANSEN_TABLE.into(),
        }
    }
}

/// Written next to a run's outputs; enough to reproduce them exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub run: RunConfig,
    pub input: Option<InputRecord>,
    pub tables: Tables,
    pub outputs: Vec<OutputRecord>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }
}
