use serde::{Deserialize, Serialize};

use super::AnalysisConfig;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub manifest_path: String,
    pub manifest_sha256: String,
    pub source_root: String,
    /// Digest over the referenced source files.
    pub sources_sha256: String,
    pub entries: usize,
    pub rows: usize,
    pub diagnostics: usize,
}

/// Everything needed to audit or repeat a run. Contains no timestamps, so
/// identical runs produce identical manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: AnalysisConfig,
    pub formats: Vec<String>,
    pub dataset: DatasetRecord,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn new(command: &str, config: AnalysisConfig, formats: Vec<String>, dataset: DatasetRecord) -> Self {
        RunManifest {
            tool: "scmetrics".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            formats,
            dataset,
            outputs: Vec::new(),
        }
    }

    pub fn record(&mut self, file: impl Into<String>, contents: impl AsRef<[u8]>) {
        self.outputs.push(OutputFile { file: file.into(), sha256: crate::sha256_hex(contents) });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("run manifest serializes");
        s.push('\n');
        s
    }
}
