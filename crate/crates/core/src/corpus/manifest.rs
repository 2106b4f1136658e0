use std::collections::BTreeSet;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CorpusError, Provenance};

pub const MANIFEST_HEADER: [&str; 4] = ["file", "contract", "label", "type"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Vulnerable,
    Neutral,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Vulnerable => "vulnerable",
            Label::Neutral => "neutral",
        }
    }

    /// 1 for vulnerable, 0 for neutral.
    pub fn indicator(self) -> f64 {
        match self {
            Label::Vulnerable => 1.0,
            Label::Neutral => 0.0,
        }
    }

    pub fn swapped(self) -> Self {
        match self {
            Label::Vulnerable => Label::Neutral,
            Label::Neutral => Label::Vulnerable,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "vulnerable" => Ok(Label::Vulnerable),
            "neutral" => Ok(Label::Neutral),
            other => Err(format!("unknown label `{other}` (expected vulnerable or neutral)")),
        }
    }
}

/// The eight vulnerability categories carried by the labeled dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VulnType {
    /// Timestamp dependency.
    TP,
    /// Block number dependency.
    BN,
    /// Dangerous delegatecall.
    DG,
    /// Ether frozen.
    EF,
    /// Unchecked external call.
    UC,
    /// Reentrancy.
    RE,
    /// Integer overflow or underflow.
    OF,
    /// Dangerous strict equality on Ether balances.
    SE,
}

impl VulnType {
    pub const ALL: [VulnType; 8] =
        [VulnType::TP, VulnType::BN, VulnType::DG, VulnType::EF, VulnType::UC, VulnType::RE, VulnType::OF, VulnType::SE];

    pub fn code(self) -> &'static str {
        match self {
            VulnType::TP => "TP",
            VulnType::BN => "BN",
            VulnType::DG => "DG",
            VulnType::EF => "EF",
            VulnType::UC => "UC",
            VulnType::RE => "RE",
            VulnType::OF => "OF",
            VulnType::SE => "SE",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            VulnType::TP => "timestamp dependency",
            VulnType::BN => "block number dependency",
            VulnType::DG => "dangerous delegatecall",
            VulnType::EF => "ether frozen",
            VulnType::UC => "unchecked external call",
            VulnType::RE => "reentrancy",
            VulnType::OF => "integer overflow",
            VulnType::SE => "dangerous ether strict equality",
        }
    }
}

impl fmt::Display for VulnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for VulnType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        VulnType::ALL
            .into_iter()
            .find(|t| t.code().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown vulnerability type `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Path relative to the source root.
    pub file: String,
    pub contract: String,
    pub label: Label,
    pub vuln_type: Option<VulnType>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
    pub provenance: Option<Provenance>,
}

impl CorpusManifest {
    /// Builds a manifest from in-memory entries, enforcing the same rules as the loader.
    pub fn from_entries(entries: Vec<ManifestEntry>) -> Result<Self, CorpusError> {
        let mut seen = BTreeSet::new();
        for (i, e) in entries.iter().enumerate() {
            check_entry(e).map_err(|message| CorpusError::Manifest { line: i + 2, message })?;
            if !seen.insert((e.file.as_str(), e.contract.as_str())) {
                return Err(CorpusError::Manifest { line: i + 2, message: format!("duplicate entry {}:{}", e.file, e.contract) });
            }
        }
        Ok(CorpusManifest { entries, provenance: None })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn check_entry(e: &ManifestEntry) -> Result<(), String> {
    if e.file.is_empty() || e.contract.is_empty() {
        return Err("file and contract must be non-empty".into());
    }
    if e.vuln_type.is_some() && e.label == Label::Neutral {
        return Err(format!("neutral entry {}:{} carries a vulnerability type", e.file, e.contract));
    }
    Ok(())
}

/// Reads and validates a manifest file, recording its path and content hash.
pub fn load_manifest(path: &Path) -> Result<CorpusManifest, CorpusError> {
    let bytes = std::fs::read(path).map_err(|source| CorpusError::Io { path: path.display().to_string(), source })?;
    let mut manifest = parse_manifest(bytes.as_slice())?;
    manifest.provenance =
        Some(Provenance { manifest_path: path.display().to_string(), manifest_sha256: hex::encode(Sha256::digest(&bytes)) });
    Ok(manifest)
}

/// Parses manifest CSV. Errors name the 1-based line of the offending row.
pub fn parse_manifest(reader: impl Read) -> Result<CorpusManifest, CorpusError> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let malformed = |line: usize, message: String| CorpusError::Manifest { line, message };
    let header = csv.headers().map_err(|e| malformed(1, e.to_string()))?.clone();
    if header.iter().ne(MANIFEST_HEADER) {
        return Err(malformed(1, format!("expected header `{}`", MANIFEST_HEADER.join(","))));
    }

    let mut entries = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            malformed(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let label = record[2].parse::<Label>().map_err(|m| malformed(line, m))?;
        let vuln_type = match &record[3] {
            "" => None,
            code => Some(code.parse::<VulnType>().map_err(|m| malformed(line, m))?),
        };
        entries.push((line, ManifestEntry { file: record[0].to_string(), contract: record[1].to_string(), label, vuln_type }));
    }

    let mut seen = BTreeSet::new();
    for (line, e) in &entries {
        check_entry(e).map_err(|m| malformed(*line, m))?;
        if !seen.insert((e.file.clone(), e.contract.clone())) {
            return Err(malformed(*line, format!("duplicate entry {}:{}", e.file, e.contract)));
        }
    }
    Ok(CorpusManifest { entries: entries.into_iter().map(|(_, e)| e).collect(), provenance: None })
}
