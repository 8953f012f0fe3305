//! Pair identities shared by pair generation, ingestion, scoring and evaluation.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Canonically oriented pair of method ids: `left` always comes from the
/// original project, `right` from the redesigned one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairKey {
    pub left: String,
    pub right: String,
}

impl PairKey {
    pub fn new(left: impl Into<String>, right: impl Into<String>) -> Self {
        PairKey {
            left: left.into(),
            right: right.into(),
        }
    }
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <-> {}", self.left, self.right)
    }
}

/// Where a candidate pair came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "name", rename_all = "lowercase")]
pub enum Provenance {
    Detector(String),
    Prefilter,
    Exhaustive,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Detector(name) => write!(f, "detector:{name}"),
            Provenance::Prefilter => f.write_str("prefilter"),
            Provenance::Exhaustive => f.write_str("exhaustive"),
        }
    }
}

/// A cross-project method pair under consideration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePair {
    pub left: String,
    pub right: String,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector_meta: Option<String>,
}

impl CandidatePair {
    pub fn new(left: impl Into<String>, right: impl Into<String>, provenance: Provenance) -> Self {
        CandidatePair {
            left: left.into(),
            right: right.into(),
            provenance,
            detector_meta: None,
        }
    }

    pub fn key(&self) -> PairKey {
        PairKey::new(self.left.clone(), self.right.clone())
    }
}
