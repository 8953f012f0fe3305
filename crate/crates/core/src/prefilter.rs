//! Class-level pre-filtering of the cross-project pair space.
//!
//! Fully qualified class names are normalized with the renaming rules and
//! compared with the LCS ratio; only methods inside retained class pairs are
//! paired, and those pairs are dropped again when their line counts differ
//! by the configured ratio or their bodies embed too far apart.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extractor::{MethodRecord, ProjectSnapshot};
use crate::normalizer::{tokenize, FieldKind, Normalizer};
use crate::simcore::lcs_sim;

pub use crate::pair::{CandidatePair, PairKey, Provenance};

pub const BAG_OF_TOKENS: &str = "bag-of-tokens";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PrefilterConfig {
    pub class_sim_threshold: f64,
    pub line_ratio_cutoff: f64,
    pub embed_threshold: f64,
    pub embedder: String,
}

impl Default for PrefilterConfig {
    fn default() -> Self {
        PrefilterConfig {
            class_sim_threshold: 0.5,
            line_ratio_cutoff: 2.0,
            embed_threshold: 0.5,
            embedder: BAG_OF_TOKENS.to_string(),
        }
    }
}

impl PrefilterConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("class_sim_threshold", self.class_sim_threshold),
            ("embed_threshold", self.embed_threshold),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        if self.line_ratio_cutoff.is_nan() || self.line_ratio_cutoff < 1.0 {
            return Err(Error::Config(format!(
                "line_ratio_cutoff = {} must be at least 1",
                self.line_ratio_cutoff
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassPair {
    pub left: String,
    pub right: String,
    pub name_sim: f64,
}

/// A vector produced by an [`Embedder`].
#[derive(Debug, Clone, PartialEq)]
pub enum Embedding {
    Dense(Vec<f64>),
    Sparse(BTreeMap<String, f64>),
}

impl Embedding {
    /// Cosine similarity; zero vectors are dissimilar to everything.
    pub fn cosine(&self, other: &Embedding) -> std::result::Result<f64, String> {
        let (dot, na, nb) = match (self, other) {
            (Embedding::Dense(a), Embedding::Dense(b)) => {
                if a.len() != b.len() {
                    return Err(format!("dimension mismatch: {} vs {}", a.len(), b.len()));
                }
                let dot = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
                (dot, norm(a.iter()), norm(b.iter()))
            }
            (Embedding::Sparse(a), Embedding::Sparse(b)) => {
                let dot = a.iter().filter_map(|(k, x)| b.get(k).map(|y| x * y)).sum::<f64>();
                (dot, norm(a.values()), norm(b.values()))
            }
            _ => return Err("cannot compare dense and sparse embeddings".to_string()),
        };
        if na == 0.0 || nb == 0.0 {
            return Ok(0.0);
        }
        Ok(dot / (na * nb))
    }
}

fn norm<'a>(values: impl Iterator<Item = &'a f64>) -> f64 {
    values.map(|v| v * v).sum::<f64>().sqrt()
}

/// Maps method source text to a vector.
pub trait Embedder: Send + Sync {
    fn name(&self) -> &str;
    fn embed(&self, text: &str) -> std::result::Result<Embedding, String>;
}

/// Token-count vector over the tokenized text.
#[derive(Debug, Clone, Copy, Default)]
pub struct BagOfTokens;

impl Embedder for BagOfTokens {
    fn name(&self) -> &str {
        BAG_OF_TOKENS
    }

    fn embed(&self, text: &str) -> std::result::Result<Embedding, String> {
        let mut counts = BTreeMap::new();
        for token in tokenize(text).0 {
            *counts.entry(token).or_insert(0.0) += 1.0;
        }
        Ok(Embedding::Sparse(counts))
    }
}

/// Named embedding providers.
#[derive(Clone)]
pub struct EmbedderRegistry {
    providers: BTreeMap<String, Arc<dyn Embedder>>,
}

impl Default for EmbedderRegistry {
    fn default() -> Self {
        let mut reg = EmbedderRegistry {
            providers: BTreeMap::new(),
        };
        reg.register(Arc::new(BagOfTokens));
        reg
    }
}

impl EmbedderRegistry {
    pub fn register(&mut self, provider: Arc<dyn Embedder>) {
        self.providers.insert(provider.name().to_string(), provider);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Embedder>> {
        self.providers.get(name).cloned().ok_or_else(|| Error::Embedding {
            provider: name.to_string(),
            message: format!(
                "not registered (known: {})",
                self.providers.keys().cloned().collect::<Vec<_>>().join(", ")
            ),
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.providers.keys().map(String::as_str)
    }
}

/// Keeps class pairs whose normalized qualified names are similar enough.
pub fn filter_classes(
    left: &ProjectSnapshot,
    right: &ProjectSnapshot,
    normalizer: &Normalizer,
    cfg: &PrefilterConfig,
) -> Vec<ClassPair> {
    let tokens = |snap: &ProjectSnapshot| -> Vec<(String, _)> {
        snap.classes()
            .keys()
            .map(|name| {
                let renamed = normalizer.apply_rules(name, FieldKind::ClassName, snap.role());
                (name.clone(), tokenize(&renamed))
            })
            .collect()
    };
    let left_tokens = tokens(left);
    let right_tokens = tokens(right);

    let mut pairs: Vec<ClassPair> = left_tokens
        .par_iter()
        .flat_map_iter(|(lname, ltok)| {
            right_tokens.iter().filter_map(move |(rname, rtok)| {
                let sim = lcs_sim(ltok, rtok).unwrap_or(0.0);
                (sim >= cfg.class_sim_threshold).then(|| ClassPair {
                    left: lname.clone(),
                    right: rname.clone(),
                    name_sim: sim,
                })
            })
        })
        .collect();
    pairs.sort_by(|a, b| (&a.left, &a.right).cmp(&(&b.left, &b.right)));
    pairs
}

fn line_ratio(a: &MethodRecord, b: &MethodRecord) -> f64 {
    let (lo, hi) = if a.loc <= b.loc {
        (a.loc, b.loc)
    } else {
        (b.loc, a.loc)
    };
    hi as f64 / lo.max(1) as f64
}

fn embed_all<'a>(
    snap: &'a ProjectSnapshot,
    classes: impl Iterator<Item = &'a str>,
    normalizer: &Normalizer,
    embedder: &dyn Embedder,
) -> Result<HashMap<&'a str, Embedding>> {
    let mut records: Vec<&MethodRecord> = classes.flat_map(|c| snap.methods_of_class(c)).collect();
    records.sort_by(|a, b| a.id.cmp(&b.id));
    records.dedup_by(|a, b| a.id == b.id);
    records
        .par_iter()
        .map(|rec| {
            let text = normalizer.apply_rules(&rec.body_text, FieldKind::Body, snap.role());
            embedder
                .embed(&text)
                .map(|e| (rec.id.as_str(), e))
                .map_err(|message| Error::Embedding {
                    provider: embedder.name().to_string(),
                    message,
                })
        })
        .collect()
}

/// Pairs methods inside retained class pairs, dropping pairs whose sizes or
/// embeddings disagree.
pub fn generate_pairs(
    classes: &[ClassPair],
    left: &ProjectSnapshot,
    right: &ProjectSnapshot,
    normalizer: &Normalizer,
    embedder: &dyn Embedder,
    cfg: &PrefilterConfig,
) -> Result<Vec<CandidatePair>> {
    let left_emb = embed_all(
        left,
        classes.iter().map(|c| c.left.as_str()),
        normalizer,
        embedder,
    )?;
    let right_emb = embed_all(
        right,
        classes.iter().map(|c| c.right.as_str()),
        normalizer,
        embedder,
    )?;

    let nested: Vec<Vec<CandidatePair>> = classes
        .par_iter()
        .map(|cp| {
            let mut out = Vec::new();
            for l in left.methods_of_class(&cp.left) {
                for r in right.methods_of_class(&cp.right) {
                    if line_ratio(l, r) >= cfg.line_ratio_cutoff {
                        continue;
                    }
                    let sim = left_emb[l.id.as_str()]
                        .cosine(&right_emb[r.id.as_str()])
                        .map_err(|message| Error::Embedding {
                            provider: embedder.name().to_string(),
                            message,
                        })?;
                    if sim < cfg.embed_threshold {
                        continue;
                    }
                    out.push(CandidatePair::new(&l.id, &r.id, Provenance::Prefilter));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut pairs: Vec<CandidatePair> = nested.into_iter().flatten().collect();
    pairs.sort_by(|a, b| (&a.left, &a.right).cmp(&(&b.left, &b.right)));
    pairs.dedup_by(|a, b| a.left == b.left && a.right == b.right);
    Ok(pairs)
}

/// Full cross product of methods with at least `min_loc` lines on both sides.
pub fn exhaustive_pairs(
    left: &ProjectSnapshot,
    right: &ProjectSnapshot,
    min_loc: usize,
) -> Vec<CandidatePair> {
    let mut lefts: Vec<&MethodRecord> = left.records().iter().filter(|m| m.loc >= min_loc).collect();
    let mut rights: Vec<&MethodRecord> = right.records().iter().filter(|m| m.loc >= min_loc).collect();
    lefts.sort_by(|a, b| a.id.cmp(&b.id));
    rights.sort_by(|a, b| a.id.cmp(&b.id));
    lefts
        .iter()
        .flat_map(|l| {
            rights
                .iter()
                .map(move |r| CandidatePair::new(&l.id, &r.id, Provenance::Exhaustive))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bag_of_tokens_cosine() {
        let e = BagOfTokens;
        let a = e.embed("int x = foo(x);").unwrap();
        let b = e.embed("int x = foo(x);").unwrap();
        assert!((a.cosine(&b).unwrap() - 1.0).abs() < 1e-12);
        let c = e.embed("return bar;").unwrap();
        assert_eq!(a.cosine(&c).unwrap(), 0.0);
        let empty = e.embed("").unwrap();
        assert_eq!(a.cosine(&empty).unwrap(), 0.0);
        // {int:1, x:2, foo:1} . {x:1, y:1} = 2
        let d = e.embed("x y").unwrap();
        let expected = 2.0 / (6.0f64.sqrt() * 2.0f64.sqrt());
        assert!((a.cosine(&d).unwrap() - expected).abs() < 1e-12);
        assert_eq!(a.cosine(&d), d.cosine(&a));
    }

    #[test]
    fn dense_dimension_mismatch_is_an_error() {
        let a = Embedding::Dense(vec![1.0, 0.0]);
        assert!(a.cosine(&Embedding::Dense(vec![1.0])).is_err());
        assert!(a.cosine(&Embedding::Sparse(BTreeMap::new())).is_err());
        assert_eq!(a.cosine(&Embedding::Dense(vec![0.0, 2.0])).unwrap(), 0.0);
    }

    #[test]
    fn registry_names_unknown_provider() {
        let reg = EmbedderRegistry::default();
        assert!(reg.get(BAG_OF_TOKENS).is_ok());
        let err = reg.get("minilm").err().unwrap();
        assert!(err.to_string().contains("minilm"));
    }

    #[test]
    fn config_validation() {
        assert!(PrefilterConfig::default().validate().is_ok());
        let bad = PrefilterConfig {
            line_ratio_cutoff: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = PrefilterConfig {
            class_sim_threshold: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
