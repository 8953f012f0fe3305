//! Redesign-aware code mapping between an original and a redesigned Java
//! codebase.
//!
//! The pipeline extracts method details from both trees, builds candidate
//! pairs (exhaustively, through class-level pre-filtering, or from clone
//! detector reports), normalizes each method with project-specific renaming
//! rules and scores every pair with a semantic alignment score. The
//! evaluation kit measures the result against labeled pairs, sweeps
//! thresholds, compares rule ablations and tunes the score weights.

pub mod error;
pub mod evalkit;
pub mod extractor;
pub mod ingest;
pub mod mapper;
pub mod normalizer;
pub mod pair;
pub mod prefilter;
pub mod project;
pub mod simcore;

pub use error::{Error, Result};
