//! Binding clone-detector reports to extracted methods.
//!
//! Two report shapes are understood: the generic pair JSON Lines format
//! below, and NiCad's XML clone-pair / clone-class output. Other detectors
//! are bridged by converting to the generic format.
//!
//! Generic format, one object per line (`format_version` defaults to 1):
//!
//! ```json
//! {"format_version": 1, "detector": "ccstokener",
//!  "left":  {"file": "src/main/java/soot/Body.java", "start": 120, "end": 141},
//!  "right": {"key": "sootup.core.model.Body#getStmts()"},
//!  "meta": "similarity=0.82"}
//! ```
//!
//! A fragment is either a file span or a method key (a full method id, or
//! `Class#name(T1,T2)` when unique). File paths may be relative to either
//! snapshot root, absolute, or carry an extra leading directory; they are
//! matched against the snapshots' files by root prefix first and then by the
//! longest path suffix.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Component, Path};

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extractor::{MethodRecord, ProjectSnapshot, SourceSpan};
use crate::pair::{CandidatePair, PairKey, Provenance};
use crate::project::ProjectRole;

pub const GENERIC_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Fragment {
    Span { file: String, start: usize, end: usize },
    Key { key: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericReportLine {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub detector: String,
    pub left: Fragment,
    pub right: Fragment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<String>,
}

fn default_version() -> u32 {
    GENERIC_FORMAT_VERSION
}

/// A detector's reported pairs before binding.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorReport {
    pub detector: String,
    pub pairs: Vec<(Fragment, Fragment, Option<String>)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub reported_pairs: usize,
    pub malformed_lines: usize,
    pub unresolved_fragments: usize,
    pub unresolved_pairs: usize,
    pub unknown_files: usize,
    pub same_project: usize,
    pub duplicates: usize,
    pub emitted: usize,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestOutcome {
    pub pairs: Vec<CandidatePair>,
    pub stats: IngestStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

struct Binder<'a> {
    left: &'a ProjectSnapshot,
    right: &'a ProjectSnapshot,
    path_cache: HashMap<String, Option<(Side, String)>>,
}

enum Unbound {
    UnknownFile,
    NoMethod,
}

impl<'a> Binder<'a> {
    fn new(left: &'a ProjectSnapshot, right: &'a ProjectSnapshot) -> Result<Self> {
        if left.role() != ProjectRole::Original || right.role() != ProjectRole::Redesigned {
            return Err(Error::Config(format!(
                "expected an original and a redesigned snapshot, got {} and {}",
                left.role(),
                right.role()
            )));
        }
        Ok(Binder {
            left,
            right,
            path_cache: HashMap::new(),
        })
    }

    fn snapshot(&self, side: Side) -> &'a ProjectSnapshot {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    fn resolve_path(&mut self, path: &str) -> Option<(Side, String)> {
        if let Some(hit) = self.path_cache.get(path) {
            return hit.clone();
        }
        let hit = self.resolve_path_uncached(path);
        self.path_cache.insert(path.to_string(), hit.clone());
        hit
    }

    fn resolve_path_uncached(&self, raw: &str) -> Option<(Side, String)> {
        let cleaned = raw.replace('\\', "/");
        let path = Path::new(&cleaned);
        for side in [Side::Left, Side::Right] {
            let snap = self.snapshot(side);
            if let Ok(rel) = path.strip_prefix(snap.root()) {
                let rel = join_components(rel);
                if snap.has_file(&rel) {
                    return Some((side, rel));
                }
            }
        }

        let normalized = join_components(path);
        let suffix_match = |snap: &ProjectSnapshot| -> Option<String> {
            snap.files()
                .filter(|f| {
                    normalized == *f
                        || (normalized.ends_with(f)
                            && normalized.as_bytes()[normalized.len() - f.len() - 1] == b'/')
                })
                .max_by_key(|f| f.len())
                .map(str::to_string)
        };
        match (suffix_match(self.left), suffix_match(self.right)) {
            (Some(l), Some(r)) if l.len() > r.len() => Some((Side::Left, l)),
            (Some(l), Some(r)) if r.len() > l.len() => Some((Side::Right, r)),
            (Some(_), Some(_)) => None,
            (Some(l), None) => Some((Side::Left, l)),
            (None, Some(r)) => Some((Side::Right, r)),
            (None, None) => None,
        }
    }

    /// `hint` is the side the report position suggests; keys found on both
    /// sides resolve there.
    fn bind(
        &mut self,
        frag: &Fragment,
        hint: Side,
    ) -> std::result::Result<(Side, &'a MethodRecord), Unbound> {
        match frag {
            Fragment::Key { key } => {
                let other = if hint == Side::Left {
                    Side::Right
                } else {
                    Side::Left
                };
                for side in [hint, other] {
                    if let Some(rec) = self.snapshot(side).resolve_key(key) {
                        return Ok((side, rec));
                    }
                }
                Err(Unbound::NoMethod)
            }
            Fragment::Span { file, start, end } => {
                let (side, rel) = self.resolve_path(file).ok_or(Unbound::UnknownFile)?;
                let span = SourceSpan::new(rel, *start.min(end), *start.max(end));
                self.snapshot(side)
                    .match_fragment(&span)
                    .method()
                    .map(|rec| (side, rec))
                    .ok_or(Unbound::NoMethod)
            }
        }
    }
}

fn join_components(path: &Path) -> String {
    path.components()
        .filter_map(|c| match c {
            Component::Normal(s) => Some(s.to_string_lossy().into_owned()),
            _ => None,
        })
        .collect::<Vec<_>>()
        .join("/")
}

/// Resolves fragment pairs to canonically oriented, de-duplicated candidates.
fn bind_pairs<'p>(
    left: &ProjectSnapshot,
    right: &ProjectSnapshot,
    pairs: impl IntoIterator<Item = (&'p str, &'p Fragment, &'p Fragment, Option<&'p str>)>,
    mut stats: IngestStats,
) -> Result<IngestOutcome> {
    let mut binder = Binder::new(left, right)?;
    let mut unique: BTreeMap<PairKey, CandidatePair> = BTreeMap::new();

    for (detector, a, b, meta) in pairs {
        stats.reported_pairs += 1;
        let bound_a = binder.bind(a, Side::Left);
        let bound_b = binder.bind(b, Side::Right);
        let mut failed = false;
        for bound in [&bound_a, &bound_b] {
            if let Err(why) = bound {
                failed = true;
                stats.unresolved_fragments += 1;
                if matches!(why, Unbound::UnknownFile) {
                    stats.unknown_files += 1;
                }
            }
        }
        let (Ok((side_a, rec_a)), Ok((side_b, rec_b))) = (bound_a, bound_b) else {
            debug_assert!(failed);
            stats.unresolved_pairs += 1;
            continue;
        };
        if side_a == side_b {
            stats.same_project += 1;
            continue;
        }
        let (l, r) = if side_a == Side::Left {
            (rec_a, rec_b)
        } else {
            (rec_b, rec_a)
        };
        let key = PairKey::new(&l.id, &r.id);
        if unique.contains_key(&key) {
            stats.duplicates += 1;
            continue;
        }
        let mut pair = CandidatePair::new(&l.id, &r.id, Provenance::Detector(detector.to_string()));
        pair.detector_meta = meta.map(str::to_string);
        unique.insert(key, pair);
    }

    let considered = stats.reported_pairs - stats.same_project;
    if considered > 0 && stats.unresolved_pairs * 2 > considered {
        return Err(Error::MostlyUnresolved {
            unresolved: stats.unresolved_pairs,
            total: considered,
        });
    }
    let pairs: Vec<CandidatePair> = unique.into_values().collect();
    stats.emitted = pairs.len();
    Ok(IngestOutcome { pairs, stats })
}

/// Binds an already parsed report.
pub fn ingest_report(
    report: &DetectorReport,
    left: &ProjectSnapshot,
    right: &ProjectSnapshot,
) -> Result<IngestOutcome> {
    bind_pairs(
        left,
        right,
        report
            .pairs
            .iter()
            .map(|(a, b, meta)| (report.detector.as_str(), a, b, meta.as_deref())),
        IngestStats::default(),
    )
}

/// Reads a generic pair report (JSON Lines).
pub fn ingest_generic(path: &Path, left: &ProjectSnapshot, right: &ProjectSnapshot) -> Result<IngestOutcome> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut stats = IngestStats::default();
    let mut lines = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<GenericReportLine>(&line) {
            Ok(parsed) if parsed.format_version == GENERIC_FORMAT_VERSION => lines.push(parsed),
            Ok(parsed) => {
                stats.malformed_lines += 1;
                stats.diagnostics.push(format!(
                    "line {}: unsupported format_version {}",
                    n + 1,
                    parsed.format_version
                ));
            }
            Err(e) => {
                stats.malformed_lines += 1;
                stats.diagnostics.push(format!("line {}: {e}", n + 1));
            }
        }
    }
    bind_pairs(
        left,
        right,
        lines
            .iter()
            .map(|l| (l.detector.as_str(), &l.left, &l.right, l.meta.as_deref())),
        stats,
    )
}

fn attr(e: &BytesStart<'_>, name: &[u8], path: &Path) -> Result<Option<String>> {
    for a in e.attributes() {
        let a = a.map_err(|err| Error::format("NiCad XML", path, err))?;
        if a.key.as_ref() == name {
            let value = a
                .unescape_value()
                .map_err(|err| Error::format("NiCad XML", path, err))?;
            return Ok(Some(value.into_owned()));
        }
    }
    Ok(None)
}

fn source_fragment(e: &BytesStart<'_>, path: &Path) -> Result<Fragment> {
    let get = |name: &str| -> Result<String> {
        attr(e, name.as_bytes(), path)?
            .ok_or_else(|| Error::format("NiCad XML", path, format!("<source> without `{name}`")))
    };
    let line = |name: &str| -> Result<usize> {
        get(name)?
            .trim()
            .parse()
            .map_err(|err| Error::format("NiCad XML", path, format!("bad `{name}`: {err}")))
    };
    Ok(Fragment::Span {
        file: get("file")?,
        start: line("startline")?,
        end: line("endline")?,
    })
}

/// Parses NiCad clone-pair (`<clone>`) or clone-class (`<class>`) XML into a
/// report; clone classes expand to every pair of their fragments.
pub fn parse_nicad_xml(path: &Path, detector: &str) -> Result<DetectorReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = Reader::from_str(&text);
    reader.config_mut().trim_text(true);

    let mut report = DetectorReport {
        detector: detector.to_string(),
        pairs: Vec::new(),
    };
    let mut group: Option<(Vec<Fragment>, Option<String>)> = None;
    loop {
        let event = reader.read_event().map_err(|e| {
            Error::format(
                "NiCad XML",
                path,
                format!("at byte {}: {e}", reader.buffer_position()),
            )
        })?;
        match event {
            Event::Start(e) | Event::Empty(e) if matches!(e.name().as_ref(), b"clone" | b"class") => {
                let meta = attr(&e, b"similarity", path)?.map(|s| format!("similarity={s}"));
                group = Some((Vec::new(), meta));
            }
            Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"source" => {
                let frag = source_fragment(&e, path)?;
                match group.as_mut() {
                    Some((frags, _)) => frags.push(frag),
                    None => {
                        return Err(Error::format(
                            "NiCad XML",
                            path,
                            "<source> outside <clone>/<class>",
                        ))
                    }
                }
            }
            Event::End(e) if matches!(e.name().as_ref(), b"clone" | b"class") => {
                if let Some((frags, meta)) = group.take() {
                    for i in 0..frags.len() {
                        for j in i + 1..frags.len() {
                            report
                                .pairs
                                .push((frags[i].clone(), frags[j].clone(), meta.clone()));
                        }
                    }
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if group.is_some() {
        return Err(Error::format("NiCad XML", path, "unterminated clone element"));
    }
    Ok(report)
}

pub fn ingest_nicad_xml(
    path: &Path,
    left: &ProjectSnapshot,
    right: &ProjectSnapshot,
) -> Result<IngestOutcome> {
    let report = parse_nicad_xml(path, "nicad")?;
    ingest_report(&report, left, right)
}

pub fn write_pairs(path: &Path, pairs: &[CandidatePair]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for pair in pairs {
        let line = serde_json::to_string(pair).expect("pairs serialize");
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_pairs(path: &Path) -> Result<Vec<CandidatePair>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut pairs = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        pairs.push(
            serde_json::from_str(&line)
                .map_err(|e| Error::format("pair JSONL", path, format!("line {}: {e}", n + 1)))?,
        );
    }
    Ok(pairs)
}
