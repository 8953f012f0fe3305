use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ClassRecord, ExtractSummary, MethodRecord, SourceSpan};
use crate::error::{Error, Result};
use crate::project::{ProjectId, ProjectRole};

pub const SNAPSHOT_FORMAT_VERSION: u32 = 1;

/// Immutable result of extracting one project tree.
#[derive(Debug, Clone)]
pub struct ProjectSnapshot {
    project: ProjectId,
    root: PathBuf,
    records: Vec<MethodRecord>,
    classes: BTreeMap<String, ClassRecord>,
    summary: ExtractSummary,
    by_id: HashMap<String, usize>,
    by_signature: HashMap<String, Vec<usize>>,
    by_file: HashMap<String, Vec<usize>>,
    by_class: HashMap<String, Vec<usize>>,
    files: BTreeSet<String>,
}

/// Outcome of binding a reported fragment to an extracted method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FragmentMatch<'a> {
    Method(&'a MethodRecord),
    NoOverlap,
    UnknownFile,
}

impl<'a> FragmentMatch<'a> {
    pub fn method(self) -> Option<&'a MethodRecord> {
        match self {
            FragmentMatch::Method(m) => Some(m),
            _ => None,
        }
    }
}

/// Sidecar written next to the method JSONL.
#[derive(Debug, Serialize, Deserialize)]
struct SnapshotSidecar {
    format_version: u32,
    project: ProjectId,
    root: PathBuf,
    summary: ExtractSummary,
    classes: Vec<ClassRecord>,
}

impl ProjectSnapshot {
    pub fn new(
        project: ProjectId,
        root: PathBuf,
        classes: Vec<ClassRecord>,
        mut records: Vec<MethodRecord>,
        summary: ExtractSummary,
    ) -> Result<Self> {
        let mut class_index: BTreeMap<String, ClassRecord> = BTreeMap::new();
        for class in classes {
            if let Some(prev) = class_index.get(&class.qualified_name) {
                return Err(Error::Config(format!(
                    "duplicate class `{}` in {} and {}",
                    class.qualified_name, prev.file_path, class.file_path
                )));
            }
            class_index.insert(class.qualified_name.clone(), class);
        }
        records.sort_by(|a, b| {
            (a.file_path.as_str(), a.start_line, a.id.as_str()).cmp(&(
                b.file_path.as_str(),
                b.start_line,
                b.id.as_str(),
            ))
        });

        let mut snapshot = ProjectSnapshot {
            project,
            root,
            records,
            classes: class_index,
            summary,
            by_id: HashMap::new(),
            by_signature: HashMap::new(),
            by_file: HashMap::new(),
            by_class: HashMap::new(),
            files: BTreeSet::new(),
        };
        snapshot.files = snapshot.classes.values().map(|c| c.file_path.clone()).collect();
        for (idx, rec) in snapshot.records.iter().enumerate() {
            if !snapshot.classes.contains_key(&rec.class_name) {
                return Err(Error::Config(format!(
                    "method `{}` refers to unknown class `{}`",
                    rec.id, rec.class_name
                )));
            }
            if snapshot.by_id.insert(rec.id.clone(), idx).is_some() {
                return Err(Error::Config(format!("duplicate method id `{}`", rec.id)));
            }
            snapshot
                .by_signature
                .entry(MethodRecord::signature_key(
                    &rec.class_name,
                    &rec.method_name,
                    &rec.params,
                ))
                .or_default()
                .push(idx);
            snapshot
                .by_file
                .entry(rec.file_path.clone())
                .or_default()
                .push(idx);
            snapshot
                .by_class
                .entry(rec.class_name.clone())
                .or_default()
                .push(idx);
        }
        Ok(snapshot)
    }

    pub fn project(&self) -> &ProjectId {
        &self.project
    }

    pub fn role(&self) -> ProjectRole {
        self.project.role
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn records(&self) -> &[MethodRecord] {
        &self.records
    }

    pub fn classes(&self) -> &BTreeMap<String, ClassRecord> {
        &self.classes
    }

    pub fn summary(&self) -> &ExtractSummary {
        &self.summary
    }

    pub fn get(&self, id: &str) -> Option<&MethodRecord> {
        self.by_id.get(id).map(|&i| &self.records[i])
    }

    pub fn class_of(&self, record: &MethodRecord) -> &ClassRecord {
        // Resolution is checked at construction.
        &self.classes[&record.class_name]
    }

    /// Methods declared directly in the given class.
    pub fn methods_of_class(&self, qualified_name: &str) -> impl Iterator<Item = &MethodRecord> {
        self.by_class
            .get(qualified_name)
            .into_iter()
            .flatten()
            .map(|&i| &self.records[i])
    }

    pub fn has_file(&self, rel_path: &str) -> bool {
        self.files.contains(rel_path)
    }

    /// Every file that declared at least one class, relative to the root.
    pub fn files(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(String::as_str)
    }

    /// Resolves a method key: either a full id, or `Class#name(T1,T2)` when
    /// that signature is unique in the snapshot.
    pub fn resolve_key(&self, key: &str) -> Option<&MethodRecord> {
        if let Some(rec) = self.get(key) {
            return Some(rec);
        }
        match self.by_signature.get(key).map(Vec::as_slice) {
            Some([only]) => Some(&self.records[*only]),
            _ => None,
        }
    }

    /// Binds a reported line range to the method whose span overlaps it best
    /// (line-range Jaccard), preferring smaller spans and then earlier starts.
    pub fn match_fragment(&self, frag: &SourceSpan) -> FragmentMatch<'_> {
        let Some(candidates) = self.by_file.get(&frag.file_path) else {
            return if self.has_file(&frag.file_path) {
                FragmentMatch::NoOverlap
            } else {
                FragmentMatch::UnknownFile
            };
        };
        let mut best: Option<(&MethodRecord, f64)> = None;
        for rec in candidates.iter().map(|&i| &self.records[i]) {
            let overlap = frag.line_jaccard(&rec.span());
            if overlap <= 0.0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((cur, cur_overlap)) => {
                    if overlap != cur_overlap {
                        overlap > cur_overlap
                    } else {
                        (rec.loc, rec.start_line) < (cur.loc, cur.start_line)
                    }
                }
            };
            if better {
                best = Some((rec, overlap));
            }
        }
        match best {
            Some((rec, _)) => FragmentMatch::Method(rec),
            None => FragmentMatch::NoOverlap,
        }
    }

    /// Sidecar path used for `path`: `snap.jsonl` -> `snap.classes.json`.
    pub fn sidecar_path(path: &Path) -> PathBuf {
        path.with_extension("classes.json")
    }

    /// Writes methods as JSON Lines to `path` and classes to the sidecar.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        for rec in &self.records {
            let line = serde_json::to_string(rec).expect("method records serialize");
            writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))?;

        let sidecar = SnapshotSidecar {
            format_version: SNAPSHOT_FORMAT_VERSION,
            project: self.project.clone(),
            root: self.root.clone(),
            summary: self.summary.clone(),
            classes: self.classes.values().cloned().collect(),
        };
        let side_path = Self::sidecar_path(path);
        let text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
        std::fs::write(&side_path, text + "\n").map_err(|e| Error::io(&side_path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let side_path = Self::sidecar_path(path);
        let side_text = std::fs::read_to_string(&side_path).map_err(|e| Error::io(&side_path, e))?;
        let sidecar: SnapshotSidecar =
            serde_json::from_str(&side_text).map_err(|e| Error::format("snapshot sidecar", &side_path, e))?;
        if sidecar.format_version != SNAPSHOT_FORMAT_VERSION {
            return Err(Error::format(
                "snapshot sidecar",
                &side_path,
                format!("unsupported format_version {}", sidecar.format_version),
            ));
        }

        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut records = Vec::new();
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: MethodRecord = serde_json::from_str(&line)
                .map_err(|e| Error::format("snapshot", path, format!("line {}: {e}", n + 1)))?;
            records.push(rec);
        }
        Self::new(
            sidecar.project,
            sidecar.root,
            sidecar.classes,
            records,
            sidecar.summary,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractor::{ClassKind, TypedName};

    fn method(file: &str, name: &str, start: usize, end: usize) -> MethodRecord {
        MethodRecord {
            id: MethodRecord::make_id("p.A", name, &[], start, end),
            class_name: "p.A".into(),
            file_path: file.into(),
            method_name: name.into(),
            return_type: "void".into(),
            params: vec![],
            local_vars: vec![],
            method_doc: String::new(),
            inline_comments: vec![],
            start_line: start,
            end_line: end,
            loc: end - start + 1,
            body_text: "\n".repeat(end - start),
            is_test: false,
        }
    }

    fn snapshot(records: Vec<MethodRecord>) -> ProjectSnapshot {
        let class = ClassRecord {
            qualified_name: "p.A".into(),
            package: "p".into(),
            class_doc: String::new(),
            file_path: "p/A.java".into(),
            kind: ClassKind::Class,
        };
        let empty = ClassRecord {
            qualified_name: "p.Empty".into(),
            file_path: "p/Empty.java".into(),
            ..class.clone()
        };
        ProjectSnapshot::new(
            ProjectId {
                role: ProjectRole::Original,
                name: "t".into(),
            },
            PathBuf::from("/tmp/none"),
            vec![class, empty],
            records,
            ExtractSummary::default(),
        )
        .unwrap()
    }

    #[test]
    fn fragment_binding() {
        let snap = snapshot(vec![
            method("p/A.java", "first", 1, 10),
            method("p/A.java", "second", 11, 20),
        ]);
        let exact = snap.match_fragment(&SourceSpan::new("p/A.java", 11, 20));
        assert_eq!(exact.method().unwrap().method_name, "second");

        let mostly_first = snap.match_fragment(&SourceSpan::new("p/A.java", 3, 12));
        assert_eq!(mostly_first.method().unwrap().method_name, "first");

        assert_eq!(
            snap.match_fragment(&SourceSpan::new("p/Empty.java", 1, 5)),
            FragmentMatch::NoOverlap
        );
        assert_eq!(
            snap.match_fragment(&SourceSpan::new("p/A.java", 30, 40)),
            FragmentMatch::NoOverlap
        );
        assert_eq!(
            snap.match_fragment(&SourceSpan::new("q/B.java", 1, 5)),
            FragmentMatch::UnknownFile
        );
    }

    #[test]
    fn equal_overlap_prefers_smaller_span() {
        // 5..=8 overlaps both 12-line spans with 4/12; the earlier start wins.
        let snap = snapshot(vec![
            method("p/A.java", "outer", 1, 12),
            method("p/A.java", "inner", 5, 16),
        ]);
        let hit = snap.match_fragment(&SourceSpan::new("p/A.java", 5, 8));
        assert_eq!(hit.method().unwrap().method_name, "outer");
        let snap = snapshot(vec![
            method("p/A.java", "big", 1, 12),
            method("p/A.java", "small", 9, 14),
        ]);
        // 9..=12 overlaps big with 4/12 and small with 4/6.
        let hit = snap.match_fragment(&SourceSpan::new("p/A.java", 9, 12));
        assert_eq!(hit.method().unwrap().method_name, "small");
    }

    #[test]
    fn key_resolution_by_signature() {
        let mut overloaded = method("p/A.java", "f", 20, 25);
        overloaded.params = vec![TypedName::new("int", "x")];
        overloaded.id = MethodRecord::make_id("p.A", "f", &overloaded.params, 20, 25);
        let snap = snapshot(vec![method("p/A.java", "f", 1, 10), overloaded]);
        assert_eq!(snap.resolve_key("p.A#f()").unwrap().start_line, 1);
        assert_eq!(snap.resolve_key("p.A#f(int)").unwrap().start_line, 20);
        assert!(snap.resolve_key("p.A#g()").is_none());
        assert!(snap.resolve_key("p.A#f()@1-10").is_some());
    }

    #[test]
    fn rejects_unknown_class() {
        let mut rec = method("p/A.java", "f", 1, 2);
        rec.class_name = "p.Missing".into();
        let err = ProjectSnapshot::new(
            ProjectId {
                role: ProjectRole::Original,
                name: "t".into(),
            },
            PathBuf::new(),
            vec![],
            vec![rec],
            ExtractSummary::default(),
        );
        assert!(err.is_err());
    }
}
