//! Java method extraction.
//!
//! Walks a source tree, parses every `.java` file with tree-sitter and
//! collects one [`MethodRecord`] per concrete method body together with the
//! [`ClassRecord`]s that contain them. Interface members, abstract and native
//! methods, constructors, initializer blocks, lambdas and overrides of the
//! universal `Object` methods are left out.

mod java;
mod snapshot;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::project::{CodeType, ProjectId, ProjectRole};

pub use snapshot::{FragmentMatch, ProjectSnapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Class,
    Enum,
    Interface,
    Record,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    /// Package plus nested-class path, e.g. `soot.util.Chain.Iter`.
    pub qualified_name: String,
    /// Package part of `qualified_name`; empty for the default package.
    pub package: String,
    pub class_doc: String,
    pub file_path: String,
    pub kind: ClassKind,
}

impl ClassRecord {
    /// Qualified name without the package prefix.
    pub fn simple_name(&self) -> &str {
        if self.package.is_empty() {
            &self.qualified_name
        } else {
            self.qualified_name
                .strip_prefix(&self.package)
                .and_then(|rest| rest.strip_prefix('.'))
                .unwrap_or(&self.qualified_name)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypedName {
    #[serde(rename = "type")]
    pub type_text: String,
    pub name: String,
}

impl TypedName {
    pub fn new(type_text: impl Into<String>, name: impl Into<String>) -> Self {
        TypedName {
            type_text: type_text.into(),
            name: name.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodRecord {
    pub id: String,
    pub class_name: String,
    pub file_path: String,
    pub method_name: String,
    pub return_type: String,
    pub params: Vec<TypedName>,
    pub local_vars: Vec<TypedName>,
    pub method_doc: String,
    pub inline_comments: Vec<String>,
    pub start_line: usize,
    pub end_line: usize,
    pub loc: usize,
    pub body_text: String,
    pub is_test: bool,
}

impl MethodRecord {
    pub fn span(&self) -> SourceSpan {
        SourceSpan::new(self.file_path.clone(), self.start_line, self.end_line)
    }

    pub fn code_type(&self) -> CodeType {
        if self.is_test {
            CodeType::Test
        } else {
            CodeType::Production
        }
    }

    pub(crate) fn make_id(
        class_name: &str,
        method_name: &str,
        params: &[TypedName],
        start_line: usize,
        end_line: usize,
    ) -> String {
        format!(
            "{}@{start_line}-{end_line}",
            Self::signature_key(class_name, method_name, params)
        )
    }

    /// The id without its span suffix: `pkg.Class#name(T1,T2)`.
    pub fn signature_key(class_name: &str, method_name: &str, params: &[TypedName]) -> String {
        let types: Vec<&str> = params.iter().map(|p| p.type_text.as_str()).collect();
        format!("{class_name}#{method_name}({})", types.join(","))
    }
}

/// Inclusive, 1-based line range within a file.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SourceSpan {
    pub file_path: String,
    pub start_line: usize,
    pub end_line: usize,
}

impl SourceSpan {
    pub fn new(file_path: impl Into<String>, start_line: usize, end_line: usize) -> Self {
        SourceSpan {
            file_path: file_path.into(),
            start_line,
            end_line,
        }
    }

    pub fn len(&self) -> usize {
        self.end_line.saturating_sub(self.start_line) + 1
    }

    pub fn is_empty(&self) -> bool {
        self.end_line < self.start_line
    }

    /// Jaccard overlap of the two line ranges, ignoring file paths.
    pub fn line_jaccard(&self, other: &SourceSpan) -> f64 {
        let lo = self.start_line.max(other.start_line);
        let hi = self.end_line.min(other.end_line);
        if hi < lo {
            return 0.0;
        }
        let inter = hi - lo + 1;
        let union = self.len() + other.len() - inter;
        inter as f64 / union as f64
    }
}

/// A method signature that is never extracted; `arity: None` matches any
/// parameter count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedMethod {
    pub name: String,
    pub arity: Option<usize>,
}

impl ExcludedMethod {
    pub fn new(name: &str, arity: Option<usize>) -> Self {
        ExcludedMethod {
            name: name.to_string(),
            arity,
        }
    }

    pub fn matches(&self, name: &str, arity: usize) -> bool {
        self.name == name && self.arity.is_none_or(|a| a == arity)
    }

    pub fn object_methods() -> Vec<ExcludedMethod> {
        vec![
            ExcludedMethod::new("toString", Some(0)),
            ExcludedMethod::new("equals", Some(1)),
            ExcludedMethod::new("hashCode", Some(0)),
            ExcludedMethod::new("clone", Some(0)),
            ExcludedMethod::new("finalize", Some(0)),
        ]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractConfig {
    pub project: ProjectId,
    /// Path prefixes (relative to the root, `/`-separated) that mark test code.
    pub test_roots: Vec<String>,
    pub excluded_methods: Vec<ExcludedMethod>,
}

impl ExtractConfig {
    pub fn new(role: ProjectRole, name: impl Into<String>) -> Self {
        ExtractConfig {
            project: ProjectId {
                role,
                name: name.into(),
            },
            test_roots: vec!["src/test/".to_string()],
            excluded_methods: ExcludedMethod::object_methods(),
        }
    }

    pub fn with_test_roots<I, S>(mut self, roots: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.test_roots = roots.into_iter().map(Into::into).collect();
        self
    }

    fn is_test_path(&self, rel: &str) -> bool {
        self.test_roots
            .iter()
            .any(|root| rel.starts_with(root.trim_start_matches("./")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub file: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractSummary {
    pub files_seen: usize,
    pub files_parsed: usize,
    pub files_failed: usize,
    pub diagnostics: Vec<Diagnostic>,
}

pub(crate) struct FileExtraction {
    pub classes: Vec<ClassRecord>,
    pub methods: Vec<MethodRecord>,
}

/// Extracts every concrete method under `root`.
pub fn extract(root: &Path, config: &ExtractConfig) -> Result<ProjectSnapshot> {
    if !root.is_dir() {
        return Err(Error::RootNotFound(root.to_path_buf()));
    }

    let mut files: Vec<(PathBuf, String)> = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into())
        })?;
        let path = entry.path();
        if entry.file_type().is_file() && path.extension().is_some_and(|ext| ext == "java") {
            let rel = relative_path(root, path);
            files.push((path.to_path_buf(), rel));
        }
    }
    files.sort_by(|a, b| a.1.cmp(&b.1));

    let results: Vec<(String, std::result::Result<FileExtraction, String>)> = files
        .par_iter()
        .map(|(path, rel)| {
            let outcome = std::fs::read(path).map_err(|e| e.to_string()).and_then(|bytes| {
                let source = String::from_utf8_lossy(&bytes);
                java::extract_file(&source, rel, config.is_test_path(rel), config)
            });
            (rel.clone(), outcome)
        })
        .collect();

    let mut summary = ExtractSummary {
        files_seen: results.len(),
        ..Default::default()
    };
    let mut classes = Vec::new();
    let mut methods = Vec::new();
    for (rel, outcome) in results {
        match outcome {
            Ok(file) => {
                summary.files_parsed += 1;
                classes.extend(file.classes);
                methods.extend(file.methods);
            }
            Err(message) => {
                summary.files_failed += 1;
                summary.diagnostics.push(Diagnostic { file: rel, message });
            }
        }
    }

    ProjectSnapshot::new(
        config.project.clone(),
        root.to_path_buf(),
        classes,
        methods,
        summary,
    )
}

fn relative_path(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}
