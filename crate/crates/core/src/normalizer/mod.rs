//! Redesign-aware preprocessing: renaming rules, doc cleanup, tokenization.

mod doc;
mod rules;
mod tokenize;

use serde::{Deserialize, Serialize};

use crate::extractor::{ClassRecord, MethodRecord, TypedName};
use crate::project::ProjectRole;

pub use doc::{normalize_doc, DocNormalizer, DEFAULT_CONTRACTIONS};
pub use rules::{RenameRule, RuleScope, RuleSet};
pub use tokenize::{tokenize, TokenSeq};

/// The method detail a piece of text came from; gates method-name-only rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    ClassName,
    ClassDoc,
    MethodName,
    ReturnType,
    Param,
    LocalVar,
    MethodDoc,
    Comment,
    /// Verbatim method source, used by embedding providers.
    Body,
}

impl FieldKind {
    fn is_prose(self) -> bool {
        matches!(
            self,
            FieldKind::ClassDoc | FieldKind::MethodDoc | FieldKind::Comment
        )
    }
}

/// Token sequences for every detail compared by the alignment score.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedDetails {
    pub class_name: TokenSeq,
    pub class_doc: TokenSeq,
    pub method_name: TokenSeq,
    pub return_type: TokenSeq,
    /// Type then name for each parameter, in declaration order.
    pub params: TokenSeq,
    pub local_vars: TokenSeq,
    pub method_doc: TokenSeq,
    /// All inline comments, concatenated in source order.
    pub comments: TokenSeq,
}

/// Applies renaming rules, doc cleanup and tokenization to method details.
#[derive(Debug, Clone)]
pub struct Normalizer {
    rules: RuleSet,
    doc: DocNormalizer,
    renaming: bool,
}

impl Normalizer {
    pub fn new(rules: RuleSet) -> Self {
        Normalizer {
            rules,
            doc: DocNormalizer::default(),
            renaming: true,
        }
    }

    pub fn with_doc_normalizer(mut self, doc: DocNormalizer) -> Self {
        self.doc = doc;
        self
    }

    /// Turns renaming off while keeping doc cleanup and tokenization.
    pub fn without_renaming(mut self) -> Self {
        self.renaming = false;
        self
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn renaming_enabled(&self) -> bool {
        self.renaming
    }

    pub fn apply_rules(&self, text: &str, field: FieldKind, role: ProjectRole) -> String {
        if self.renaming {
            self.rules.apply(text, field, role)
        } else {
            text.to_string()
        }
    }

    /// Rules, then doc cleanup for prose fields, then tokenization.
    pub fn field_tokens(&self, text: &str, field: FieldKind, role: ProjectRole) -> TokenSeq {
        let renamed = self.apply_rules(text, field, role);
        if field.is_prose() {
            tokenize(&self.doc.normalize(&renamed))
        } else {
            tokenize(&renamed)
        }
    }

    fn typed_names(&self, items: &[TypedName], field: FieldKind, role: ProjectRole) -> TokenSeq {
        let mut out = TokenSeq::new();
        for item in items {
            out.extend(self.field_tokens(&item.type_text, field, role));
            out.extend(self.field_tokens(&item.name, field, role));
        }
        out
    }

    pub fn normalize_record(
        &self,
        record: &MethodRecord,
        class: &ClassRecord,
        role: ProjectRole,
    ) -> NormalizedDetails {
        let mut comments = TokenSeq::new();
        for comment in &record.inline_comments {
            comments.extend(self.field_tokens(comment, FieldKind::Comment, role));
        }
        NormalizedDetails {
            class_name: self.field_tokens(class.simple_name(), FieldKind::ClassName, role),
            class_doc: self.field_tokens(&class.class_doc, FieldKind::ClassDoc, role),
            method_name: self.field_tokens(&record.method_name, FieldKind::MethodName, role),
            return_type: self.field_tokens(&record.return_type, FieldKind::ReturnType, role),
            params: self.typed_names(&record.params, FieldKind::Param, role),
            local_vars: self.typed_names(&record.local_vars, FieldKind::LocalVar, role),
            method_doc: self.field_tokens(&record.method_doc, FieldKind::MethodDoc, role),
            comments,
        }
    }
}
