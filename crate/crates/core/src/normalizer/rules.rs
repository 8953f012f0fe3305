use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::FieldKind;
use crate::error::{Error, Result};
use crate::project::ProjectRole;

const SOOT_SOOTUP: &str = include_str!("../../rules/soot-sootup.toml");
const FINDBUGS_SPOTBUGS: &str = include_str!("../../rules/findbugs-spotbugs.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleScope {
    /// Every extracted detail: class name and doc, method name, return type,
    /// parameters, locals, method doc and inline comments.
    #[serde(alias = "all_details")]
    All,
    #[serde(alias = "method_name_only")]
    MethodName,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenameRule {
    pub scope: RuleScope,
    pub target: ProjectRole,
    pub pattern: String,
    pub replacement: String,
    pub order: i64,
}

impl RenameRule {
    fn applies_to(&self, field: FieldKind, role: ProjectRole) -> bool {
        self.target == role
            && match self.scope {
                RuleScope::All => true,
                RuleScope::MethodName => field == FieldKind::MethodName,
            }
    }
}

#[derive(Debug, Clone)]
struct CompiledRule {
    rule: RenameRule,
    regex: Regex,
    replacement: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct RuleFile {
    name: String,
    #[serde(default)]
    rules: Vec<RenameRule>,
}

/// An ordered set of scoped regular-expression rewrites.
#[derive(Debug, Clone)]
pub struct RuleSet {
    name: String,
    rules: Vec<CompiledRule>,
}

impl RuleSet {
    pub fn new(name: impl Into<String>, mut rules: Vec<RenameRule>) -> Result<Self> {
        // Stable: equal orders keep file order.
        rules.sort_by_key(|r| r.order);
        let rules = rules
            .into_iter()
            .map(|rule| {
                let regex = Regex::new(&rule.pattern).map_err(|source| Error::Regex {
                    pattern: rule.pattern.clone(),
                    source,
                })?;
                let replacement = convert_group_refs(&rule.replacement);
                Ok(CompiledRule {
                    rule,
                    regex,
                    replacement,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RuleSet {
            name: name.into(),
            rules,
        })
    }

    pub fn empty() -> Self {
        RuleSet {
            name: "none".to_string(),
            rules: Vec::new(),
        }
    }

    pub fn soot_sootup() -> Self {
        Self::from_toml_str(SOOT_SOOTUP).expect("bundled soot/sootup rules are valid")
    }

    pub fn findbugs_spotbugs() -> Self {
        Self::from_toml_str(FINDBUGS_SPOTBUGS).expect("bundled findbugs/spotbugs rules are valid")
    }

    /// Looks up a bundled rule set by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "none" | "empty" => Some(Self::empty()),
            "soot-sootup" | "soot-sootup-default" => Some(Self::soot_sootup()),
            "findbugs-spotbugs" | "findbugs-spotbugs-default" => Some(Self::findbugs_spotbugs()),
            _ => None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: RuleFile = toml::from_str(text).map_err(|e| Error::Config(format!("rule set: {e}")))?;
        Self::new(file.name, file.rules)
    }

    /// Reads a rule file; `.json` files are parsed as JSON, anything else as TOML.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            let file: RuleFile =
                serde_json::from_str(&text).map_err(|e| Error::format("rule set", path, e))?;
            Self::new(file.name, file.rules)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn to_toml_string(&self) -> String {
        let file = RuleFile {
            name: self.name.clone(),
            rules: self.rules().cloned().collect(),
        };
        toml::to_string(&file).expect("rule set serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rules(&self) -> impl Iterator<Item = &RenameRule> {
        self.rules.iter().map(|r| &r.rule)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Applies every rule that matches `role` and `field`, once each, in order.
    pub fn apply(&self, text: &str, field: FieldKind, role: ProjectRole) -> String {
        let mut out = text.to_string();
        for compiled in &self.rules {
            if compiled.rule.applies_to(field, role) {
                if let std::borrow::Cow::Owned(replaced) =
                    compiled.regex.replace_all(&out, compiled.replacement.as_str())
                {
                    out = replaced;
                }
            }
        }
        out
    }
}

/// Rewrites `\1`-style group references to `${1}`.
fn convert_group_refs(replacement: &str) -> String {
    let mut out = String::with_capacity(replacement.len() + 4);
    let mut chars = replacement.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '\\' && chars.peek().is_some_and(|d| d.is_ascii_digit()) {
            let mut digits = String::new();
            while let Some(d) = chars.peek().copied().filter(char::is_ascii_digit) {
                digits.push(d);
                chars.next();
            }
            out.push_str("${");
            out.push_str(&digits);
            out.push('}');
        } else {
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ProjectRole::{Original, Redesigned};

    #[test]
    fn python_group_refs() {
        assert_eq!(convert_group_refs(r"with\1"), "with${1}");
        assert_eq!(convert_group_refs(r"\12x"), "${12}x");
        assert_eq!(convert_group_refs("${1}s"), "${1}s");
        assert_eq!(convert_group_refs(r"a\b"), r"a\b");
    }

    #[test]
    fn wither_rule_is_method_name_only() {
        let rules = RuleSet::soot_sootup();
        assert_eq!(
            rules.apply("setName", FieldKind::MethodName, Original),
            "withName"
        );
        assert_eq!(rules.apply("setName", FieldKind::LocalVar, Original), "setName");
        assert_eq!(
            rules.apply("setName", FieldKind::MethodName, Redesigned),
            "setName"
        );
        assert_eq!(rules.apply("settle", FieldKind::MethodName, Original), "settle");
        assert_eq!(
            rules.apply("resetName", FieldKind::MethodName, Original),
            "resetName"
        );
    }

    #[test]
    fn boxes_collapse_before_unit_rename() {
        let rules = RuleSet::soot_sootup();
        assert_eq!(rules.apply("UnitBox", FieldKind::ReturnType, Original), "Stmt");
        assert_eq!(
            rules.apply("getUseBoxes", FieldKind::MethodName, Original),
            "getUses"
        );
        assert_eq!(
            rules.apply("List<ValueBox>", FieldKind::ReturnType, Original),
            "List<Value>"
        );
        assert_eq!(
            rules.apply("BasicBlock", FieldKind::ClassName, Redesigned),
            "Block"
        );
        assert_eq!(
            rules.apply("BasicBlock", FieldKind::ClassName, Original),
            "BasicBlock"
        );
    }

    #[test]
    fn spotbugs_rules() {
        let rules = RuleSet::findbugs_spotbugs();
        assert_eq!(
            rules.apply("Const.GOTO", FieldKind::Comment, Redesigned),
            "Constants.GOTO"
        );
        assert_eq!(
            rules.apply("Constants.GOTO", FieldKind::Comment, Redesigned),
            "Constants.GOTO"
        );
        assert_eq!(
            rules.apply("spotbugsTestCases", FieldKind::Param, Redesigned),
            "findbugsTestCases"
        );
        assert_eq!(rules.apply("Const", FieldKind::Param, Original), "Const");
    }

    #[test]
    fn file_round_trip_and_order() {
        let text = r#"
name = "custom"
[[rules]]
scope = "all"
target = "original"
pattern = "B"
replacement = "C"
order = 2
[[rules]]
scope = "all_details"
target = "original"
pattern = "A"
replacement = "B"
order = 1
"#;
        let rules = RuleSet::from_toml_str(text).unwrap();
        assert_eq!(rules.apply("A", FieldKind::ClassDoc, Original), "C");
        let again = RuleSet::from_toml_str(&rules.to_toml_string()).unwrap();
        assert_eq!(
            again.rules().collect::<Vec<_>>(),
            rules.rules().collect::<Vec<_>>()
        );
    }

    #[test]
    fn bad_pattern_names_itself() {
        let err = RuleSet::new(
            "bad",
            vec![RenameRule {
                scope: RuleScope::All,
                target: Original,
                pattern: "Box(?=es)".into(),
                replacement: String::new(),
                order: 0,
            }],
        )
        .unwrap_err();
        assert!(err.to_string().contains("Box(?=es)"));
    }
}
