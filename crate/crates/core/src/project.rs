use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Which side of a redesign a project plays in a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectRole {
    Original,
    Redesigned,
}

impl ProjectRole {
    pub fn as_str(self) -> &'static str {
        match self {
            ProjectRole::Original => "original",
            ProjectRole::Redesigned => "redesigned",
        }
    }
}

impl fmt::Display for ProjectRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProjectRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "original" | "left" => Ok(ProjectRole::Original),
            "redesigned" | "right" => Ok(ProjectRole::Redesigned),
            other => Err(format!("unknown project role `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProjectId {
    pub role: ProjectRole,
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeType {
    Production,
    Test,
}

impl CodeType {
    pub fn as_str(self) -> &'static str {
        match self {
            CodeType::Production => "production",
            CodeType::Test => "test",
        }
    }
}

impl fmt::Display for CodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CodeType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "production" | "prod" | "source" | "sources" => Ok(CodeType::Production),
            "test" | "tests" => Ok(CodeType::Test),
            other => Err(format!("unknown code type `{other}`")),
        }
    }
}
