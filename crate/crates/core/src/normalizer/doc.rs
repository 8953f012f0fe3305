use std::sync::LazyLock;

use regex::{Captures, Regex};

static INLINE_TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\{@(\w+)\s*([^{}]*)\}").unwrap());
static BLOCK_TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?m)^\s*@\w+").unwrap());
static HTML_TAG: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"</?[A-Za-z][A-Za-z0-9]*(?:\s[^<>]*)?/?>").unwrap());
static HTML_ENTITY: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"&(?:[A-Za-z]+|#[0-9]+|#x[0-9A-Fa-f]+);").unwrap());
static URL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(?:https?|ftp)://\S+|\bwww\.\S+").unwrap());
static TODO_LINE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b(?:TODO|FIXME)\b").unwrap());

/// English contractions expanded by default.
pub const DEFAULT_CONTRACTIONS: &[(&str, &str)] = &[
    ("doesn't", "does not"),
    ("don't", "do not"),
    ("can't", "cannot"),
    ("won't", "will not"),
    ("isn't", "is not"),
    ("aren't", "are not"),
    ("couldn't", "could not"),
    ("shouldn't", "should not"),
    ("wouldn't", "would not"),
    ("didn't", "did not"),
    ("wasn't", "was not"),
    ("weren't", "were not"),
    ("hasn't", "has not"),
    ("haven't", "have not"),
    ("it's", "it is"),
];

/// Cleans docstrings and comments down to their descriptive text.
#[derive(Debug, Clone)]
pub struct DocNormalizer {
    contractions: Vec<(String, String)>,
    contraction_re: Option<Regex>,
}

impl Default for DocNormalizer {
    fn default() -> Self {
        Self::with_contractions(
            DEFAULT_CONTRACTIONS
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string())),
        )
    }
}

impl DocNormalizer {
    pub fn with_contractions<I>(map: I) -> Self
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let contractions: Vec<(String, String)> =
            map.into_iter().map(|(k, v)| (k.to_lowercase(), v)).collect();
        let contraction_re = if contractions.is_empty() {
            None
        } else {
            let mut keys: Vec<&str> = contractions.iter().map(|(k, _)| k.as_str()).collect();
            keys.sort_by_key(|k| std::cmp::Reverse(k.len()));
            let alternation: Vec<String> = keys
                .iter()
                .map(|k| regex::escape(k).replace('\'', "['’]"))
                .collect();
            Some(Regex::new(&format!(r"(?i)\b(?:{})\b", alternation.join("|"))).unwrap())
        };
        DocNormalizer {
            contractions,
            contraction_re,
        }
    }

    pub fn normalize(&self, text: &str) -> String {
        let kept: Vec<&str> = text.lines().filter(|line| !TODO_LINE.is_match(line)).collect();
        let text = kept.join("\n");

        let text = INLINE_TAG.replace_all(&text, |caps: &Captures<'_>| {
            let payload = caps[2].trim();
            // `Type#member label` keeps both parts as words.
            format!(" {} ", payload.replace('#', " "))
        });
        let text = BLOCK_TAG.replace_all(&text, " ");
        // Markup first so URLs inside attributes go with their tag.
        let text = HTML_TAG.replace_all(&text, " ");
        let text = URL.replace_all(&text, " ");
        let text = HTML_ENTITY.replace_all(&text, |caps: &Captures<'_>| {
            match &caps[0] {
                "&lt;" => "<",
                "&gt;" => ">",
                "&amp;" => "&",
                "&quot;" => "\"",
                "&apos;" | "&#39;" => "'",
                _ => " ",
            }
            .to_string()
        });
        let text = match &self.contraction_re {
            Some(re) => re
                .replace_all(&text, |caps: &Captures<'_>| self.expand(&caps[0]))
                .into_owned(),
            None => text.into_owned(),
        };
        text.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    fn expand(&self, word: &str) -> String {
        let key = word.to_lowercase().replace('’', "'");
        let Some((_, expansion)) = self.contractions.iter().find(|(k, _)| *k == key) else {
            return word.to_string();
        };
        if word.chars().next().is_some_and(char::is_uppercase) {
            let mut chars = expansion.chars();
            match chars.next() {
                Some(first) => first.to_uppercase().chain(chars).collect(),
                None => String::new(),
            }
        } else {
            expansion.clone()
        }
    }
}

/// [`DocNormalizer::normalize`] with the default contraction map.
pub fn normalize_doc(text: &str) -> String {
    static DEFAULT: LazyLock<DocNormalizer> = LazyLock::new(DocNormalizer::default);
    DEFAULT.normalize(text)
}
