use serde::{Deserialize, Serialize};

/// Ordered lowercase word tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenSeq(pub Vec<String>);

impl TokenSeq {
    pub fn new() -> Self {
        TokenSeq(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn extend(&mut self, other: TokenSeq) {
        self.0.extend(other.0);
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenSeq(iter.into_iter().map(Into::into).collect())
    }
}

/// Splits text into lowercase word tokens.
///
/// Anything that is not a letter or digit separates words. Words are then cut
/// at camel-case boundaries: lower or digit followed by upper (`getName`,
/// `Base64Encoder`) and the last capital of an acronym run followed by lower
/// (`XMLParser` -> `xml`, `parser`). Digits stay with their segment.
pub fn tokenize(text: &str) -> TokenSeq {
    let mut tokens = Vec::new();
    for word in text.split(|c: char| !c.is_alphanumeric()) {
        if word.is_empty() {
            continue;
        }
        split_camel(word, &mut tokens);
    }
    TokenSeq(tokens)
}

fn split_camel(word: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = word.chars().collect();
    let mut start = 0;
    for i in 1..chars.len() {
        let prev = chars[i - 1];
        let cur = chars[i];
        let lower_to_upper = (prev.is_lowercase() || prev.is_numeric()) && cur.is_uppercase();
        let acronym_end = prev.is_uppercase()
            && cur.is_uppercase()
            && chars.get(i + 1).is_some_and(|next| next.is_lowercase());
        if lower_to_upper || acronym_end {
            push_token(&chars[start..i], out);
            start = i;
        }
    }
    push_token(&chars[start..], out);
}

fn push_token(chars: &[char], out: &mut Vec<String>) {
    // Lowercasing can emit combining marks or leave caseless capitals; keep
    // only lowercase-safe alphanumerics.
    let token: String = chars
        .iter()
        .flat_map(|c| c.to_lowercase())
        .filter(|c| c.is_alphanumeric() && !c.is_uppercase())
        .collect();
    if !token.is_empty() {
        out.push(token);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s).0
    }

    #[test]
    fn camel_case() {
        assert_eq!(toks("getEscapedStringOf"), ["get", "escaped", "string", "of"]);
        assert_eq!(toks("List<SootClass>"), ["list", "soot", "class"]);
        assert_eq!(toks(""), Vec::<String>::new());
    }

    #[test]
    fn acronyms_and_digits() {
        assert_eq!(toks("XMLParser"), ["xml", "parser"]);
        assert_eq!(toks("URLDecoder"), ["url", "decoder"]);
        assert_eq!(toks("parseURL"), ["parse", "url"]);
        assert_eq!(toks("Base64Encoder"), ["base64", "encoder"]);
        assert_eq!(toks("utf8Decoder"), ["utf8", "decoder"]);
        assert_eq!(toks("HTML5Parser"), ["html5", "parser"]);
        assert_eq!(toks("x2"), ["x2"]);
    }

    #[test]
    fn punctuation_and_snake_case() {
        assert_eq!(toks("MAX_VALUE"), ["max", "value"]);
        assert_eq!(toks("soot.jimple.Stmt"), ["soot", "jimple", "stmt"]);
        assert_eq!(
            toks("Map<String, List<Unit>>[]"),
            ["map", "string", "list", "unit"]
        );
        assert_eq!(toks("does not  apply."), ["does", "not", "apply"]);
    }

    proptest! {
        #[test]
        fn output_has_no_uppercase_or_punctuation(text in "\\PC{0,40}") {
            for token in tokenize(&text).0 {
                prop_assert!(!token.is_empty());
                prop_assert!(token.chars().all(|c| c.is_alphanumeric() && !c.is_uppercase()), "{token:?}");
            }
        }

        #[test]
        fn ascii_letters_are_preserved(text in "[A-Za-z0-9_. <>]{0,40}") {
            let joined: String = tokenize(&text).0.concat();
            let expected: String = text
                .chars()
                .filter(|c| c.is_ascii_alphanumeric())
                .map(|c| c.to_ascii_lowercase())
                .collect();
            prop_assert_eq!(joined, expected);
        }
    }
}
