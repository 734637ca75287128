//! Text normalization shared by queries and corpus marks.

use unicode_normalization::UnicodeNormalization;

/// A mark reduced to uppercase ASCII alphanumeric tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NormalizedMark {
    canonical: String,
    tokens: Vec<String>,
}

impl NormalizedMark {
    /// Tokens joined by single spaces.
    pub fn canonical(&self) -> &str {
        &self.canonical
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// The same mark with [`singularize`] applied to every token.
    pub fn fold_plurals(&self) -> NormalizedMark {
        Self::from_tokens(
            self.tokens
                .iter()
                .map(|t| singularize(t).to_owned())
                .collect(),
        )
    }

    fn from_tokens(tokens: Vec<String>) -> Self {
        Self {
            canonical: tokens.join(" "),
            tokens,
        }
    }
}

/// Uppercases, folds diacritics (NFKD, combining marks dropped), replaces every
/// other non-alphanumeric character with a space and splits on whitespace.
/// Characters with no ASCII decomposition are dropped.
pub fn normalize(raw: &str) -> NormalizedMark {
    let mut folded = String::with_capacity(raw.len());
    for c in raw.nfkd() {
        if c.is_ascii_alphanumeric() {
            folded.push(c.to_ascii_uppercase());
        } else if c.is_ascii() || c.is_whitespace() {
            folded.push(' ');
        }
    }
    NormalizedMark::from_tokens(folded.split_ascii_whitespace().map(str::to_owned).collect())
}

/// Drops one trailing `S` from tokens longer than three characters that do
/// not end in `SS`.
pub fn singularize(token: &str) -> &str {
    if token.len() > 3 && token.ends_with('S') && !token.ends_with("SS") {
        &token[..token.len() - 1]
    } else {
        token
    }
}
