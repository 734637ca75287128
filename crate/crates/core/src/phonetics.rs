//! American Soundex over normalized tokens.

use std::fmt;

use thiserror::Error;

use crate::normalize::NormalizedMark;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhoneticError {
    #[error("cannot encode an empty token")]
    EmptyToken,
    #[error("token {0:?} is not normalized (expected [A-Z0-9]+)")]
    NotNormalized(String),
}

/// Either a four character Soundex code (`[A-Z][0-6]{3}`) or a digit-only
/// token passed through unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhoneticCode(String);

impl PhoneticCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_passthrough(&self) -> bool {
        self.0.bytes().all(|b| b.is_ascii_digit())
    }
}

impl fmt::Display for PhoneticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

// 0 marks vowels (A E I O U Y), which separate equal codes;
// H and W are handled separately because they do not.
fn digit(c: u8) -> u8 {
    match c {
        b'B' | b'F' | b'P' | b'V' => b'1',
        b'C' | b'G' | b'J' | b'K' | b'Q' | b'S' | b'X' | b'Z' => b'2',
        b'D' | b'T' => b'3',
        b'L' => b'4',
        b'M' | b'N' => b'5',
        b'R' => b'6',
        _ => b'0',
    }
}

/// Soundex code of a normalized token.
///
/// Digits inside a mixed token are ignored; a token without letters is
/// returned verbatim.
pub fn soundex(token: &str) -> Result<PhoneticCode, PhoneticError> {
    if token.is_empty() {
        return Err(PhoneticError::EmptyToken);
    }
    if !token
        .bytes()
        .all(|b| b.is_ascii_uppercase() || b.is_ascii_digit())
    {
        return Err(PhoneticError::NotNormalized(token.to_owned()));
    }

    let mut letters = token.bytes().filter(u8::is_ascii_uppercase);
    let Some(first) = letters.next() else {
        return Ok(PhoneticCode(token.to_owned()));
    };

    let mut code = Vec::with_capacity(4);
    code.push(first);
    let mut last = digit(first);
    for c in letters {
        if c == b'H' || c == b'W' {
            continue;
        }
        let d = digit(c);
        if d != b'0' && d != last {
            code.push(d);
            if code.len() == 4 {
                break;
            }
        }
        last = d;
    }
    code.resize(4, b'0');
    Ok(PhoneticCode(String::from_utf8(code).expect("ascii")))
}

/// Per-token code sequence of a normalized mark.
pub fn phonetic_key(mark: &NormalizedMark) -> Vec<PhoneticCode> {
    mark.tokens()
        .iter()
        .map(|t| soundex(t).expect("normalized tokens are non-empty [A-Z0-9]"))
        .collect()
}

/// The key as a single string (codes joined by spaces), used for index postings.
pub fn phonetic_key_string(mark: &NormalizedMark) -> String {
    let codes: Vec<String> = phonetic_key(mark).into_iter().map(|c| c.0).collect();
    codes.join(" ")
}

/// True when both marks are non-empty and their per-token codes are equal.
pub fn phonetic_match(a: &NormalizedMark, b: &NormalizedMark) -> bool {
    !a.is_empty() && a.tokens().len() == b.tokens().len() && phonetic_key(a) == phonetic_key(b)
}
