//! Composite risk score and risk bands.
//!
//! `base = w_edit * edit_similarity + w_phon * [phonetic match] + w_token * jaccard(tokens)`,
//! or 1.0 for an exact canonical match. The score is multiplied by
//! `class_mismatch_factor` when the query names classes and none overlap the
//! record's classes.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::editdist::edit_similarity;
use crate::normalize::NormalizedMark;
use crate::phonetics::phonetic_match;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoringError {
    #[error("cannot score an empty query")]
    EmptyQuery,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid band thresholds: {0}")]
    InvalidThresholds(String),
}

/// Matcher weights; always normalized to sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Weights {
    w_edit: f64,
    w_phon: f64,
    w_token: f64,
    class_mismatch_factor: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Self {
            w_edit: 0.5,
            w_phon: 0.3,
            w_token: 0.2,
            class_mismatch_factor: 0.6,
        }
    }
}

impl Weights {
    /// Rescales the three matcher weights to sum to one.
    pub fn new(
        w_edit: f64,
        w_phon: f64,
        w_token: f64,
        class_mismatch_factor: f64,
    ) -> Result<Self, ScoringError> {
        let parts = [w_edit, w_phon, w_token];
        if parts.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(ScoringError::InvalidWeights(
                "weights must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = parts.iter().sum();
        if sum <= 0.0 {
            return Err(ScoringError::InvalidWeights("weights sum to zero".into()));
        }
        if !(class_mismatch_factor > 0.0 && class_mismatch_factor <= 1.0) {
            return Err(ScoringError::InvalidWeights(format!(
                "class_mismatch_factor {class_mismatch_factor} outside (0, 1]"
            )));
        }
        Ok(Self {
            w_edit: w_edit / sum,
            w_phon: w_phon / sum,
            w_token: w_token / sum,
            class_mismatch_factor,
        })
    }

    /// Weighted sum of the three matcher signals, before any class factor.
    pub fn blend(&self, edit_similarity: f64, phonetic: bool, jaccard: f64) -> f64 {
        let phon = if phonetic { 1.0 } else { 0.0 };
        self.w_edit * edit_similarity + self.w_phon * phon + self.w_token * jaccard
    }

    pub fn w_edit(&self) -> f64 {
        self.w_edit
    }

    pub fn w_phon(&self) -> f64 {
        self.w_phon
    }

    pub fn w_token(&self) -> f64 {
        self.w_token
    }

    pub fn class_mismatch_factor(&self) -> f64 {
        self.class_mismatch_factor
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct RiskScore(f64);

impl RiskScore {
    /// Clamps into `[0, 1]`.
    pub fn new(value: f64) -> Self {
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Value rounded to four decimal places, as shown to users.
    pub fn display_value(self) -> f64 {
        (self.0 * 10_000.0).round() / 10_000.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RiskBand {
    VeryHigh,
    High,
    Medium,
    Low,
}

impl RiskBand {
    pub const ALL: [RiskBand; 4] = [
        RiskBand::VeryHigh,
        RiskBand::High,
        RiskBand::Medium,
        RiskBand::Low,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RiskBand::VeryHigh => "VERY_HIGH",
            RiskBand::High => "HIGH",
            RiskBand::Medium => "MEDIUM",
            RiskBand::Low => "LOW",
        }
    }
}

impl fmt::Display for RiskBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Lower bounds (inclusive) of the three upper bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandThresholds {
    very_high: f64,
    high: f64,
    medium: f64,
}

impl Default for BandThresholds {
    fn default() -> Self {
        Self {
            very_high: 0.85,
            high: 0.65,
            medium: 0.40,
        }
    }
}

impl BandThresholds {
    pub fn new(very_high: f64, high: f64, medium: f64) -> Result<Self, ScoringError> {
        if !(0.0 < medium && medium < high && high < very_high && very_high <= 1.0) {
            return Err(ScoringError::InvalidThresholds(format!(
                "need 0 < medium < high < very_high <= 1, got {medium}/{high}/{very_high}"
            )));
        }
        Ok(Self {
            very_high,
            high,
            medium,
        })
    }

    pub fn band(&self, score: RiskScore) -> RiskBand {
        let v = score.value();
        if v >= self.very_high {
            RiskBand::VeryHigh
        } else if v >= self.high {
            RiskBand::High
        } else if v >= self.medium {
            RiskBand::Medium
        } else {
            RiskBand::Low
        }
    }
}

/// Band under the default thresholds (0.85 / 0.65 / 0.40).
pub fn band(score: RiskScore) -> RiskBand {
    BandThresholds::default().band(score)
}

/// Jaccard similarity of the two token sets; 0 when both are empty.
pub fn token_jaccard(a: &NormalizedMark, b: &NormalizedMark) -> f64 {
    let a: HashSet<&str> = a.tokens().iter().map(String::as_str).collect();
    let b: HashSet<&str> = b.tokens().iter().map(String::as_str).collect();
    let union = a.union(&b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(&b).count() as f64 / union as f64
}

/// Score of `record` (already normalized) against `query`.
pub fn score(
    query: &NormalizedMark,
    record: &NormalizedMark,
    record_classes: &BTreeSet<u8>,
    query_classes: Option<&BTreeSet<u8>>,
    weights: &Weights,
) -> Result<RiskScore, ScoringError> {
    if query.is_empty() {
        return Err(ScoringError::EmptyQuery);
    }
    let base = if query.canonical() == record.canonical() {
        1.0
    } else {
        weights.blend(
            edit_similarity(query.canonical(), record.canonical()),
            phonetic_match(query, record),
            token_jaccard(query, record),
        )
    };
    let value = match query_classes {
        Some(wanted) if wanted.is_disjoint(record_classes) => base * weights.class_mismatch_factor,
        _ => base,
    };
    Ok(RiskScore::new(value))
}
