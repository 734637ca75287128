//! Knockout search: normalize, generate candidates, verify, score, rank.
//!
//! A record is a match when its canonical string equals the query's, or when
//! any enabled matcher accepts it:
//!
//! * `edit`: Levenshtein distance of the canonical strings is at most `k`;
//! * `phonetic`: per-token Soundex sequences are equal;
//! * `tokens`: at least one token is shared;
//! * `grams`: the padded 3-gram overlap reaches `max(|G(q)| - 3k, 1)`.
//!
//! Token and phonetic matchers compare plural-folded tokens when the index
//! was built with plural folding. Matches are ordered by exact match, score,
//! status (live, pending, dead) and finally serial, so the order is total.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::Status;
use crate::editdist::levenshtein;
use crate::index::{common_grams, gram_threshold, padded_grams, CandidateOptions, Index, RecordId};
use crate::normalize::{normalize, NormalizedMark};
use crate::phonetics::phonetic_match;
use crate::scoring::{self, BandThresholds, RiskBand, RiskScore, Weights};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("query {0:?} contains no letters or digits")]
    EmptyQuery(String),
    #[error("invalid search options: {0}")]
    InvalidOptions(String),
}

/// Which matchers, beyond exact canonical equality, admit a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Matchers {
    pub phonetic: bool,
    pub edit: bool,
    pub grams: bool,
    pub tokens: bool,
}

impl Matchers {
    pub const EXACT_ONLY: Matchers = Matchers {
        phonetic: false,
        edit: false,
        grams: false,
        tokens: false,
    };
    pub const ALL: Matchers = Matchers {
        phonetic: true,
        edit: true,
        grams: true,
        tokens: true,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// `None` means unlimited.
    pub limit: Option<usize>,
    pub include_dead: bool,
    pub classes: Option<BTreeSet<u8>>,
    pub min_score: f64,
    pub candidate_opts: CandidateOptions,
    pub weights: Weights,
    pub thresholds: BandThresholds,
    pub matchers: Matchers,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            limit: Some(100),
            include_dead: false,
            classes: None,
            min_score: 0.0,
            candidate_opts: CandidateOptions::default(),
            weights: Weights::default(),
            thresholds: BandThresholds::default(),
            matchers: Matchers::ALL,
        }
    }
}

impl SearchOptions {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.limit == Some(0) {
            return Err(SearchError::InvalidOptions(
                "limit must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.min_score) {
            return Err(SearchError::InvalidOptions(format!(
                "min_score {} outside [0, 1]",
                self.min_score
            )));
        }
        Ok(())
    }

    /// Candidate options with every source an enabled matcher depends on.
    fn effective_candidates(&self) -> CandidateOptions {
        CandidateOptions {
            use_phonetic: self.candidate_opts.use_phonetic || self.matchers.phonetic,
            use_tokens: self.candidate_opts.use_tokens || self.matchers.tokens,
            ..self.candidate_opts
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub serial: String,
    pub mark: String,
    pub status: Status,
    pub classes: BTreeSet<u8>,
    pub owner: Option<String>,
    pub score: RiskScore,
    pub band: RiskBand,
    pub exact_match: bool,
    pub phonetic_match: bool,
    pub levenshtein: usize,
}

/// The full ranked match list together with the normalized query.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub normalized: NormalizedMark,
    /// Matches before truncation to the limit.
    pub total: usize,
    pub results: Vec<SearchResult>,
}

impl SearchOutcome {
    pub fn truncated(&self) -> bool {
        self.results.len() < self.total
    }
}

/// A named engine configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EngineProfile {
    pub name: String,
    pub matchers: Matchers,
    pub fold_plurals: bool,
    pub weights: Weights,
    pub thresholds: BandThresholds,
    #[serde(skip)]
    pub candidate_opts: CandidateOptions,
}

pub const BUILTIN_PROFILE_NAMES: [&str; 5] = ["exact-only", "phonetic", "edit", "gram", "full"];

impl EngineProfile {
    fn new(name: &str, matchers: Matchers, edit_budget: usize, fold_plurals: bool) -> Self {
        Self {
            name: name.to_owned(),
            matchers,
            fold_plurals,
            weights: Weights::default(),
            thresholds: BandThresholds::default(),
            candidate_opts: CandidateOptions {
                edit_budget,
                use_phonetic: matchers.phonetic,
                use_tokens: matchers.tokens,
                ..CandidateOptions::default()
            },
        }
    }

    /// The five shipped profiles, from strictest to loosest.
    pub fn builtins() -> Vec<EngineProfile> {
        let m = Matchers::EXACT_ONLY;
        vec![
            Self::new("exact-only", m, 0, false),
            Self::new(
                "phonetic",
                Matchers {
                    phonetic: true,
                    ..m
                },
                0,
                false,
            ),
            Self::new("edit", Matchers { edit: true, ..m }, 2, false),
            Self::new("gram", Matchers { grams: true, ..m }, 2, false),
            Self::new("full", Matchers::ALL, 2, true),
        ]
    }

    pub fn builtin(name: &str) -> Option<EngineProfile> {
        Self::builtins().into_iter().find(|p| p.name == name)
    }

    pub fn index_config(&self) -> crate::index::IndexConfig {
        crate::index::IndexConfig {
            fold_plurals: self.fold_plurals,
        }
    }

    /// Search options for this profile with the given limit and default filters.
    pub fn search_options(&self, limit: Option<usize>) -> SearchOptions {
        SearchOptions {
            limit,
            candidate_opts: self.candidate_opts,
            weights: self.weights,
            thresholds: self.thresholds,
            matchers: self.matchers,
            ..SearchOptions::default()
        }
    }
}

/// Runs a knockout search and returns the ranked, truncated result list.
pub fn knockout_search(
    index: &Index,
    raw_query: &str,
    opts: &SearchOptions,
) -> Result<Vec<SearchResult>, SearchError> {
    knockout_search_detailed(index, raw_query, opts).map(|o| o.results)
}

pub fn knockout_search_detailed(
    index: &Index,
    raw_query: &str,
    opts: &SearchOptions,
) -> Result<SearchOutcome, SearchError> {
    opts.validate()?;
    let query = normalize(raw_query);
    if query.is_empty() {
        return Err(SearchError::EmptyQuery(raw_query.to_owned()));
    }

    let query_key = index.query_token_key(&query);
    let query_tokens: HashSet<&str> = query_key.tokens().iter().map(String::as_str).collect();
    let k = opts.candidate_opts.edit_budget;
    let gram_min = gram_threshold(padded_grams(query.canonical()).len(), k);

    let mut results: Vec<SearchResult> = Vec::new();
    for id in index.candidates(&query, &opts.effective_candidates()) {
        let record = index.record(id);
        if record.status == Status::Dead && !opts.include_dead {
            continue;
        }
        let norm = index.normalized(id);
        let exact = norm.canonical() == query.canonical();
        let distance = levenshtein(query.canonical(), norm.canonical());
        if !exact
            && !accepts(
                index,
                id,
                &query,
                &query_key,
                &query_tokens,
                distance,
                gram_min,
                opts,
            )
        {
            continue;
        }
        let score = scoring::score(
            &query,
            norm,
            &record.classes,
            opts.classes.as_ref(),
            &opts.weights,
        )
        .expect("query is non-empty");
        if score.value() < opts.min_score {
            continue;
        }
        results.push(SearchResult {
            serial: record.serial.clone(),
            mark: record.mark.clone(),
            status: record.status,
            classes: record.classes.clone(),
            owner: record.owner.clone(),
            score,
            band: opts.thresholds.band(score),
            exact_match: exact,
            phonetic_match: phonetic_match(&query, norm),
            levenshtein: distance,
        });
    }

    results.sort_by(compare_results);
    let total = results.len();
    if let Some(limit) = opts.limit {
        results.truncate(limit);
    }
    Ok(SearchOutcome {
        normalized: query,
        total,
        results,
    })
}

#[allow(clippy::too_many_arguments)]
fn accepts(
    index: &Index,
    id: RecordId,
    query: &NormalizedMark,
    query_key: &NormalizedMark,
    query_tokens: &HashSet<&str>,
    distance: usize,
    gram_min: usize,
    opts: &SearchOptions,
) -> bool {
    let m = opts.matchers;
    let key = index.token_key(id);
    (m.edit && distance <= opts.candidate_opts.edit_budget)
        || (m.tokens
            && key
                .tokens()
                .iter()
                .any(|t| query_tokens.contains(t.as_str())))
        || (m.phonetic && phonetic_match(query_key, key))
        || (m.grams
            && common_grams(query.canonical(), index.normalized(id).canonical()) >= gram_min)
}

/// Result ordering: exact matches first, then score descending, then live
/// before pending before dead, then serial ascending.
pub fn compare_results(a: &SearchResult, b: &SearchResult) -> Ordering {
    b.exact_match
        .cmp(&a.exact_match)
        .then_with(|| b.score.value().total_cmp(&a.score.value()))
        .then_with(|| a.status.precedence().cmp(&b.status.precedence()))
        .then_with(|| a.serial.cmp(&b.serial))
}
