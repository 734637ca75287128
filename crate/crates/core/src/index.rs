//! Immutable in-memory index and candidate generation.
//!
//! Candidate generation unions three sources: records sharing a token, records
//! with the same per-token Soundex sequence, and records that pass the padded
//! 3-gram count filter. For a query `q` with `|G(q)|` padded grams, every record
//! within Levenshtein distance `k` of `q` shares at least `|G(q)| - 3k` grams
//! (counted with multiplicity), since one edit touches at most three grams.
//! When that bound is below one, or the query is shorter than
//! `min_gram_len`, the gram clause becomes a full scan.

use std::collections::{BTreeMap, HashMap};

use crate::corpus::{Corpus, TrademarkRecord};
use crate::normalize::{normalize, NormalizedMark};
use crate::phonetics::phonetic_key_string;

/// Gram length.
pub const GRAM: usize = 3;
const PAD: u8 = b'#';

pub type RecordId = usize;
pub type Gram = [u8; GRAM];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CandidateOptions {
    /// Edit budget `k`.
    pub edit_budget: usize,
    pub use_phonetic: bool,
    pub use_tokens: bool,
    /// Queries with shorter canonical strings fall back to a full scan.
    pub min_gram_len: usize,
}

impl Default for CandidateOptions {
    fn default() -> Self {
        Self {
            edit_budget: 2,
            use_phonetic: true,
            use_tokens: true,
            min_gram_len: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IndexConfig {
    /// Key the token and phonetic postings on singularized tokens.
    pub fold_plurals: bool,
}

#[derive(Debug, Clone)]
pub struct Index {
    records: Vec<TrademarkRecord>,
    norm_cache: Vec<NormalizedMark>,
    token_keys: Vec<NormalizedMark>,
    token_postings: BTreeMap<String, Vec<RecordId>>,
    phonetic_postings: BTreeMap<String, Vec<RecordId>>,
    // (record, occurrences of the gram in that record)
    gram_postings: BTreeMap<Gram, Vec<(RecordId, u32)>>,
    by_serial: HashMap<String, RecordId>,
    built_from: String,
    config: IndexConfig,
}

/// Builds an index with the default configuration.
pub fn build_index(corpus: &Corpus) -> Index {
    Index::build(corpus, IndexConfig::default())
}

/// Padded 3-grams of a canonical string (two `#` on each side), in order.
pub fn padded_grams(canonical: &str) -> Vec<Gram> {
    if canonical.is_empty() {
        return Vec::new();
    }
    let mut padded = Vec::with_capacity(canonical.len() + 2 * (GRAM - 1));
    padded.extend([PAD; GRAM - 1]);
    padded.extend_from_slice(canonical.as_bytes());
    padded.extend([PAD; GRAM - 1]);
    padded.windows(GRAM).map(|w| [w[0], w[1], w[2]]).collect()
}

fn gram_counts(canonical: &str) -> BTreeMap<Gram, u32> {
    let mut counts = BTreeMap::new();
    for g in padded_grams(canonical) {
        *counts.entry(g).or_insert(0) += 1;
    }
    counts
}

/// Grams two canonical strings share, counted with multiplicity.
pub fn common_grams(a: &str, b: &str) -> usize {
    let a = gram_counts(a);
    let b = gram_counts(b);
    a.iter()
        .map(|(g, &n)| b.get(g).map_or(0, |&m| n.min(m) as usize))
        .sum()
}

/// Minimum shared-gram count for a record within `k` edits of a query with
/// `query_grams` padded grams. Non-positive means the bound is vacuous.
pub fn gram_bound(query_grams: usize, k: usize) -> i64 {
    query_grams as i64 - (k * GRAM) as i64
}

/// The count-filter threshold `max(|G(q)| - k*3, 1)`.
pub fn gram_threshold(query_grams: usize, k: usize) -> usize {
    gram_bound(query_grams, k).max(1) as usize
}

impl Index {
    pub fn build(corpus: &Corpus, config: IndexConfig) -> Self {
        let records = corpus.records().to_vec();
        let norm_cache: Vec<NormalizedMark> = records.iter().map(|r| normalize(&r.mark)).collect();
        let token_keys: Vec<NormalizedMark> = if config.fold_plurals {
            norm_cache
                .iter()
                .map(NormalizedMark::fold_plurals)
                .collect()
        } else {
            norm_cache.clone()
        };

        let mut token_postings: BTreeMap<String, Vec<RecordId>> = BTreeMap::new();
        let mut phonetic_postings: BTreeMap<String, Vec<RecordId>> = BTreeMap::new();
        let mut gram_postings: BTreeMap<Gram, Vec<(RecordId, u32)>> = BTreeMap::new();
        let mut by_serial = HashMap::with_capacity(records.len());

        // ids are visited in ascending order, so postings come out sorted
        for (id, (norm, key)) in norm_cache.iter().zip(&token_keys).enumerate() {
            for token in key.tokens() {
                let list = token_postings.entry(token.clone()).or_default();
                if list.last() != Some(&id) {
                    list.push(id);
                }
            }
            if !key.is_empty() {
                phonetic_postings
                    .entry(phonetic_key_string(key))
                    .or_default()
                    .push(id);
            }
            for (gram, n) in gram_counts(norm.canonical()) {
                gram_postings.entry(gram).or_default().push((id, n));
            }
            by_serial.insert(records[id].serial.clone(), id);
        }

        Self {
            built_from: corpus.fingerprint(),
            records,
            norm_cache,
            token_keys,
            token_postings,
            phonetic_postings,
            gram_postings,
            by_serial,
            config,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn config(&self) -> IndexConfig {
        self.config
    }

    pub fn records(&self) -> &[TrademarkRecord] {
        &self.records
    }

    pub fn record(&self, id: RecordId) -> &TrademarkRecord {
        &self.records[id]
    }

    /// Normalized form of a record's mark.
    pub fn normalized(&self, id: RecordId) -> &NormalizedMark {
        &self.norm_cache[id]
    }

    /// The mark used by the token and phonetic matchers (plural-folded when
    /// the index was built with `fold_plurals`).
    pub fn token_key(&self, id: RecordId) -> &NormalizedMark {
        &self.token_keys[id]
    }

    /// Applies the index's token-key transform to a query.
    pub fn query_token_key(&self, query: &NormalizedMark) -> NormalizedMark {
        if self.config.fold_plurals {
            query.fold_plurals()
        } else {
            query.clone()
        }
    }

    pub fn by_serial(&self, serial: &str) -> Option<&TrademarkRecord> {
        self.by_serial.get(serial).map(|&id| &self.records[id])
    }

    /// Fingerprint of the corpus this index was built from.
    pub fn built_from(&self) -> &str {
        &self.built_from
    }

    pub fn token_postings(&self) -> &BTreeMap<String, Vec<RecordId>> {
        &self.token_postings
    }

    pub fn phonetic_postings(&self) -> &BTreeMap<String, Vec<RecordId>> {
        &self.phonetic_postings
    }

    pub fn gram_postings(&self) -> &BTreeMap<Gram, Vec<(RecordId, u32)>> {
        &self.gram_postings
    }

    /// True when the gram clause for this query degenerates to a full scan.
    pub fn needs_full_scan(query: &NormalizedMark, opts: &CandidateOptions) -> bool {
        let canonical = query.canonical();
        canonical.len() < opts.min_gram_len
            || gram_bound(padded_grams(canonical).len(), opts.edit_budget) < 1
    }

    /// Sorted, duplicate-free candidate ids. Always a superset of the records
    /// within `opts.edit_budget` edits of the query's canonical string.
    pub fn candidates(&self, query: &NormalizedMark, opts: &CandidateOptions) -> Vec<RecordId> {
        if query.is_empty() {
            return Vec::new();
        }
        if Self::needs_full_scan(query, opts) {
            return (0..self.records.len()).collect();
        }

        let mut hit = vec![false; self.records.len()];
        let key = self.query_token_key(query);
        if opts.use_tokens {
            for token in key.tokens() {
                for &id in self.token_postings.get(token).into_iter().flatten() {
                    hit[id] = true;
                }
            }
        }
        if opts.use_phonetic {
            let code = phonetic_key_string(&key);
            for &id in self.phonetic_postings.get(&code).into_iter().flatten() {
                hit[id] = true;
            }
        }

        let query_grams = gram_counts(query.canonical());
        let total: u32 = query_grams.values().sum();
        let threshold = gram_threshold(total as usize, opts.edit_budget) as u32;
        let mut shared = vec![0u32; self.records.len()];
        for (gram, &n) in &query_grams {
            for &(id, m) in self.gram_postings.get(gram).into_iter().flatten() {
                shared[id] += n.min(m);
            }
        }
        for (id, &count) in shared.iter().enumerate() {
            if count >= threshold {
                hit[id] = true;
            }
        }

        hit.iter()
            .enumerate()
            .filter_map(|(id, &h)| h.then_some(id))
            .collect()
    }
}
