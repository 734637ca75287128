//! Killer-mark evaluation harness.
//!
//! Every conflict case's applied mark is searched through an engine; each
//! returned mark is compared against the case's killer marks.
//!
//! * a killer counts as a true positive when at least one result matches it,
//!   otherwise as a false negative;
//! * a result counts as a false positive when it matches no killer.
//!
//! `tp` counts killers while `fp` counts results, so per case
//! `tp + fn == killers` and `tp + fp <= results` (equal unless two killers
//! are matched by the same result). Pooled precision and recall are
//! micro-averages over all non-errored cases; a zero denominator is reported
//! as `None` ("undefined"), never as zero.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{self, Write};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::corpus::{ConflictCase, Corpus, KillerRef};
use crate::editdist::levenshtein;
use crate::index::Index;
use crate::normalize::normalize;
use crate::phonetics::phonetic_match;
use crate::search::{knockout_search, EngineProfile, SearchError};

/// A mark as returned by an engine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReturnedMark {
    pub mark: String,
    pub serial: Option<String>,
}

impl ReturnedMark {
    pub fn new(mark: impl Into<String>, serial: Option<&str>) -> Self {
        Self {
            mark: mark.into(),
            serial: serial.map(str::to_owned),
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("no recorded results for query {0:?}")]
    MissingQuery(String),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("{0}")]
    Other(String),
}

/// Anything the harness can evaluate: a ranked search with a result limit
/// (`None` = unlimited). Implementations must be deterministic and return at
/// most `limit` results.
pub trait SearchEngine: Send + Sync {
    fn name(&self) -> &str;
    fn search(
        &self,
        raw_query: &str,
        limit: Option<usize>,
    ) -> Result<Vec<ReturnedMark>, EngineError>;
}

/// An [`EngineProfile`] running over a local index.
pub struct LocalEngine {
    profile: EngineProfile,
    index: Arc<Index>,
    include_dead: bool,
}

impl LocalEngine {
    /// Builds an index configured for `profile`.
    pub fn new(profile: EngineProfile, corpus: &Corpus) -> Self {
        let index = Arc::new(Index::build(corpus, profile.index_config()));
        Self {
            profile,
            index,
            include_dead: false,
        }
    }

    /// Shares an existing index; its configuration must match the profile.
    pub fn with_index(profile: EngineProfile, index: Arc<Index>) -> Result<Self, EngineError> {
        if index.config() != profile.index_config() {
            return Err(EngineError::Other(format!(
                "index configuration {:?} does not match profile {}",
                index.config(),
                profile.name
            )));
        }
        Ok(Self {
            profile,
            index,
            include_dead: false,
        })
    }

    /// Whether dead marks may be returned (and then count as false positives).
    pub fn include_dead(mut self, include: bool) -> Self {
        self.include_dead = include;
        self
    }

    pub fn profile(&self) -> &EngineProfile {
        &self.profile
    }
}

impl SearchEngine for LocalEngine {
    fn name(&self) -> &str {
        &self.profile.name
    }

    fn search(
        &self,
        raw_query: &str,
        limit: Option<usize>,
    ) -> Result<Vec<ReturnedMark>, EngineError> {
        let mut opts = self.profile.search_options(limit);
        opts.include_dead = self.include_dead;
        Ok(knockout_search(&self.index, raw_query, &opts)?
            .into_iter()
            .map(|r| ReturnedMark {
                mark: r.mark,
                serial: Some(r.serial),
            })
            .collect())
    }
}

#[derive(Debug, Error)]
pub enum RecordedError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordedHit {
    mark: String,
    #[serde(default)]
    serial: Option<String>,
    rank: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordedLine {
    query: String,
    engine: String,
    results: Vec<RecordedHit>,
}

/// Replays a previously recorded engine. Queries are looked up by their
/// canonical normalized form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordedEngine {
    name: String,
    by_query: BTreeMap<String, (String, Vec<ReturnedMark>)>,
}

impl RecordedEngine {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            by_query: BTreeMap::new(),
        }
    }

    /// Adds the ranked results for one query, replacing any earlier entry.
    pub fn insert(&mut self, query: &str, results: Vec<ReturnedMark>) {
        self.by_query.insert(
            normalize(query).canonical().to_owned(),
            (query.to_owned(), results),
        );
    }

    /// Records `engine`'s answers for every case's applied mark.
    pub fn capture(
        engine: &dyn SearchEngine,
        cases: &[ConflictCase],
        limit: Option<usize>,
    ) -> Result<Self, EngineError> {
        let mut recorded = Self::new(engine.name());
        for case in cases {
            recorded.insert(
                &case.applied_mark,
                engine.search(&case.applied_mark, limit)?,
            );
        }
        Ok(recorded)
    }

    pub fn len(&self) -> usize {
        self.by_query.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_query.is_empty()
    }

    /// Writes the recording in the line-delimited replay format.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (query, results) in self.by_query.values() {
            let line = RecordedLine {
                query: query.clone(),
                engine: self.name.clone(),
                results: results
                    .iter()
                    .enumerate()
                    .map(|(i, r)| RecordedHit {
                        mark: r.mark.clone(),
                        serial: r.serial.clone(),
                        rank: i + 1,
                    })
                    .collect(),
            };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }
}

impl SearchEngine for RecordedEngine {
    fn name(&self) -> &str {
        &self.name
    }

    fn search(
        &self,
        raw_query: &str,
        limit: Option<usize>,
    ) -> Result<Vec<ReturnedMark>, EngineError> {
        let (_, results) = self
            .by_query
            .get(normalize(raw_query).canonical())
            .ok_or_else(|| EngineError::MissingQuery(raw_query.to_owned()))?;
        let n = limit.unwrap_or(usize::MAX).min(results.len());
        Ok(results[..n].to_vec())
    }
}

/// Parses a recorded-results file; one engine per distinct `engine` value, in
/// order of first appearance.
pub fn parse_recorded(text: &str) -> Result<Vec<RecordedEngine>, RecordedError> {
    let mut engines: Vec<RecordedEngine> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let malformed = |message: String| RecordedError::Malformed {
            line: line_no,
            message,
        };
        let line: RecordedLine = serde_json::from_str(raw).map_err(|e| malformed(e.to_string()))?;
        if line.engine.trim().is_empty() {
            return Err(malformed("engine must be non-empty".into()));
        }
        if normalize(&line.query).is_empty() {
            return Err(malformed(format!(
                "query {:?} normalizes to nothing",
                line.query
            )));
        }
        let mut hits = line.results;
        hits.sort_by_key(|h| h.rank);
        for (expected, hit) in hits.iter().enumerate() {
            if hit.rank != expected + 1 {
                return Err(malformed(format!(
                    "ranks must be 1..=n without gaps or repeats (found {} at position {})",
                    hit.rank,
                    expected + 1
                )));
            }
            if hit.mark.trim().is_empty() {
                return Err(malformed("result mark must be non-empty".into()));
            }
        }
        let pos = match engines.iter().position(|e| e.name == line.engine) {
            Some(p) => p,
            None => {
                engines.push(RecordedEngine::new(line.engine.clone()));
                engines.len() - 1
            }
        };
        let engine = &mut engines[pos];
        let key = normalize(&line.query).canonical().to_owned();
        if engine.by_query.contains_key(&key) {
            return Err(malformed(format!(
                "duplicate query {:?} for engine {:?}",
                line.query, line.engine
            )));
        }
        let results = hits
            .into_iter()
            .map(|h| ReturnedMark {
                mark: h.mark,
                serial: h.serial,
            })
            .collect();
        engine.by_query.insert(key, (line.query, results));
    }
    Ok(engines)
}

pub fn load_recorded(path: impl AsRef<Path>) -> Result<Vec<RecordedEngine>, RecordedError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| RecordedError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_recorded(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MatchMode {
    /// Compare serials when both sides carry one, else normalized text.
    #[default]
    BySerialThenText,
    TextOnly,
}

impl MatchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchMode::BySerialThenText => "BY_SERIAL_THEN_TEXT",
            MatchMode::TextOnly => "TEXT_ONLY",
        }
    }
}

impl fmt::Display for MatchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MatchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "BY_SERIAL_THEN_TEXT" => Ok(MatchMode::BySerialThenText),
            "TEXT_ONLY" => Ok(MatchMode::TextOnly),
            _ => Err(format!(
                "unknown match mode {s:?} (expected BY_SERIAL_THEN_TEXT or TEXT_ONLY)"
            )),
        }
    }
}

pub fn killer_matches(returned: &ReturnedMark, killer: &KillerRef, mode: MatchMode) -> bool {
    if mode == MatchMode::BySerialThenText {
        if let (Some(a), Some(b)) = (&returned.serial, &killer.serial) {
            return a == b;
        }
    }
    normalize(&returned.mark).canonical() == normalize(&killer.mark).canonical()
}

/// Drops repeated results, keyed by serial when present, else by normalized text.
pub fn dedup_results(results: Vec<ReturnedMark>) -> Vec<ReturnedMark> {
    let mut seen = HashSet::new();
    results
        .into_iter()
        .filter(|r| {
            let key = match &r.serial {
                Some(s) => format!("serial:{s}"),
                None => format!("text:{}", normalize(&r.mark).canonical()),
            };
            seen.insert(key)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn precision(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }

    fn add(&mut self, other: ConfusionCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Confusion counts for one case. `results` should already be deduplicated.
pub fn confusion_counts(
    case: &ConflictCase,
    results: &[ReturnedMark],
    mode: MatchMode,
) -> ConfusionCounts {
    let tp = case
        .killer_marks
        .iter()
        .filter(|k| results.iter().any(|r| killer_matches(r, k, mode)))
        .count();
    let fp = results
        .iter()
        .filter(|r| !case.killer_marks.iter().any(|k| killer_matches(r, k, mode)))
        .count();
    ConfusionCounts {
        tp,
        fp,
        fn_: case.killer_marks.len() - tp,
    }
}

/// One returned result, compared against the searched mark.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResultRow {
    pub case_id: String,
    pub engine_name: String,
    pub returned_mark: String,
    pub conflicted_mark: String,
    pub exact_match: bool,
    pub phonetic_match: bool,
    pub levenshtein: usize,
    pub rank: usize,
}

impl ResultRow {
    fn new(case: &ConflictCase, engine: &str, returned: &ReturnedMark, rank: usize) -> Self {
        let searched = normalize(&case.applied_mark);
        let got = normalize(&returned.mark);
        Self {
            case_id: case.case_id.clone(),
            engine_name: engine.to_owned(),
            returned_mark: returned.mark.clone(),
            conflicted_mark: case.applied_mark.clone(),
            exact_match: !got.is_empty() && got.canonical() == searched.canonical(),
            phonetic_match: phonetic_match(&got, &searched),
            levenshtein: levenshtein(got.canonical(), searched.canonical()),
            rank,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalConfig {
    pub mode: MatchMode,
    /// Remove repeated results before counting.
    pub dedup: bool,
}

impl EvalConfig {
    pub fn new(mode: MatchMode) -> Self {
        Self { mode, dedup: true }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("at least one conflict case is required")]
    NoCases,
    #[error("invalid limits: {0}")]
    BadLimits(String),
}

fn ser_limit<S: Serializer>(limit: &Option<usize>, s: S) -> Result<S::Ok, S::Error> {
    match limit {
        Some(n) => s.serialize_u64(*n as u64),
        None => s.serialize_str("all"),
    }
}

pub fn format_limit(limit: Option<usize>) -> String {
    limit.map_or_else(|| "all".to_owned(), |n| n.to_string())
}

/// Parses a comma-separated limit list such as `10,25,50,100,all`.
pub fn parse_limits(s: &str) -> Result<Vec<Option<usize>>, EvalError> {
    let limits = s
        .split(',')
        .map(|part| {
            let part = part.trim();
            if part.eq_ignore_ascii_case("all") {
                return Ok(None);
            }
            match part.parse::<usize>() {
                Ok(0) | Err(_) => Err(EvalError::BadLimits(format!(
                    "{part:?} is not a positive integer or \"all\""
                ))),
                Ok(n) => Ok(Some(n)),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    check_limits(&limits)?;
    Ok(limits)
}

fn check_limits(limits: &[Option<usize>]) -> Result<(), EvalError> {
    if limits.is_empty() {
        return Err(EvalError::BadLimits("no limits given".into()));
    }
    for pair in limits.windows(2) {
        let increasing = match (pair[0], pair[1]) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            (None, _) => false,
        };
        if !increasing {
            return Err(EvalError::BadLimits(format!(
                "limits must be strictly increasing, got {} then {}",
                format_limit(pair[0]),
                format_limit(pair[1])
            )));
        }
    }
    Ok(())
}

/// Per-case outcome at one limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseOutcome {
    pub case_id: String,
    pub killers: usize,
    #[serde(flatten)]
    pub counts: ConfusionCounts,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub found_any: bool,
    pub n_results: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseError {
    pub case_id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub engine: String,
    #[serde(serialize_with = "ser_limit")]
    pub limit: Option<usize>,
    pub match_mode: MatchMode,
    pub dedup: bool,
    pub n_cases: usize,
    pub n_errored: usize,
    #[serde(flatten)]
    pub counts: ConfusionCounts,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub macro_precision: Option<f64>,
    pub macro_recall: Option<f64>,
    pub found_any_rate: Option<f64>,
    pub total_results: usize,
    pub exact_match_rate: Option<f64>,
    pub phonetic_match_rate: Option<f64>,
    pub levenshtein_histogram: BTreeMap<usize, usize>,
    pub levenshtein_median: Option<f64>,
    pub cases: Vec<CaseOutcome>,
    pub errors: Vec<CaseError>,
    pub rows: Vec<ResultRow>,
}

/// One point of a precision/recall limit curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitPoint {
    #[serde(serialize_with = "ser_limit")]
    pub limit: Option<usize>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub found_any_rate: Option<f64>,
}

impl EvalReport {
    pub fn point(&self) -> LimitPoint {
        LimitPoint {
            limit: self.limit,
            precision: self.precision,
            recall: self.recall,
            found_any_rate: self.found_any_rate,
        }
    }
}

/// Evaluates `engine` on `cases` at a single limit.
pub fn eval_run(
    engine: &dyn SearchEngine,
    cases: &[ConflictCase],
    limit: Option<usize>,
    config: EvalConfig,
) -> Result<EvalReport, EvalError> {
    let mut reports = eval_at_limits(engine, cases, &[limit], config)?;
    Ok(reports.pop().expect("one limit"))
}

/// One report per limit. Each case is searched once at the largest limit and
/// the ranked list is prefix-truncated for the smaller ones.
pub fn eval_at_limits(
    engine: &dyn SearchEngine,
    cases: &[ConflictCase],
    limits: &[Option<usize>],
    config: EvalConfig,
) -> Result<Vec<EvalReport>, EvalError> {
    if cases.is_empty() {
        return Err(EvalError::NoCases);
    }
    check_limits(limits)?;
    let max_limit = *limits.last().expect("non-empty");

    let searched: Vec<Result<Vec<ReturnedMark>, String>> = cases
        .par_iter()
        .map(|case| {
            engine
                .search(&case.applied_mark, max_limit)
                .map_err(|e| e.to_string())
        })
        .collect();

    Ok(limits
        .iter()
        .map(|&limit| assemble(engine.name(), cases, &searched, limit, config))
        .collect())
}

fn assemble(
    engine: &str,
    cases: &[ConflictCase],
    searched: &[Result<Vec<ReturnedMark>, String>],
    limit: Option<usize>,
    config: EvalConfig,
) -> EvalReport {
    let mut order: Vec<usize> = (0..cases.len()).collect();
    order.sort_by(|&a, &b| cases[a].case_id.cmp(&cases[b].case_id));

    let mut counts = ConfusionCounts::default();
    let mut outcomes = Vec::new();
    let mut errors = Vec::new();
    let mut rows = Vec::new();
    for i in order {
        let case = &cases[i];
        let results = match &searched[i] {
            Ok(r) => r,
            Err(message) => {
                errors.push(CaseError {
                    case_id: case.case_id.clone(),
                    message: message.clone(),
                });
                continue;
            }
        };
        let n = limit.unwrap_or(usize::MAX).min(results.len());
        let mut kept = results[..n].to_vec();
        if config.dedup {
            kept = dedup_results(kept);
        }
        let c = confusion_counts(case, &kept, config.mode);
        counts.add(c);
        rows.extend(
            kept.iter()
                .enumerate()
                .map(|(rank, r)| ResultRow::new(case, engine, r, rank + 1)),
        );
        outcomes.push(CaseOutcome {
            case_id: case.case_id.clone(),
            killers: case.killer_marks.len(),
            counts: c,
            precision: c.precision(),
            recall: c.recall(),
            found_any: c.tp >= 1,
            n_results: kept.len(),
        });
    }

    let mut histogram = BTreeMap::new();
    for row in &rows {
        *histogram.entry(row.levenshtein).or_insert(0) += 1;
    }
    let defined_precisions: Vec<f64> = outcomes.iter().filter_map(|o| o.precision).collect();
    let defined_recalls: Vec<f64> = outcomes.iter().filter_map(|o| o.recall).collect();

    EvalReport {
        engine: engine.to_owned(),
        limit,
        match_mode: config.mode,
        dedup: config.dedup,
        n_cases: outcomes.len(),
        n_errored: errors.len(),
        counts,
        precision: counts.precision(),
        recall: counts.recall(),
        macro_precision: mean(&defined_precisions),
        macro_recall: mean(&defined_recalls),
        found_any_rate: ratio(
            outcomes.iter().filter(|o| o.found_any).count(),
            outcomes.len(),
        ),
        total_results: rows.len(),
        exact_match_rate: ratio(rows.iter().filter(|r| r.exact_match).count(), rows.len()),
        phonetic_match_rate: ratio(rows.iter().filter(|r| r.phonetic_match).count(), rows.len()),
        levenshtein_median: median_from_histogram(&histogram),
        levenshtein_histogram: histogram,
        cases: outcomes,
        errors,
        rows,
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Median of the values a histogram describes; the mean of the two middle
/// values for an even count.
pub fn median_from_histogram(histogram: &BTreeMap<usize, usize>) -> Option<f64> {
    let total: usize = histogram.values().sum();
    if total == 0 {
        return None;
    }
    let nth = |target: usize| {
        let mut seen = 0;
        for (&value, &count) in histogram {
            seen += count;
            if seen > target {
                return value;
            }
        }
        unreachable!("target < total")
    };
    let hi = nth(total / 2);
    if total % 2 == 1 {
        Some(hi as f64)
    } else {
        Some((nth(total / 2 - 1) + hi) as f64 / 2.0)
    }
}

/// Formats an optional metric for text output; `None` becomes `undefined`.
pub fn format_metric(value: Option<f64>) -> String {
    value.map_or_else(|| "undefined".to_owned(), |v| v.to_string())
}

pub const CASES_CSV_HEADER: &str =
    "case_id,engine,limit,tp,fp,fn,precision,recall,found_any,n_results";
pub const LEVENSHTEIN_CSV_HEADER: &str = "engine,distance,count";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Per-case rows for every report; errored cases are listed only in the JSON report.
pub fn write_cases_csv<W: Write>(mut w: W, reports: &[EvalReport]) -> io::Result<()> {
    writeln!(w, "{CASES_CSV_HEADER}")?;
    for report in reports {
        for c in &report.cases {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                csv_field(&c.case_id),
                csv_field(&report.engine),
                format_limit(report.limit),
                c.counts.tp,
                c.counts.fp,
                c.counts.fn_,
                format_metric(c.precision),
                format_metric(c.recall),
                c.found_any,
                c.n_results
            )?;
        }
    }
    w.flush()
}

pub fn write_levenshtein_csv<W: Write>(mut w: W, reports: &[EvalReport]) -> io::Result<()> {
    writeln!(w, "{LEVENSHTEIN_CSV_HEADER}")?;
    for report in reports {
        for (distance, count) in &report.levenshtein_histogram {
            writeln!(w, "{},{distance},{count}", csv_field(&report.engine))?;
        }
    }
    w.flush()
}

/// All reports of one evaluation run, grouped by engine.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalBundle {
    pub match_mode: MatchMode,
    pub dedup: bool,
    pub limits: Vec<LimitLabel>,
    pub engines: Vec<EngineReports>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct LimitLabel(#[serde(serialize_with = "ser_limit")] pub Option<usize>);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EngineReports {
    pub engine: String,
    pub curve: Vec<LimitPoint>,
    pub reports: Vec<EvalReport>,
}

impl EngineReports {
    pub fn new(reports: Vec<EvalReport>) -> Self {
        Self {
            engine: reports
                .first()
                .map(|r| r.engine.clone())
                .unwrap_or_default(),
            curve: reports.iter().map(EvalReport::point).collect(),
            reports,
        }
    }

    /// The report at the largest limit.
    pub fn headline(&self) -> &EvalReport {
        self.reports.last().expect("at least one limit")
    }
}

impl EvalBundle {
    pub fn write_json<W: Write>(&self, mut w: W) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        w.write_all(b"\n")?;
        w.flush()
    }

    pub fn all_reports(&self) -> Vec<EvalReport> {
        self.engines
            .iter()
            .flat_map(|e| e.reports.iter().cloned())
            .collect()
    }

    pub fn headlines(&self) -> Vec<EvalReport> {
        self.engines.iter().map(|e| e.headline().clone()).collect()
    }
}
