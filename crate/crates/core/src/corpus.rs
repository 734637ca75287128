//! Trademark records, conflict cases, and their line-delimited JSON files.
//!
//! Each non-blank line of a corpus file is one [`TrademarkRecord`]; each
//! non-blank line of a cases file is one [`ConflictCase`]. In strict mode the
//! first bad line aborts the load. In lenient mode bad lines are skipped and
//! tallied so that `parsed + skipped == non-blank lines`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Lowest and highest NICE class numbers.
pub const MIN_CLASS: u8 = 1;
pub const MAX_CLASS: u8 = 45;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Live,
    Dead,
    Pending,
}

impl Status {
    /// Position in result ordering: live marks first, dead marks last.
    pub fn precedence(self) -> u8 {
        match self {
            Status::Live => 0,
            Status::Pending => 1,
            Status::Dead => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Live => "LIVE",
            Status::Dead => "DEAD",
            Status::Pending => "PENDING",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One registered or applied-for word mark.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrademarkRecord {
    pub serial: String,
    #[serde(default)]
    pub registration: Option<String>,
    pub mark: String,
    pub status: Status,
    pub classes: BTreeSet<u8>,
    #[serde(default)]
    pub owner: Option<String>,
    #[serde(default)]
    pub filing_date: Option<NaiveDate>,
    #[serde(default)]
    pub registration_date: Option<NaiveDate>,
}

impl TrademarkRecord {
    pub fn validate(&self) -> Result<(), String> {
        if self.serial.trim().is_empty() {
            return Err("serial must be non-empty".into());
        }
        if self.mark.trim().is_empty() {
            return Err(format!("serial {}: mark must be non-empty", self.serial));
        }
        if let Some(c) = self
            .classes
            .iter()
            .find(|c| !(MIN_CLASS..=MAX_CLASS).contains(*c))
        {
            return Err(format!(
                "serial {}: class {c} outside {MIN_CLASS}..={MAX_CLASS}",
                self.serial
            ));
        }
        if self.registration_date.is_some() && self.status == Status::Pending {
            return Err(format!(
                "serial {}: PENDING record cannot carry a registration_date",
                self.serial
            ));
        }
        Ok(())
    }
}

/// A mark cited by the examiner as the basis for a 2(d) refusal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KillerRef {
    pub mark: String,
    #[serde(default)]
    pub serial: Option<String>,
}

/// A refused application together with the marks cited against it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConflictCase {
    pub case_id: String,
    pub applied_mark: String,
    #[serde(default)]
    pub application_serial: Option<String>,
    pub killer_marks: Vec<KillerRef>,
    #[serde(default)]
    pub decision_date: Option<NaiveDate>,
}

impl ConflictCase {
    pub fn validate(&self) -> Result<(), String> {
        if self.case_id.trim().is_empty() {
            return Err("case_id must be non-empty".into());
        }
        if self.applied_mark.trim().is_empty() {
            return Err(format!(
                "case {}: applied_mark must be non-empty",
                self.case_id
            ));
        }
        if self.killer_marks.is_empty() {
            return Err(format!(
                "case {}: killer_marks must be non-empty",
                self.case_id
            ));
        }
        if self.killer_marks.iter().any(|k| k.mark.trim().is_empty()) {
            return Err(format!(
                "case {}: killer mark text must be non-empty",
                self.case_id
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

/// A line that failed to parse or validate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate serial {serial:?}")]
    DuplicateSerial { line: usize, serial: String },
    #[error("line {line}: duplicate case_id {case_id:?}")]
    DuplicateCase { line: usize, case_id: String },
}

impl CorpusError {
    fn line_error(&self) -> Option<LineError> {
        match self {
            CorpusError::Io { .. } => None,
            CorpusError::Malformed { line, message } => Some(LineError {
                line: *line,
                message: message.clone(),
            }),
            CorpusError::DuplicateSerial { line, .. } | CorpusError::DuplicateCase { line, .. } => {
                Some(LineError {
                    line: *line,
                    message: self.to_string(),
                })
            }
        }
    }
}

/// An immutable, validated set of trademark records.
#[derive(Debug, Clone)]
pub struct Corpus {
    records: Vec<TrademarkRecord>,
    source_path: PathBuf,
    loaded_at: DateTime<Utc>,
    skipped: Vec<LineError>,
}

impl Corpus {
    /// Builds a corpus from in-memory records, enforcing every record invariant.
    pub fn from_records(records: Vec<TrademarkRecord>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for (i, r) in records.iter().enumerate() {
            r.validate().map_err(|message| CorpusError::Malformed {
                line: i + 1,
                message,
            })?;
            if !seen.insert(r.serial.as_str()) {
                return Err(CorpusError::DuplicateSerial {
                    line: i + 1,
                    serial: r.serial.clone(),
                });
            }
        }
        Ok(Self {
            records,
            source_path: PathBuf::new(),
            loaded_at: Utc::now(),
            skipped: Vec::new(),
        })
    }

    pub fn parse(text: &str, mode: ParseMode) -> Result<Self, CorpusError> {
        let mut serials = HashSet::new();
        let (records, skipped) = parse_lines(text, mode, |line, raw| {
            let record: TrademarkRecord =
                serde_json::from_str(raw).map_err(|e| CorpusError::Malformed {
                    line,
                    message: e.to_string(),
                })?;
            record
                .validate()
                .map_err(|message| CorpusError::Malformed { line, message })?;
            if !serials.insert(record.serial.clone()) {
                return Err(CorpusError::DuplicateSerial {
                    line,
                    serial: record.serial,
                });
            }
            Ok(record)
        })?;
        Ok(Self {
            records,
            source_path: PathBuf::new(),
            loaded_at: Utc::now(),
            skipped,
        })
    }

    pub fn records(&self) -> &[TrademarkRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn source_path(&self) -> &Path {
        &self.source_path
    }

    pub fn loaded_at(&self) -> DateTime<Utc> {
        self.loaded_at
    }

    /// Lines dropped by a lenient load.
    pub fn skipped(&self) -> &[LineError] {
        &self.skipped
    }

    /// SHA-256 over the canonical serialization of the records, hex encoded.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for r in &self.records {
            hasher.update(serde_json::to_vec(r).expect("record serializes"));
            hasher.update(b"\n");
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn write_to<W: Write>(&self, w: W) -> io::Result<()> {
        write_lines(w, &self.records)
    }
}

/// Loads a corpus file in strict mode.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    load_corpus_with(path, ParseMode::Strict)
}

pub fn load_corpus_with(path: impl AsRef<Path>, mode: ParseMode) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut corpus = Corpus::parse(&text, mode)?;
    corpus.source_path = path.to_path_buf();
    Ok(corpus)
}

/// Conflict cases in file order, plus any lines a lenient load skipped.
#[derive(Debug, Clone, Default)]
pub struct CaseSet {
    pub cases: Vec<ConflictCase>,
    pub skipped: Vec<LineError>,
}

/// Loads a conflict-case file in strict mode.
pub fn load_conflict_cases(path: impl AsRef<Path>) -> Result<Vec<ConflictCase>, CorpusError> {
    load_conflict_cases_with(path, ParseMode::Strict).map(|set| set.cases)
}

pub fn load_conflict_cases_with(
    path: impl AsRef<Path>,
    mode: ParseMode,
) -> Result<CaseSet, CorpusError> {
    parse_conflict_cases(&read(path.as_ref())?, mode)
}

pub fn parse_conflict_cases(text: &str, mode: ParseMode) -> Result<CaseSet, CorpusError> {
    let mut ids = HashSet::new();
    let (cases, skipped) = parse_lines(text, mode, |line, raw| {
        let case: ConflictCase = serde_json::from_str(raw).map_err(|e| CorpusError::Malformed {
            line,
            message: e.to_string(),
        })?;
        case.validate()
            .map_err(|message| CorpusError::Malformed { line, message })?;
        if !ids.insert(case.case_id.clone()) {
            return Err(CorpusError::DuplicateCase {
                line,
                case_id: case.case_id,
            });
        }
        Ok(case)
    })?;
    Ok(CaseSet { cases, skipped })
}

/// Writes one JSON object per line, in the same key order the loaders accept.
pub fn write_lines<W: Write, T: Serialize>(mut w: W, items: &[T]) -> io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_lines<T>(
    text: &str,
    mode: ParseMode,
    mut parse: impl FnMut(usize, &str) -> Result<T, CorpusError>,
) -> Result<(Vec<T>, Vec<LineError>), CorpusError> {
    let mut items = Vec::new();
    let mut skipped = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        match parse(i + 1, raw) {
            Ok(item) => items.push(item),
            Err(e) => match mode {
                ParseMode::Strict => return Err(e),
                ParseMode::Lenient => skipped.extend(e.line_error()),
            },
        }
    }
    Ok((items, skipped))
}
