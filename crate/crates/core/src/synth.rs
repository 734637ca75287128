//! Seeded generator for desk-scale corpora and conflict cases.
//!
//! Each case's applied mark is its killer's mark after `0..=max_edits` single
//! letter edits (insertions, deletions, substitutions; half the substitutions
//! stay inside the letter's Soundex group). Applied marks never collide with
//! an unrelated record's canonical text, so an exact-only engine returns
//! nothing but killers. Marks are unique across the corpus except for
//! deliberate "twin" registrations of the same live mark, which are cited
//! together.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{write_lines, ConflictCase, KillerRef, Status, TrademarkRecord};
use crate::editdist::levenshtein;
use crate::normalize::normalize;

pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const CASES_FILE: &str = "cases.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthConfig {
    pub records: usize,
    pub cases: usize,
    pub seed: u64,
    pub max_edits: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            records: 1000,
            cases: 100,
            seed: 42,
            max_edits: 2,
        }
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("could not place case {case}: no perturbation avoided existing marks")]
    Exhausted { case: usize },
    #[error("failed to write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthOutput {
    pub records: Vec<TrademarkRecord>,
    pub cases: Vec<ConflictCase>,
}

const ONSETS: &[&str] = &[
    "B", "BR", "C", "CH", "CL", "CR", "D", "DR", "F", "FL", "G", "GR", "H", "J", "K", "L", "M",
    "N", "P", "PR", "QU", "R", "S", "SH", "SK", "SP", "ST", "T", "TR", "V", "W", "Z",
];
const VOWELS: &[&str] = &["A", "E", "I", "O", "U", "AI", "EA", "OO", "Y"];
const CODAS: &[&str] = &["", "", "", "N", "R", "L", "X", "T", "S", "CK", "M", "NT"];
const COMMON_WORDS: &[&str] = &[
    "SERIES",
    "CLUB",
    "GROUP",
    "LABS",
    "WORKS",
    "HOME",
    "PRO",
    "ONE",
    "STUDIO",
    "BRANDS",
    "CO",
    "SYSTEMS",
    "ESSENTIALS",
    "GOLD",
    "PRIME",
];
const OWNERS: &[&str] = &[
    "ACME HOLDINGS LLC",
    "NORTHWIND TRADING CO.",
    "BLUE HARBOR INC.",
    "GREENLEAF BRANDS, INC.",
    "SUMMIT VENTURES LP",
    "ORCHARD LANE LTD.",
    "KESTREL GROUP",
    "RIVERSTONE PARTNERS",
];
// Soundex groups used for sound-alike substitutions.
const SOUND_GROUPS: &[&str] = &["BFPV", "CGJKQSXZ", "DT", "L", "MN", "R", "AEIOUY"];

fn pick<'a>(rng: &mut ChaCha8Rng, items: &[&'a str]) -> &'a str {
    items[rng.gen_range(0..items.len())]
}

fn word(rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.gen_range(1..=3);
    let mut w = String::new();
    for _ in 0..syllables {
        w.push_str(pick(rng, ONSETS));
        w.push_str(pick(rng, VOWELS));
    }
    w.push_str(pick(rng, CODAS));
    w
}

fn mark(rng: &mut ChaCha8Rng) -> String {
    let mut tokens = vec![word(rng)];
    if rng.gen_bool(0.45) {
        tokens.push(word(rng));
    }
    if rng.gen_bool(0.2) {
        tokens.push(pick(rng, COMMON_WORDS).to_owned());
    }
    if rng.gen_bool(0.1) {
        tokens.push(rng.gen_range(1..=99).to_string());
    }
    tokens.join(" ")
}

fn date(rng: &mut ChaCha8Rng, base: NaiveDate, span_days: i64) -> NaiveDate {
    base + Duration::days(rng.gen_range(0..span_days))
}

fn random_letter(rng: &mut ChaCha8Rng) -> u8 {
    b'A' + rng.gen_range(0..26u8)
}

/// Applies one letter edit to a letter of some alphabetic token.
fn perturb_once(rng: &mut ChaCha8Rng, tokens: &mut [Vec<u8>]) {
    let alpha: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.iter().all(u8::is_ascii_uppercase))
        .map(|(i, _)| i)
        .collect();
    let t = &mut tokens[alpha[rng.gen_range(0..alpha.len())]];
    match rng.gen_range(0..3) {
        0 => {
            let pos = rng.gen_range(0..t.len());
            let old = t[pos];
            let group = SOUND_GROUPS
                .iter()
                .find(|g| g.as_bytes().contains(&old))
                .map(|g| g.as_bytes())
                .unwrap_or(b"");
            let mut new = old;
            if group.len() > 1 && rng.gen_bool(0.5) {
                while new == old {
                    new = group[rng.gen_range(0..group.len())];
                }
            } else {
                while new == old {
                    new = random_letter(rng);
                }
            }
            t[pos] = new;
        }
        1 => {
            let pos = rng.gen_range(0..=t.len());
            t.insert(pos, random_letter(rng));
        }
        _ if t.len() > 1 => {
            let pos = rng.gen_range(0..t.len());
            t.remove(pos);
        }
        _ => t.push(random_letter(rng)),
    }
}

fn perturb(rng: &mut ChaCha8Rng, mark: &str, edits: usize) -> String {
    let mut tokens: Vec<Vec<u8>> = mark.split(' ').map(|t| t.as_bytes().to_vec()).collect();
    for _ in 0..edits {
        perturb_once(rng, &mut tokens);
    }
    tokens
        .into_iter()
        .map(|t| String::from_utf8(t).expect("ascii"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Generates `records` marks and `cases` conflict cases deterministically from `seed`.
pub fn generate(config: &SynthConfig) -> Result<SynthOutput, SynthError> {
    if config.records == 0 {
        return Err(SynthError::InvalidParams(
            "records must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let epoch = NaiveDate::from_ymd_opt(1990, 1, 1).expect("valid date");

    let mut records: Vec<TrademarkRecord> = Vec::with_capacity(config.records);
    let mut seen = HashSet::new();
    // canonical mark -> indices of records carrying it
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for i in 0..config.records {
        let live_earlier: Vec<usize> = if rng.gen_bool(0.05) {
            records
                .iter()
                .enumerate()
                .filter(|(_, r)| r.status == Status::Live)
                .map(|(j, _)| j)
                .collect()
        } else {
            Vec::new()
        };
        let (text, status) = if let Some(&twin) = live_earlier.choose(&mut rng) {
            (records[twin].mark.clone(), Status::Live)
        } else {
            let text = loop {
                let candidate = mark(&mut rng);
                if seen.insert(normalize(&candidate).canonical().to_owned()) {
                    break candidate;
                }
            };
            let status = match rng.gen_range(0..100) {
                0..=74 => Status::Live,
                75..=86 => Status::Pending,
                _ => Status::Dead,
            };
            (text, status)
        };

        let mut classes = std::collections::BTreeSet::new();
        for _ in 0..rng.gen_range(1..=3) {
            classes.insert(rng.gen_range(1..=45u8));
        }
        let filing = date(&mut rng, epoch, 12_000);
        let (registration, registration_date) = if status == Status::Pending {
            (None, None)
        } else {
            let reg = format!("{}", rng.gen_range(1_000_000..6_000_000u32));
            (
                Some(reg),
                Some(filing + Duration::days(rng.gen_range(200..700))),
            )
        };
        groups
            .entry(normalize(&text).canonical().to_owned())
            .or_default()
            .push(i);
        records.push(TrademarkRecord {
            serial: format!("{}", 90_000_000 + i),
            registration,
            mark: text,
            status,
            classes,
            owner: Some(pick(&mut rng, OWNERS).to_owned()),
            filing_date: Some(filing),
            registration_date,
        });
    }

    let mut eligible: Vec<&String> = groups
        .iter()
        .filter(|(_, ids)| ids.iter().all(|&i| records[i].status == Status::Live))
        .map(|(k, _)| k)
        .collect();
    if config.cases > eligible.len() {
        return Err(SynthError::InvalidParams(format!(
            "{} cases requested but only {} live marks are available",
            config.cases,
            eligible.len()
        )));
    }
    eligible.shuffle(&mut rng);

    let mut cases = Vec::with_capacity(config.cases);
    for (j, canonical) in eligible.into_iter().take(config.cases).enumerate() {
        let killer_ids = &groups[canonical];
        let killer_mark = &records[killer_ids[0]].mark;
        let edits = rng.gen_range(0..=config.max_edits);
        let applied = (0..200)
            .map(|_| perturb(&mut rng, killer_mark, edits))
            .find(|applied| {
                let c = normalize(applied);
                (c.canonical() == canonical.as_str() || !groups.contains_key(c.canonical()))
                    && levenshtein(c.canonical(), canonical.as_str()) <= config.max_edits
            })
            .ok_or(SynthError::Exhausted { case: j + 1 })?;
        cases.push(ConflictCase {
            case_id: format!("case-{:04}", j + 1),
            applied_mark: applied,
            application_serial: Some(format!("{}", 97_000_000 + j)),
            killer_marks: killer_ids
                .iter()
                .map(|&i| KillerRef {
                    mark: records[i].mark.clone(),
                    serial: Some(records[i].serial.clone()),
                })
                .collect(),
            decision_date: Some(date(
                &mut rng,
                NaiveDate::from_ymd_opt(2019, 1, 1).expect("valid date"),
                540,
            )),
        });
    }

    Ok(SynthOutput { records, cases })
}

impl SynthOutput {
    /// Writes `corpus.jsonl` and `cases.jsonl` into `dir`, creating it if needed.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf), SynthError> {
        let dir = dir.as_ref();
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| SynthError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let corpus_path = dir.join(CORPUS_FILE);
        let cases_path = dir.join(CASES_FILE);
        let f = File::create(&corpus_path).map_err(io_err(&corpus_path))?;
        write_lines(BufWriter::new(f), &self.records).map_err(io_err(&corpus_path))?;
        let f = File::create(&cases_path).map_err(io_err(&cases_path))?;
        write_lines(BufWriter::new(f), &self.cases).map_err(io_err(&cases_path))?;
        Ok((corpus_path, cases_path))
    }
}
