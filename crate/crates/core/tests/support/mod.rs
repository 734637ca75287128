//! Reference implementations used as test oracles. They favour the most
//! literal formulation over speed and share no code with the library beyond
//! normalization and the scoring formula.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BTreeSet;

use knockout_core::corpus::{Status, TrademarkRecord};
use knockout_core::normalize::{normalize, singularize, NormalizedMark};
use knockout_core::scoring;
use knockout_core::search::SearchOptions;
use rand::Rng;

/// Full-matrix Levenshtein distance over chars.
pub fn naive_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = (d[i - 1][j] + 1)
                .min(d[i][j - 1] + 1)
                .min(d[i - 1][j - 1] + cost);
        }
    }
    d[a.len()][b.len()]
}

/// Full-matrix optimal string alignment distance.
pub fn naive_osa(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut best = (d[i - 1][j] + 1)
                .min(d[i][j - 1] + 1)
                .min(d[i - 1][j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                best = best.min(d[i - 2][j - 2] + 1);
            }
            d[i][j] = best;
        }
    }
    d[a.len()][b.len()]
}

fn soundex_digit(c: char) -> Option<char> {
    let groups = [
        ("BFPV", '1'),
        ("CGJKQSXZ", '2'),
        ("DT", '3'),
        ("L", '4'),
        ("MN", '5'),
        ("R", '6'),
    ];
    groups
        .iter()
        .find(|(letters, _)| letters.contains(c))
        .map(|&(_, d)| d)
}

/// American Soundex of an uppercase letter string.
pub fn naive_soundex(word: &str) -> String {
    let letters: Vec<char> = word.chars().collect();
    let mut out = String::new();
    out.push(letters[0]);
    let mut last = soundex_digit(letters[0]);
    for &c in &letters[1..] {
        match c {
            'H' | 'W' => {}
            'A' | 'E' | 'I' | 'O' | 'U' | 'Y' => last = None,
            _ => {
                let d = soundex_digit(c);
                if d != last {
                    out.push(d.expect("consonant"));
                }
                last = d;
            }
        }
    }
    while out.len() < 4 {
        out.push('0');
    }
    out.truncate(4);
    out
}

/// Multiset of padded 3-grams, as strings.
pub fn naive_grams(canonical: &str) -> Vec<String> {
    let padded: Vec<char> = format!("##{canonical}##").chars().collect();
    padded.windows(3).map(|w| w.iter().collect()).collect()
}

/// Size of the multiset intersection of the padded 3-gram bags.
pub fn naive_common_grams(a: &str, b: &str) -> usize {
    let mut pool = naive_grams(b);
    let mut shared = 0;
    for g in naive_grams(a) {
        if let Some(pos) = pool.iter().position(|p| *p == g) {
            pool.swap_remove(pos);
            shared += 1;
        }
    }
    shared
}

fn key(mark: &NormalizedMark, fold: bool) -> NormalizedMark {
    if fold {
        normalize(
            &mark
                .tokens()
                .iter()
                .map(|t| singularize(t))
                .collect::<Vec<_>>()
                .join(" "),
        )
    } else {
        mark.clone()
    }
}

fn soundex_sequence(mark: &NormalizedMark) -> Vec<String> {
    mark.tokens()
        .iter()
        .map(|t| {
            let letters: String = t.chars().filter(char::is_ascii_alphabetic).collect();
            if letters.is_empty() {
                t.clone()
            } else {
                naive_soundex(&letters)
            }
        })
        .collect()
}

/// Whether `opts` would admit `record` for `query` by the matcher definitions.
pub fn brute_force_admits(
    query: &NormalizedMark,
    record: &NormalizedMark,
    opts: &SearchOptions,
    fold: bool,
) -> bool {
    if query.canonical() == record.canonical() {
        return true;
    }
    let m = opts.matchers;
    let k = opts.candidate_opts.edit_budget;
    let (qk, rk) = (key(query, fold), key(record, fold));
    let q_tokens: BTreeSet<&String> = qk.tokens().iter().collect();
    let q_grams = naive_grams(query.canonical()).len();
    let gram_min = q_grams.saturating_sub(3 * k).max(1);
    (m.edit && naive_levenshtein(query.canonical(), record.canonical()) <= k)
        || (m.tokens && rk.tokens().iter().any(|t| q_tokens.contains(t)))
        || (m.phonetic
            && !qk.is_empty()
            && !rk.is_empty()
            && soundex_sequence(&qk) == soundex_sequence(&rk))
        || (m.grams && naive_common_grams(query.canonical(), record.canonical()) >= gram_min)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleHit {
    pub serial: String,
    pub score: f64,
    pub exact: bool,
    pub levenshtein: usize,
    pub status: Status,
}

/// Scores every record, keeps the admitted ones and sorts them.
pub fn brute_force_search(
    records: &[TrademarkRecord],
    raw: &str,
    opts: &SearchOptions,
    fold: bool,
) -> Vec<OracleHit> {
    let query = normalize(raw);
    let mut hits: Vec<OracleHit> = records
        .iter()
        .filter(|r| opts.include_dead || r.status != Status::Dead)
        .filter_map(|r| {
            let norm = normalize(&r.mark);
            if !brute_force_admits(&query, &norm, opts, fold) {
                return None;
            }
            let score = scoring::score(
                &query,
                &norm,
                &r.classes,
                opts.classes.as_ref(),
                &opts.weights,
            )
            .unwrap()
            .value();
            (score >= opts.min_score).then(|| OracleHit {
                serial: r.serial.clone(),
                score,
                exact: query.canonical() == norm.canonical(),
                levenshtein: naive_levenshtein(query.canonical(), norm.canonical()),
                status: r.status,
            })
        })
        .collect();
    let rank = |s: Status| match s {
        Status::Live => 0,
        Status::Pending => 1,
        Status::Dead => 2,
    };
    hits.sort_by(|a, b| {
        b.exact
            .cmp(&a.exact)
            .then(b.score.partial_cmp(&a.score).unwrap_or(Ordering::Equal))
            .then(rank(a.status).cmp(&rank(b.status)))
            .then(a.serial.cmp(&b.serial))
    });
    if let Some(limit) = opts.limit {
        hits.truncate(limit);
    }
    hits
}

/// A random string over `alphabet` with length in `len`.
pub fn random_string<R: Rng>(
    rng: &mut R,
    alphabet: &[u8],
    len: std::ops::RangeInclusive<usize>,
) -> String {
    let n = rng.gen_range(len);
    (0..n)
        .map(|_| alphabet[rng.gen_range(0..alphabet.len())] as char)
        .collect()
}

/// `s` after `edits` random single-character edits drawn from `alphabet`.
pub fn perturb<R: Rng>(rng: &mut R, s: &str, edits: usize, alphabet: &[u8]) -> String {
    let mut chars: Vec<char> = s.chars().collect();
    for _ in 0..edits {
        let c = alphabet[rng.gen_range(0..alphabet.len())] as char;
        match rng.gen_range(0..3) {
            0 => chars.insert(rng.gen_range(0..=chars.len()), c),
            1 if !chars.is_empty() => {
                chars.remove(rng.gen_range(0..chars.len()));
            }
            _ if !chars.is_empty() => {
                let i = rng.gen_range(0..chars.len());
                chars[i] = c;
            }
            _ => chars.push(c),
        }
    }
    chars.into_iter().collect()
}

/// Records with random marks; statuses and classes vary.
pub fn random_records<R: Rng>(
    rng: &mut R,
    n: usize,
    alphabet: &[u8],
    len: std::ops::RangeInclusive<usize>,
) -> Vec<TrademarkRecord> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mark = random_string(rng, alphabet, len.clone());
        if normalize(&mark).is_empty() {
            continue;
        }
        let status = match rng.gen_range(0..10) {
            0 | 1 => Status::Dead,
            2 => Status::Pending,
            _ => Status::Live,
        };
        let mut classes = BTreeSet::new();
        for _ in 0..rng.gen_range(1..=2) {
            classes.insert(rng.gen_range(1..=45));
        }
        out.push(TrademarkRecord {
            serial: format!("{:08}", 10_000_000 + out.len()),
            registration: None,
            mark,
            status,
            classes,
            owner: None,
            filing_date: None,
            registration_date: None,
        });
    }
    out
}
