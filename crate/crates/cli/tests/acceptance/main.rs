//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#[path = "../../../core/tests/support/mod.rs"]
mod support;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use knockout_core::corpus::{ConflictCase, Corpus, KillerRef};
use knockout_core::editdist::{damerau_levenshtein, edit_similarity, levenshtein};
use knockout_core::eval::{
    confusion_counts, eval_at_limits, eval_run, EngineError, EvalConfig, EvalReport, LocalEngine,
    MatchMode, ReturnedMark, SearchEngine,
};
use knockout_core::index::{CandidateOptions, Index, IndexConfig};
use knockout_core::normalize::normalize;
use knockout_core::phonetics::soundex;
use knockout_core::search::knockout_search;
use knockout_core::synth::{generate, SynthConfig, SynthOutput};
use knockout_core::EngineProfile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{
    brute_force_search, naive_levenshtein, naive_osa, naive_soundex, perturb, random_records,
    random_string,
};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    check(elapsed < budget, || {
        format!("took {elapsed:.2?}, budget {budget:?}")
    })
}

fn soundex_conformance() -> Outcome {
    let start = Instant::now();
    for (word, code) in [
        ("ROBERT", "R163"),
        ("RUPERT", "R163"),
        ("ASHCRAFT", "A261"),
        ("PFISTER", "P236"),
    ] {
        let got = soundex(word).map_err(|e| e.to_string())?;
        check(got.as_str() == code, || {
            format!("{word}: got {}, want {code}", got.as_str())
        })?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(688);
    for _ in 0..1_000 {
        let word = random_string(&mut rng, b"ABCDEFGHIJKLMNOPQRSTUVWXYZ", 1..=20);
        let code = soundex(&word).map_err(|e| e.to_string())?;
        let c = code.as_str().as_bytes();
        let shape = c.len() == 4
            && c[0].is_ascii_uppercase()
            && c[1..].iter().all(|b| (b'0'..=b'6').contains(b));
        check(shape, || {
            format!("{word}: malformed code {}", code.as_str())
        })?;
        check(code.as_str() == naive_soundex(&word), || {
            format!("{word}: disagrees with reference")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "4 vectors + 1000 random words in {:.2?}",
        start.elapsed()
    ))
}

fn edit_distance_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(689);
    let alphabets: [&[u8]; 3] = [b"AB", b"ABCDE ", b"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 "];
    let mut prev = String::new();
    for i in 0..10_000 {
        let alphabet = alphabets[i % 3];
        let a = random_string(&mut rng, alphabet, 0..=40);
        let b = if rng.gen_bool(0.5) {
            let edits = rng.gen_range(0..=5);
            perturb(&mut rng, &a, edits, alphabet)
        } else {
            random_string(&mut rng, alphabet, 0..=40)
        };
        let (lev, osa) = (levenshtein(&a, &b), damerau_levenshtein(&a, &b));
        check(lev == naive_levenshtein(&a, &b), || {
            format!("levenshtein({a:?}, {b:?}) = {lev}")
        })?;
        check(osa == naive_osa(&a, &b), || {
            format!("damerau({a:?}, {b:?}) = {osa}")
        })?;
        let (la, lb) = (a.chars().count(), b.chars().count());
        check(levenshtein(&a, &a) == 0, || format!("d({a:?}, {a:?}) != 0"))?;
        check(lev == levenshtein(&b, &a), || {
            format!("asymmetric on {a:?}, {b:?}")
        })?;
        check((lev == 0) == (a == b), || {
            format!("identity fails on {a:?}, {b:?}")
        })?;
        check(la.abs_diff(lb) <= lev && lev <= la.max(lb), || {
            format!("bounds fail on {a:?}, {b:?}")
        })?;
        check(osa <= lev, || {
            format!("damerau exceeds levenshtein on {a:?}, {b:?}")
        })?;
        check(
            levenshtein(&a, &prev) <= lev + levenshtein(&b, &prev),
            || format!("triangle inequality fails on {a:?}, {b:?}, {prev:?}"),
        )?;
        let sim = edit_similarity(&a, &b);
        check((0.0..=1.0).contains(&sim), || {
            format!("similarity {sim} out of range")
        })?;
        prev = b;
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("10000 pairs in {:.2?}", start.elapsed()))
}

fn candidate_superset() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(690);
    let alphabet = b"ABCDEHS ";
    let mut pairs = 0;
    let mut checked = 0usize;
    while pairs < 1_000 {
        let n = rng.gen_range(1..=1_000);
        let corpus = Corpus::from_records(random_records(&mut rng, n, alphabet, 1..=14))
            .map_err(|e| e.to_string())?;
        let index = Index::build(
            &corpus,
            IndexConfig {
                fold_plurals: rng.gen_bool(0.5),
            },
        );
        let norms: Vec<String> = corpus
            .records()
            .iter()
            .map(|r| normalize(&r.mark).canonical().to_owned())
            .collect();
        for _ in 0..50 {
            let k = pairs % 3;
            let raw = loop {
                let base = &corpus.records()[rng.gen_range(0..n)].mark;
                let edits = rng.gen_range(0..=3);
                let q = perturb(&mut rng, base, edits, alphabet);
                if !normalize(&q).is_empty() {
                    break q;
                }
            };
            let query = normalize(&raw);
            let opts = CandidateOptions {
                edit_budget: k,
                use_phonetic: rng.gen_bool(0.5),
                use_tokens: rng.gen_bool(0.5),
                ..CandidateOptions::default()
            };
            let got: BTreeSet<usize> = index.candidates(&query, &opts).into_iter().collect();
            for (id, norm) in norms.iter().enumerate() {
                if naive_levenshtein(query.canonical(), norm) <= k {
                    checked += 1;
                    check(got.contains(&id), || {
                        format!("{norm:?} within {k} of {raw:?} not a candidate")
                    })?;
                }
            }
            pairs += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!(
        "{pairs} pairs, {checked} edit-distance matches covered in {:.2?}",
        start.elapsed()
    ))
}

fn synthetic(records: usize, cases: usize, seed: u64) -> Result<SynthOutput, String> {
    generate(&SynthConfig {
        records,
        cases,
        seed,
        max_edits: 2,
    })
    .map_err(|e| e.to_string())
}

fn search_equivalence() -> Outcome {
    let start = Instant::now();
    let data = synthetic(1_000, 200, 691)?;
    let corpus = Corpus::from_records(data.records).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(691);
    let queries: Vec<String> = data
        .cases
        .iter()
        .map(|c| {
            if rng.gen_bool(0.25) {
                let tokens: Vec<String> = normalize(&c.applied_mark).tokens().to_vec();
                tokens[0].clone()
            } else {
                c.applied_mark.clone()
            }
        })
        .collect();
    let sets = {
        let full = EngineProfile::builtin("full").unwrap();
        let edit = EngineProfile::builtin("edit").unwrap();
        let gram = EngineProfile::builtin("gram").unwrap();
        let mut a = full.search_options(Some(100));
        a.classes = Some(BTreeSet::from([9, 25]));
        let mut b = edit.search_options(Some(20));
        b.include_dead = true;
        b.min_score = 0.3;
        let c = gram.search_options(None);
        [(full, a), (edit, b), (gram, c)]
    };
    let mut compared = 0;
    for (profile, opts) in &sets {
        let index = Index::build(&corpus, profile.index_config());
        for q in &queries {
            let got: Vec<String> = knockout_search(&index, q, opts)
                .map_err(|e| e.to_string())?
                .into_iter()
                .map(|r| r.serial)
                .collect();
            let want: Vec<String> =
                brute_force_search(corpus.records(), q, opts, profile.fold_plurals)
                    .into_iter()
                    .map(|h| h.serial)
                    .collect();
            check(got == want, || {
                format!("profile {} query {q:?}: {got:?} != {want:?}", profile.name)
            })?;
            compared += got.len();
        }
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!(
        "{} queries x 3 option sets, {compared} ranked ids identical, in {:.2?}",
        queries.len(),
        start.elapsed()
    ))
}

struct Perfect(BTreeMap<String, Vec<ReturnedMark>>);

impl SearchEngine for Perfect {
    fn name(&self) -> &str {
        "perfect"
    }

    fn search(&self, q: &str, limit: Option<usize>) -> Result<Vec<ReturnedMark>, EngineError> {
        let mut hits = self
            .0
            .get(normalize(q).canonical())
            .cloned()
            .unwrap_or_default();
        hits.truncate(limit.unwrap_or(usize::MAX));
        Ok(hits)
    }
}

struct Null;

impl SearchEngine for Null {
    fn name(&self) -> &str {
        "null"
    }

    fn search(&self, _: &str, _: Option<usize>) -> Result<Vec<ReturnedMark>, EngineError> {
        Ok(Vec::new())
    }
}

fn harness_self_consistency() -> Outcome {
    let data = synthetic(1_000, 100, 42)?;
    let config = EvalConfig::new(MatchMode::BySerialThenText);
    let perfect = Perfect(
        data.cases
            .iter()
            .map(|c| {
                let hits = c
                    .killer_marks
                    .iter()
                    .map(|k| ReturnedMark::new(&k.mark, k.serial.as_deref()))
                    .collect();
                (normalize(&c.applied_mark).canonical().to_owned(), hits)
            })
            .collect(),
    );
    let r = eval_run(&perfect, &data.cases, None, config).map_err(|e| e.to_string())?;
    check(
        r.precision == Some(1.0) && r.recall == Some(1.0) && r.found_any_rate == Some(1.0),
        || {
            format!(
                "perfect engine: precision {:?} recall {:?} found_any {:?}",
                r.precision, r.recall, r.found_any_rate
            )
        },
    )?;
    let r = eval_run(&Null, &data.cases, Some(100), config).map_err(|e| e.to_string())?;
    check(r.recall == Some(0.0) && r.precision.is_none(), || {
        format!(
            "null engine: precision {:?} recall {:?}",
            r.precision, r.recall
        )
    })?;

    let case = ConflictCase {
        case_id: "micro".into(),
        applied_mark: "CLOSET ENVY".into(),
        application_serial: None,
        killer_marks: ["CLOSET ENVY", "KLOUT ENVY", "ENVI"]
            .iter()
            .map(|m| KillerRef {
                mark: (*m).into(),
                serial: None,
            })
            .collect(),
        decision_date: None,
    };
    let returned: Vec<ReturnedMark> = [
        "CLOSET ENVY",
        "ENCLOSE",
        "ENDO CLOSE",
        "KLOUT ENVY",
        "ENVIED CLOTHING CO.",
        "ENVYUS",
        "CLOSETS",
    ]
    .iter()
    .map(|m| ReturnedMark::new(*m, None))
    .collect();
    let counts = confusion_counts(&case, &returned, MatchMode::TextOnly);
    check(
        counts.precision() == Some(2.0 / 7.0) && counts.recall() == Some(2.0 / 3.0),
        || {
            format!(
                "micro case: precision {:?} recall {:?}",
                counts.precision(),
                counts.recall()
            )
        },
    )?;
    Ok("perfect 1.0/1.0/1.0, null recall 0 precision undefined, micro 2/7 and 2/3".into())
}

const CURVE_LIMITS: [Option<usize>; 5] = [Some(10), Some(25), Some(50), Some(100), None];

fn profile_reports() -> Result<Vec<Vec<EvalReport>>, String> {
    let data = synthetic(1_000, 100, 42)?;
    let corpus = Corpus::from_records(data.records).map_err(|e| e.to_string())?;
    EngineProfile::builtins()
        .into_iter()
        .map(|p| {
            eval_at_limits(
                &LocalEngine::new(p, &corpus),
                &data.cases,
                &CURVE_LIMITS,
                EvalConfig::new(MatchMode::BySerialThenText),
            )
            .map_err(|e| e.to_string())
        })
        .collect()
}

fn limit_curve(reports: &[Vec<EvalReport>]) -> Outcome {
    let mut curves = Vec::new();
    for engine in reports {
        let recalls: Vec<f64> = engine[..4]
            .iter()
            .map(|r| r.recall.unwrap_or(0.0))
            .collect();
        check(recalls.windows(2).all(|w| w[0] <= w[1]), || {
            format!(
                "{}: recall decreases across limits: {recalls:?}",
                engine[0].engine
            )
        })?;
        curves.push(format!(
            "{} {:.3}->{:.3}",
            engine[0].engine, recalls[0], recalls[3]
        ));
    }
    Ok(curves.join(", "))
}

fn qualitative_table(reports: &[Vec<EvalReport>], elapsed: Duration) -> Outcome {
    let at_all: BTreeMap<&str, &EvalReport> = reports
        .iter()
        .map(|e| (e[0].engine.as_str(), e.last().expect("limits")))
        .collect();
    let (exact, full) = (at_all["exact-only"], at_all["full"]);
    let (re, rf) = (exact.recall.unwrap_or(0.0), full.recall.unwrap_or(0.0));
    check(rf > re, || {
        format!("(a) full recall {rf} not above exact-only {re}")
    })?;
    let pe = exact.precision.unwrap_or(0.0);
    for (name, r) in &at_all {
        check(r.precision.is_none_or(|p| pe >= p), || {
            format!(
                "(b) exact-only precision {pe} below {name} {:?}",
                r.precision
            )
        })?;
    }
    check(rf == 1.0, || format!("(c) full recall {rf} != 1.0"))?;
    within(elapsed, Duration::from_secs(300))?;
    let cells: Vec<String> = at_all
        .iter()
        .map(|(n, r)| {
            format!(
                "{n} R={:.4} P={:.4}",
                r.recall.unwrap_or(0.0),
                r.precision.unwrap_or(0.0)
            )
        })
        .collect();
    Ok(format!("{} ({elapsed:.2?})", cells.join("; ")))
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_knockout"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "knockout {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = dir.path().join("data");
    let data_s = data.to_str().unwrap();
    run_cli(&[
        "synth",
        "--records",
        "1000",
        "--cases",
        "100",
        "--seed",
        "42",
        "--max-edits",
        "2",
        "--out",
        data_s,
    ])?;
    let corpus = data.join("corpus.jsonl");
    let cases = data.join("cases.jsonl");
    let mut outputs = Vec::new();
    for (run, workers) in [("a", "1"), ("b", "4")] {
        let out = dir.path().join(run);
        run_cli(&[
            "eval",
            "--corpus",
            corpus.to_str().unwrap(),
            "--cases",
            cases.to_str().unwrap(),
            "--limits",
            "10,25,50,100,all",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ])?;
        outputs.push(
            ["report.json", "results.csv", "levenshtein.csv"]
                .map(|f| read(&out.join(f)))
                .into_iter()
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    for (i, name) in ["report.json", "results.csv", "levenshtein.csv"]
        .iter()
        .enumerate()
    {
        check(outputs[0][i] == outputs[1][i], || {
            format!("{name} differs between runs")
        })?;
    }
    Ok(format!(
        "report.json ({} bytes), results.csv, levenshtein.csv identical across runs",
        outputs[0][0].len()
    ))
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("soundex conformance", soundex_conformance()),
        ("edit-distance oracle", edit_distance_oracle()),
        ("candidate superset guarantee", candidate_superset()),
        ("search/oracle equivalence", search_equivalence()),
        ("harness self-consistency", harness_self_consistency()),
    ];
    let start = Instant::now();
    match profile_reports() {
        Ok(reports) => {
            let elapsed = start.elapsed();
            results.push(("limit-curve monotonicity", limit_curve(&reports)));
            results.push((
                "qualitative summary matrix",
                qualitative_table(&reports, elapsed),
            ));
        }
        Err(e) => {
            results.push(("limit-curve monotonicity", Err(e.clone())));
            results.push(("qualitative summary matrix", Err(e)));
        }
    }
    results.push(("eval determinism", determinism()));

    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
