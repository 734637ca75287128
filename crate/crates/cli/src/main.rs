use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use knockout_core::corpus::{
    load_conflict_cases_with, load_corpus_with, Corpus, ParseMode, Status, MAX_CLASS, MIN_CLASS,
};
use knockout_core::eval::{
    eval_at_limits, format_limit, load_recorded, parse_limits, write_cases_csv,
    write_levenshtein_csv, EngineReports, EvalBundle, EvalConfig, EvalReport, LimitLabel,
    LocalEngine, MatchMode, RecordedEngine, SearchEngine,
};
use knockout_core::index::IndexConfig;
use knockout_core::search::{knockout_search_detailed, SearchError, BUILTIN_PROFILE_NAMES};
use knockout_core::synth::{generate, SynthConfig};
use knockout_core::{EngineProfile, Index};
use knockout_service::AppState;

const REPORT_JSON: &str = "report.json";
const RESULTS_CSV: &str = "results.csv";
const LEVENSHTEIN_CSV: &str = "levenshtein.csv";

#[derive(Parser)]
#[command(
    name = "knockout",
    version,
    about = "Trademark knockout search and evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a corpus and print a summary
    Ingest(IngestArgs),
    /// Run one knockout search
    Search(SearchArgs),
    /// Score engines against conflict cases
    Eval(EvalArgs),
    /// Serve the HTTP API
    Serve(ServeArgs),
    /// Generate a synthetic corpus and conflict cases
    Synth(SynthArgs),
}

#[derive(Args)]
struct CorpusArgs {
    /// Line-delimited JSON trademark records
    #[arg(long)]
    corpus: PathBuf,
    /// Skip malformed lines instead of failing
    #[arg(long, conflicts_with = "strict")]
    lenient: bool,
    /// Fail on the first malformed line (default)
    #[arg(long)]
    strict: bool,
}

impl CorpusArgs {
    fn mode(&self) -> ParseMode {
        if self.lenient {
            ParseMode::Lenient
        } else {
            ParseMode::Strict
        }
    }

    fn load(&self) -> anyhow::Result<Corpus> {
        let corpus = load_corpus_with(&self.corpus, self.mode())
            .with_context(|| format!("invalid corpus {}", self.corpus.display()))?;
        for skipped in corpus.skipped() {
            eprintln!("warning: {}: skipped {skipped}", self.corpus.display());
        }
        Ok(corpus)
    }
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, short)]
    query: String,
    /// Maximum results, or "all"
    #[arg(long, default_value = "20", value_parser = parse_limit)]
    limit: Limit,
    /// Comma-separated Nice classes used for the class-overlap factor
    #[arg(long, value_parser = parse_classes)]
    classes: Option<Classes>,
    #[arg(long)]
    include_dead: bool,
    #[arg(long, default_value_t = 0.0)]
    min_score: f64,
    #[arg(long, default_value = "full")]
    profile: String,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Line-delimited JSON conflict cases
    #[arg(long)]
    cases: PathBuf,
    /// Comma-separated built-in profiles; all of them unless --recorded is given
    #[arg(long, value_delimiter = ',')]
    profiles: Vec<String>,
    /// Recorded engine results to replay (repeatable)
    #[arg(long)]
    recorded: Vec<PathBuf>,
    /// Comma-separated, strictly increasing result limits; "all" means unlimited
    #[arg(long, default_value = "10,25,50,100,all")]
    limits: String,
    #[arg(long)]
    out: PathBuf,
    /// BY_SERIAL_THEN_TEXT or TEXT_ONLY
    #[arg(long, default_value = "BY_SERIAL_THEN_TEXT")]
    match_mode: MatchMode,
    /// Let local engines return dead marks, which then count as false positives
    #[arg(long)]
    include_dead: bool,
    /// Count repeated results separately
    #[arg(long)]
    no_dedup: bool,
    /// Worker threads for searching cases
    #[arg(long)]
    workers: Option<usize>,
    /// Also write the local engines' ranked answers in replay format
    #[arg(long)]
    save_recorded: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    #[arg(long, default_value = "full")]
    profile: String,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 1000)]
    records: usize,
    #[arg(long, default_value_t = 100)]
    cases: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Upper bound on letter edits between an applied mark and its killer
    #[arg(long, default_value_t = 2)]
    max_edits: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy)]
struct Limit(Option<usize>);

#[derive(Clone)]
struct Classes(std::collections::BTreeSet<u8>);

fn parse_limit(s: &str) -> Result<Limit, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(Limit(None));
    }
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(Limit(Some(n))),
        _ => Err(format!("{s:?} is not a positive integer or \"all\"")),
    }
}

fn parse_classes(s: &str) -> Result<Classes, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| match p.trim().parse::<u8>() {
            Ok(c) if (MIN_CLASS..=MAX_CLASS).contains(&c) => Ok(c),
            _ => Err(format!("{p:?} is not a class in {MIN_CLASS}..={MAX_CLASS}")),
        })
        .collect::<Result<_, _>>()
        .map(Classes)
}

/// A failure with its process exit status: 1 for input errors, 2 for query errors.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Self { code: 1, error }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(args) => ingest(args),
        Command::Search(args) => search(args),
        Command::Eval(args) => eval(args),
        Command::Serve(args) => serve(args),
        Command::Synth(args) => synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) if is_broken_pipe(&f.error) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn is_broken_pipe(error: &anyhow::Error) -> bool {
    error.chain().any(|e| {
        e.downcast_ref::<io::Error>()
            .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn profile_named(name: &str) -> anyhow::Result<EngineProfile> {
    EngineProfile::builtin(name).ok_or_else(|| {
        anyhow!(
            "unknown profile {name:?}; available profiles: {}",
            BUILTIN_PROFILE_NAMES.join(", ")
        )
    })
}

fn ingest(args: IngestArgs) -> CmdResult {
    let corpus = args.corpus.load()?;
    let mut by_status: BTreeMap<&str, usize> = BTreeMap::new();
    let mut by_class: BTreeMap<u8, usize> = BTreeMap::new();
    for r in corpus.records() {
        *by_status.entry(r.status.as_str()).or_default() += 1;
        for &c in &r.classes {
            *by_class.entry(c).or_default() += 1;
        }
    }

    let mut out = io::stdout().lock();
    let write = |out: &mut dyn Write| -> io::Result<()> {
        writeln!(out, "corpus: {}", corpus.source_path().display())?;
        writeln!(out, "records: {}", corpus.len())?;
        writeln!(out, "skipped: {}", corpus.skipped().len())?;
        writeln!(out, "fingerprint: {}", corpus.fingerprint())?;
        let statuses: Vec<String> = [Status::Live, Status::Pending, Status::Dead]
            .iter()
            .map(|s| format!("{} {}", s.as_str(), by_status.get(s.as_str()).unwrap_or(&0)))
            .collect();
        writeln!(out, "status: {}", statuses.join(", "))?;
        writeln!(out, "classes:")?;
        writeln!(out, "  {:>5}  {:>7}", "class", "records")?;
        for (class, n) in &by_class {
            writeln!(out, "  {class:>5}  {n:>7}")?;
        }
        Ok(())
    };
    write(&mut out).context("writing summary")?;
    Ok(())
}

fn search(args: SearchArgs) -> CmdResult {
    let profile = profile_named(&args.profile)?;
    let corpus = args.corpus.load()?;
    let index = Index::build(&corpus, profile.index_config());

    let mut opts = profile.search_options(args.limit.0);
    opts.include_dead = args.include_dead;
    opts.classes = args.classes.map(|c| c.0).filter(|c| !c.is_empty());
    opts.min_score = args.min_score;

    let outcome = knockout_search_detailed(&index, &args.query, &opts).map_err(|e| match e {
        SearchError::EmptyQuery(_) => Failure {
            code: 2,
            error: e.into(),
        },
        SearchError::InvalidOptions(_) => Failure::from(anyhow::Error::from(e)),
    })?;

    let headers = [
        "rank", "score", "band", "mark", "status", "classes", "serial",
    ];
    let rows: Vec<[String; 7]> = outcome
        .results
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let classes: Vec<String> = r.classes.iter().map(u8::to_string).collect();
            [
                (i + 1).to_string(),
                format!("{:.4}", r.score.display_value()),
                r.band.as_str().to_owned(),
                r.mark.clone(),
                r.status.as_str().to_owned(),
                classes.join(","),
                r.serial.clone(),
            ]
        })
        .collect();
    let mut widths = headers.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }

    let mut out = io::stdout().lock();
    let mut write = || -> io::Result<()> {
        writeln!(
            out,
            "query {:?} normalized {:?}: {} of {} matches (profile {})",
            args.query,
            outcome.normalized.canonical(),
            outcome.results.len(),
            outcome.total,
            profile.name
        )?;
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(widths)
                .enumerate()
                .map(|(i, (c, w))| {
                    // rank and score are right-aligned
                    if i < 2 {
                        format!("{c:>w$}")
                    } else {
                        format!("{c:<w$}")
                    }
                })
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_owned()
        };
        writeln!(out, "{}", line(&headers.map(str::to_owned)))?;
        for row in &rows {
            writeln!(out, "{}", line(row))?;
        }
        Ok(())
    };
    write().context("writing results")?;
    Ok(())
}

fn eval(args: EvalArgs) -> CmdResult {
    let limits = parse_limits(&args.limits).map_err(anyhow::Error::from)?;
    let corpus = args.corpus.load()?;
    let case_set = load_conflict_cases_with(&args.cases, args.corpus.mode())
        .with_context(|| format!("invalid cases {}", args.cases.display()))?;
    for skipped in &case_set.skipped {
        eprintln!("warning: {}: skipped {skipped}", args.cases.display());
    }
    let cases = case_set.cases;

    let profile_names: Vec<String> = if args.profiles.is_empty() && args.recorded.is_empty() {
        BUILTIN_PROFILE_NAMES
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        args.profiles.clone()
    };
    let profiles = profile_names
        .iter()
        .map(|n| profile_named(n.trim()))
        .collect::<anyhow::Result<Vec<_>>>()?;

    let mut indexes: BTreeMap<bool, Arc<Index>> = BTreeMap::new();
    let mut local: Vec<LocalEngine> = Vec::new();
    for profile in profiles {
        let config: IndexConfig = profile.index_config();
        let index = indexes
            .entry(config.fold_plurals)
            .or_insert_with(|| Arc::new(Index::build(&corpus, config)))
            .clone();
        let engine = LocalEngine::with_index(profile, index).map_err(anyhow::Error::from)?;
        local.push(engine.include_dead(args.include_dead));
    }
    let mut recorded: Vec<RecordedEngine> = Vec::new();
    for path in &args.recorded {
        recorded.extend(
            load_recorded(path).with_context(|| format!("invalid recording {}", path.display()))?,
        );
    }
    let mut engines: Vec<&dyn SearchEngine> =
        local.iter().map(|e| e as &dyn SearchEngine).collect();
    engines.extend(recorded.iter().map(|e| e as &dyn SearchEngine));
    if engines.is_empty() {
        return Err(anyhow!("no engines to evaluate").into());
    }
    let mut seen = std::collections::BTreeSet::new();
    for e in &engines {
        if !seen.insert(e.name()) {
            return Err(anyhow!("engine name {:?} appears more than once", e.name()).into());
        }
    }

    let config = EvalConfig {
        mode: args.match_mode,
        dedup: !args.no_dedup,
    };
    let run = || -> anyhow::Result<Vec<EngineReports>> {
        engines
            .iter()
            .map(|e| {
                Ok(EngineReports::new(eval_at_limits(
                    *e, &cases, &limits, config,
                )?))
            })
            .collect()
    };
    let engine_reports = match args.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .context("starting worker pool")?
            .install(run)?,
        None => run()?,
    };

    let bundle = EvalBundle {
        match_mode: config.mode,
        dedup: config.dedup,
        limits: limits.iter().copied().map(LimitLabel).collect(),
        engines: engine_reports,
    };
    write_outputs(&args.out, &bundle)?;

    if let Some(path) = &args.save_recorded {
        let max_limit = *limits.last().expect("non-empty");
        let mut w = BufWriter::new(create(path)?);
        for engine in &local {
            RecordedEngine::capture(engine, &cases, max_limit)
                .map_err(anyhow::Error::from)?
                .write_to(&mut w)
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }

    print_summary(&bundle, cases.len()).context("writing summary")?;
    Ok(())
}

fn create(path: &Path) -> anyhow::Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn write_outputs(dir: &Path, bundle: &EvalBundle) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let reports = bundle.all_reports();
    let path = dir.join(REPORT_JSON);
    bundle
        .write_json(BufWriter::new(create(&path)?))
        .with_context(|| format!("writing {}", path.display()))?;
    let path = dir.join(RESULTS_CSV);
    write_cases_csv(BufWriter::new(create(&path)?), &reports)
        .with_context(|| format!("writing {}", path.display()))?;
    let path = dir.join(LEVENSHTEIN_CSV);
    write_levenshtein_csv(BufWriter::new(create(&path)?), &bundle.headlines())
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn metric(value: Option<f64>) -> String {
    value.map_or_else(|| "undefined".to_owned(), |v| format!("{v:.4}"))
}

fn print_summary(bundle: &EvalBundle, n_cases: usize) -> io::Result<()> {
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{n_cases} cases, match mode {}, dedup {}",
        bundle.match_mode, bundle.dedup
    )?;
    let width = bundle
        .engines
        .iter()
        .map(|e| e.engine.len())
        .max()
        .unwrap_or(6)
        .max(6);
    writeln!(
        out,
        "{:<width$}  {:>5}  {:>6}  {:>6}  {:>6}  {:>9}  {:>9}  {:>9}  {:>7}",
        "engine", "limit", "tp", "fp", "fn", "recall", "precision", "found_any", "errored"
    )?;
    for engine in &bundle.engines {
        for r in &engine.reports {
            writeln!(
                out,
                "{:<width$}  {:>5}  {:>6}  {:>6}  {:>6}  {:>9}  {:>9}  {:>9}  {:>7}",
                r.engine,
                format_limit(r.limit),
                r.counts.tp,
                r.counts.fp,
                r.counts.fn_,
                metric(r.recall),
                metric(r.precision),
                metric(r.found_any_rate),
                r.n_errored
            )?;
        }
    }
    writeln!(out)?;
    for engine in &bundle.engines {
        let r: &EvalReport = engine.headline();
        writeln!(
            out,
            "{} at limit {}: recall {} precision {} exact_match_rate {} phonetic_match_rate {} median_levenshtein {}",
            r.engine,
            format_limit(r.limit),
            metric(r.recall),
            metric(r.precision),
            metric(r.exact_match_rate),
            metric(r.phonetic_match_rate),
            r.levenshtein_median.map_or_else(|| "undefined".to_owned(), |m| m.to_string()),
        )?;
    }
    out.flush()
}

fn serve(args: ServeArgs) -> CmdResult {
    let profile = profile_named(&args.profile)?;
    let corpus = args.corpus.load()?;
    let index = Arc::new(Index::build(&corpus, profile.index_config()));
    let state = Arc::new(AppState::new(index, profile));

    let runtime = tokio::runtime::Runtime::new().context("starting runtime")?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(args.addr)
            .await
            .with_context(|| format!("binding {}", args.addr))?;
        let addr = listener.local_addr().context("reading bound address")?;
        println!("listening on http://{addr} ({} records)", corpus.len());
        io::stdout().flush().ok();
        knockout_service::serve(listener, state, async {
            tokio::signal::ctrl_c().await.ok();
        })
        .await
        .context("serving")?;
        Ok::<_, anyhow::Error>(())
    })?;
    Ok(())
}

fn synth(args: SynthArgs) -> CmdResult {
    let output = generate(&SynthConfig {
        records: args.records,
        cases: args.cases,
        seed: args.seed,
        max_edits: args.max_edits,
    })
    .map_err(anyhow::Error::from)?;
    let (corpus_path, cases_path) = output
        .write_to_dir(&args.out)
        .map_err(anyhow::Error::from)?;
    println!(
        "wrote {} records to {}",
        output.records.len(),
        corpus_path.display()
    );
    println!(
        "wrote {} cases to {}",
        output.cases.len(),
        cases_path.display()
    );
    Ok(())
}
