//! Batch command-line front end.
//!
//! stdout carries data only; diagnostics go to stderr. Exit codes: 0 ok,
//! 1 usage, 2 input or parse error, 3 internal invariant violation.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::{extract_nouns, parse_plain, CorpusError, Document, SemcorParser};
use crate::density::{DensityError, DensityParams};
use crate::eval::{
    self, most_frequent_baseline, random_baseline_analytic, random_baseline_monte_carlo, scorable_lemmas, score,
    sweep_csv_rows, to_csv, window_sweep, CsvRow, EvalError, Population, ScoreOptions, SenseFrequencyTable,
};
use crate::taxonomy::{Taxonomy, TaxonomyError};
use crate::wsd::{disambiguate_document, WindowConfig, WsdError};

#[derive(Debug, Parser)]
#[command(name = "cdwsd", version, about = "Noun sense disambiguation by Conceptual Density")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate a taxonomy, print its size and height profile.
    Check { taxonomy: PathBuf },
    /// Tag every taxonomy-known noun of the input with its sense.
    Disambiguate {
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Score the engine (and optionally baselines) against a gold document.
    Evaluate {
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        scoring: ScoringArgs,
        /// Add random (analytic and sampled) and, with --train, most-frequent-sense rows.
        #[arg(long)]
        baselines: bool,
        /// Gold documents supplying sense frequencies for the most-frequent baseline.
        #[arg(long, num_args = 1..)]
        train: Vec<PathBuf>,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Score the engine at several window sizes.
    Sweep {
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        scoring: ScoringArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [5, 10, 15, 20, 25, 30])]
        sizes: Vec<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[arg(long)]
    pub taxonomy: PathBuf,
    /// Nouns per window, target included.
    #[arg(long, default_value_t = WindowConfig::DEFAULT_WINDOW)]
    pub window: usize,
    #[arg(long, default_value_t = DensityParams::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    /// Skip unknown tags in gold files instead of rejecting them.
    #[arg(long)]
    pub permissive: bool,
}

#[derive(Debug, Args)]
pub struct ScoringArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, value_enum, default_value_t = PopulationArg::Both)]
    pub population: PopulationArg,
    /// Fail on gold keys naming no known sense instead of excluding them.
    #[arg(long)]
    pub strict_gold: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Semcor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PopulationArg {
    Both,
    Polysemous,
    Overall,
}

impl PopulationArg {
    fn populations(self) -> Vec<Population> {
        match self {
            PopulationArg::Both => Population::ALL.to_vec(),
            PopulationArg::Polysemous => vec![Population::PolysemousOnly],
            PopulationArg::Overall => vec![Population::Overall],
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<TaxonomyError> for CliError {
    fn from(e: TaxonomyError) -> Self {
        match e {
            TaxonomyError::Stats(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(format!("taxonomy: {e}")),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<DensityError> for CliError {
    fn from(e: DensityError) -> Self {
        match e {
            DensityError::BadAlpha(_) | DensityError::BadBeta(_) => CliError::Usage(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<WsdError> for CliError {
    fn from(e: WsdError) -> Self {
        match e {
            WsdError::EmptyWindow => CliError::Usage(e.to_string()),
            WsdError::UnknownLemma(_) => CliError::Input(e.to_string()),
            WsdError::Density(d) => d.into(),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Wsd(w) => w.into(),
            EvalError::NoSizes | EvalError::NoRuns => CliError::Usage(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| io_error(path, e))
}

fn load(path: &Path) -> Result<Taxonomy, CliError> {
    Ok(Taxonomy::from_reader(open(path)?)?)
}

fn load_gold(path: &Path, permissive: bool) -> Result<Document, CliError> {
    let parser = SemcorParser::new()
        .permissive(permissive)
        .source_id(path.display().to_string());
    parser
        .parse(open(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn window_config(engine: &EngineArgs) -> Result<WindowConfig, CliError> {
    let params = DensityParams::new(engine.alpha, engine.beta)?;
    Ok(WindowConfig::new(engine.window, params)?)
}

fn emit(output: Option<&Path>, stdout: &mut dyn Write, data: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, data).map_err(|e| io_error(path, e)),
        None => stdout
            .write_all(data.as_bytes())
            .map_err(|e| CliError::Input(format!("stdout: {e}"))),
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    return 0;
                }
                _ => 1,
            };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

pub fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Check { taxonomy } => cmd_check(&taxonomy, stdout, stderr),
        Command::Disambiguate {
            engine,
            input,
            format,
            output,
        } => {
            let data = cmd_disambiguate(&engine, &input, format, stderr)?;
            emit(output.as_deref(), stdout, &data)
        }
        Command::Evaluate {
            engine,
            scoring,
            baselines,
            train,
            runs,
            seed,
            output,
        } => {
            let opts = EvaluateOptions {
                baselines,
                train,
                runs,
                seed,
            };
            let data = cmd_evaluate(&engine, &scoring, &opts, stderr)?;
            emit(output.as_deref(), stdout, &data)
        }
        Command::Sweep {
            engine,
            scoring,
            sizes,
            output,
        } => {
            let data = cmd_sweep(&engine, &scoring, &sizes)?;
            emit(output.as_deref(), stdout, &data)
        }
    }
}

pub fn cmd_check(path: &Path, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let t = load(path)?;
    let mut out = format!(
        "{} synsets, {} words, {} lemmas with senses, {} roots, max height {}\n",
        t.len(),
        t.word_count(),
        t.lemma_count(),
        t.roots().count(),
        t.max_height()
    );
    for (h, n) in t.height_histogram() {
        out.push_str(&format!("height {h}: {n}\n"));
    }
    emit(None, stdout, &out)?;
    for w in t.warnings() {
        let _ = writeln!(stderr, "warning: {w}");
    }
    Ok(())
}

pub fn cmd_disambiguate(
    engine: &EngineArgs,
    input: &Path,
    format: Format,
    stderr: &mut dyn Write,
) -> Result<String, CliError> {
    let cfg = window_config(engine)?;
    let t = load(&engine.taxonomy)?;
    let (positions, lemmas, seen, skipped): (Vec<usize>, Vec<String>, usize, usize) = match format {
        Format::Plain => {
            let words = parse_plain(open(input)?)?;
            let seen = words.len();
            let (known, unknown): (Vec<_>, Vec<_>) =
                words.into_iter().enumerate().partition(|(_, w)| t.contains_lemma(w));
            let (positions, lemmas) = known.into_iter().unzip();
            (positions, lemmas, seen, unknown.len())
        }
        Format::Semcor => {
            let doc = load_gold(input, engine.permissive)?;
            let (nouns, report) = extract_nouns(&doc, &t);
            let (positions, lemmas) = nouns.into_iter().map(|n| (n.position, n.lemma)).unzip();
            (positions, lemmas, report.nouns, report.not_in_taxonomy)
        }
    };
    let _ = writeln!(
        stderr,
        "kept {} of {} nouns, skipped {} unknown to the taxonomy",
        lemmas.len(),
        seen,
        skipped
    );
    let outcomes = disambiguate_document(&t, &lemmas, &cfg)?;
    let mut out = String::new();
    for (mut o, pos) in outcomes.into_iter().zip(positions) {
        o.position = pos;
        out.push_str(&o.to_tsv_line(&t));
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct EvaluateOptions {
    pub baselines: bool,
    pub train: Vec<PathBuf>,
    pub runs: usize,
    pub seed: u64,
}

pub fn cmd_evaluate(
    engine: &EngineArgs,
    scoring: &ScoringArgs,
    opts: &EvaluateOptions,
    stderr: &mut dyn Write,
) -> Result<String, CliError> {
    let cfg = window_config(engine)?;
    let t = load(&engine.taxonomy)?;
    let gold = load_gold(&scoring.gold, engine.permissive)?;
    let score_opts = ScoreOptions {
        strict_gold: scoring.strict_gold,
    };
    let populations = scoring.population.populations();
    let (nouns, _) = extract_nouns(&gold, &t);
    let lemmas: Vec<&str> = nouns.iter().map(|n| n.lemma.as_str()).collect();
    let outcomes = disambiguate_document(&t, &lemmas, &cfg)?;

    let mut rows = Vec::new();
    for &p in &populations {
        let r = score(&outcomes, &gold, &t, p, score_opts)?;
        if r.excluded > 0 {
            let _ = writeln!(
                stderr,
                "{p}: excluded {} gold noun(s) with unknown sense keys",
                r.excluded
            );
        }
        rows.push(CsvRow::from_report(p.as_str(), cfg.window_size, &r));
    }

    if opts.baselines {
        let analytic = random_baseline_analytic(&scorable_lemmas(&gold, &t), &t);
        for &p in &populations {
            rows.push(CsvRow::full_coverage(
                format!("random-analytic:{p}"),
                0,
                analytic.total(p),
                analytic.precision(p),
            ));
        }
        let mc = random_baseline_monte_carlo(&gold, &t, opts.runs, opts.seed)?;
        for &p in &populations {
            let m = mc.precision(p);
            let _ = writeln!(
                stderr,
                "random-mc:{p}: precision {:.4} +/- {:.4} over {} runs (seed {})",
                m.mean, m.stddev, mc.runs, mc.seed
            );
            rows.push(CsvRow::full_coverage(format!("random-mc:{p}"), 0, mc.total(p), m.mean));
        }
        if opts.train.is_empty() {
            let _ = writeln!(
                stderr,
                "no --train documents given, skipping the most-frequent-sense baseline"
            );
        } else {
            let docs = opts
                .train
                .iter()
                .map(|p| load_gold(p, engine.permissive))
                .collect::<Result<Vec<_>, _>>()?;
            let freqs = SenseFrequencyTable::from_documents(&docs, &t);
            let mfs = most_frequent_baseline(&gold, &t, &freqs);
            for &p in &populations {
                let r = score(&mfs, &gold, &t, p, score_opts)?;
                rows.push(CsvRow::from_report(format!("mfs:{p}"), 0, &r));
            }
        }
    }
    Ok(to_csv(&rows))
}

pub fn cmd_sweep(engine: &EngineArgs, scoring: &ScoringArgs, sizes: &[usize]) -> Result<String, CliError> {
    let params = DensityParams::new(engine.alpha, engine.beta)?;
    let sizes = eval::normalize_sizes(sizes)?;
    let t = load(&engine.taxonomy)?;
    let gold = load_gold(&scoring.gold, engine.permissive)?;
    let opts = ScoreOptions {
        strict_gold: scoring.strict_gold,
    };
    let rows = window_sweep(&gold, &t, &sizes, &params, opts)?;
    Ok(to_csv(&sweep_csv_rows(&rows, &scoring.population.populations())))
}
