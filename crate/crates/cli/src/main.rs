//! `numrad`: chain reports, fuzz campaigns and boundary export from the command line.
//!
//! Exit codes: 0 on success, 1 when a bound is violated, 2 on bad input.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use numrad::bounds::{verify_chain, ChainConfig, ChainReport, Side, BOUND_REGISTRY};
use numrad::campaign::{run_fuzz, FuzzConfig};
use numrad::genlab::{generate, GenKind, GenSpec};
use numrad::numrange::range_boundary;
use numrad::{ComplexMatrix, Error};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(
    name = "numrad",
    version,
    about = "Numerical radius bounds: reports, fuzz campaigns and boundary export"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every bound of the chain against v(a) for one matrix.
    Report(ReportArgs),
    /// Run generated matrices through the bound catalogue and summarize.
    Fuzz(FuzzArgs),
    /// Export the support function and boundary points of the numerical range as CSV.
    Boundary(BoundaryArgs),
    /// List the inequality ids accepted by --filter.
    ListInequalities {
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct Source {
    /// Matrix JSON file: {"re": [[..]], "im": [[..]]}.
    #[arg(long, conflicts_with = "gen")]
    matrix: Option<PathBuf>,
    /// Generator spec, inline JSON or a path to a JSON file.
    #[arg(long)]
    gen: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated inequality ids, or `all`.
    #[arg(long, value_delimiter = ',')]
    filter: Option<Vec<String>>,
    /// Write the JSON report here; the table then goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write one CSV row per bound.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON file with defaults for the flags above; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct FuzzArgs {
    /// Trials per generator kind.
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated dimensions, cycled over trials.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated inequality ids, or `all`.
    #[arg(long, value_delimiter = ',')]
    filter: Option<Vec<String>>,
    /// Comma-separated generator kinds.
    #[arg(long, value_delimiter = ',')]
    kinds: Option<Vec<String>>,
    /// Skip the bounds that combine several elements.
    #[arg(long)]
    chain_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with defaults for the flags above; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BoundaryArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 360)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Settings a `--config` file may carry.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    trials: Option<usize>,
    dims: Option<Vec<usize>>,
    resolution: Option<usize>,
    tol: Option<f64>,
    seed: Option<u64>,
    filter: Option<Filter>,
    kinds: Option<Vec<String>>,
    composites: Option<bool>,
    out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Filter {
    Word(String),
    Ids(Vec<String>),
}

impl Filter {
    fn into_ids(self) -> Option<Vec<String>> {
        match self {
            Filter::Word(w) if w == "all" => None,
            Filter::Word(w) => Some(vec![w]),
            Filter::Ids(ids) => Some(ids),
        }
    }
}

enum Failure {
    Violations,
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn input_err(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text)
        .map_err(|e| input_err(format!("cannot write {}: {e}", path.display())))
}

fn load_config(path: &Option<PathBuf>) -> CliResult<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => serde_json::from_str(&read_text(p)?)
            .map_err(|e| input_err(format!("bad config {}: {e}", p.display()))),
    }
}

/// Either a literal matrix or the generator spec it came from.
#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum SourceRecord {
    Matrix(PathBuf),
    Gen(GenSpec),
}

fn load_source(src: &Source) -> CliResult<(ComplexMatrix, SourceRecord)> {
    match (&src.matrix, &src.gen) {
        (Some(path), _) => {
            let m: ComplexMatrix = serde_json::from_str(&read_text(path)?)
                .map_err(|e| input_err(format!("bad matrix {}: {e}", path.display())))?;
            Ok((m, SourceRecord::Matrix(path.clone())))
        }
        (None, Some(gen)) => {
            let text = if gen.trim_start().starts_with('{') {
                gen.clone()
            } else {
                read_text(Path::new(gen))?
            };
            let spec: GenSpec = serde_json::from_str(&text)
                .map_err(|e| input_err(format!("bad generator spec: {e}")))?;
            Ok((generate(&spec)?, SourceRecord::Gen(spec)))
        }
        (None, None) => Err(input_err("one of --matrix or --gen is required")),
    }
}

fn parse_kinds(names: &[String]) -> CliResult<Vec<GenKind>> {
    names
        .iter()
        .map(|n| {
            GenKind::from_name(n.trim())
                .ok_or_else(|| input_err(format!("unknown generator kind `{n}`")))
        })
        .collect()
}

fn normalize_filter(ids: Option<Vec<String>>) -> Option<Vec<String>> {
    ids.filter(|ids| !ids.iter().any(|id| id == "all"))
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    schema: u32,
    source: SourceRecord,
    passed: bool,
    report: &'a ChainReport,
}

fn render_table(report: &ChainReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "v(a) = {:.12}   |a| = {:.12}", report.v, report.norm);
    let _ = writeln!(
        out,
        "{:<20} {:<18} {:>5} {:>5} {:>20} {:>20} {:>12}  flag",
        "id", "params", "side", "pow", "bound", "v^pow", "slack"
    );
    for c in report.checks() {
        let flag = if c.violation {
            "VIOLATION"
        } else if c.equality {
            "equality"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "{:<20} {:<18} {:>5} {:>5} {:>20.12} {:>20.12} {:>12.3e}  {}",
            c.bound.id,
            c.bound.params.label(),
            match c.bound.side {
                Side::Lower => "lower",
                Side::Upper => "upper",
            },
            c.bound.power,
            c.bound.value,
            c.target,
            c.slack,
            flag
        );
    }
    let _ = writeln!(
        out,
        "{} bounds, {} equalities, {} violations",
        report.lowers.len() + report.uppers.len(),
        report.equalities.len(),
        report.violations.len()
    );
    out
}

fn cmd_report(args: ReportArgs) -> CliResult<()> {
    let file = load_config(&args.config)?;
    let defaults = ChainConfig::default();
    let config = ChainConfig {
        tol: args.tol.or(file.tol).unwrap_or(defaults.tol),
        resolution: args
            .resolution
            .or(file.resolution)
            .unwrap_or(defaults.resolution),
        filter: normalize_filter(
            args.filter
                .or_else(|| file.filter.and_then(Filter::into_ids)),
        ),
        ..defaults
    };
    config.validate()?;
    let (a, source) = load_source(&args.source)?;
    let report = verify_chain(&a, &config)?;
    let doc = ReportDoc {
        schema: SCHEMA,
        source,
        passed: report.passed(),
        report: &report,
    };
    let json = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
    let table = render_table(&report);
    match args.out.or(file.out) {
        Some(path) => {
            write_text(&path, &json)?;
            print!("{table}");
        }
        None => {
            print!("{json}");
            eprint!("{table}");
        }
    }
    if let Some(path) = args.csv {
        write_text(&path, &report.to_csv())?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Violations)
    }
}

fn cmd_fuzz(args: FuzzArgs) -> CliResult<()> {
    let file = load_config(&args.config)?;
    let defaults = FuzzConfig::default();
    let kinds = match args.kinds.or(file.kinds) {
        Some(names) => parse_kinds(&names)?,
        None => defaults.kinds.clone(),
    };
    let config = FuzzConfig {
        trials: args.trials.or(file.trials).unwrap_or(defaults.trials),
        dims: args.dims.or(file.dims).unwrap_or(defaults.dims.clone()),
        resolution: args
            .resolution
            .or(file.resolution)
            .unwrap_or(defaults.resolution),
        tol: args.tol.or(file.tol).unwrap_or(defaults.tol),
        seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
        filter: normalize_filter(
            args.filter
                .or_else(|| file.filter.and_then(Filter::into_ids)),
        ),
        kinds,
        composites: if args.chain_only {
            false
        } else {
            file.composites.unwrap_or(defaults.composites)
        },
    };
    let summary = run_fuzz(&config)?;
    let json = summary.to_json() + "\n";
    match args.out.or(file.out) {
        Some(path) => write_text(&path, &json)?,
        None => print!("{json}"),
    }
    eprintln!(
        "{} trials, {} inequalities, {} violations",
        summary.trials_total,
        summary.inequalities.len(),
        summary.violations.len()
    );
    if summary.passed() {
        return Ok(());
    }
    for v in &summary.violations {
        eprintln!(
            "violation {} [{}] on {}: slack {:e}; reproducer {}",
            v.id,
            v.params.label(),
            v.expression,
            v.slack,
            serde_json::to_string(&v.reproducer).expect("specs serialize")
        );
    }
    Err(Failure::Violations)
}

fn cmd_boundary(args: BoundaryArgs) -> CliResult<()> {
    let (a, _) = load_source(&args.source)?;
    let boundary = range_boundary(&a, args.points)?;
    let csv = boundary.to_csv();
    match args.out {
        Some(path) => write_text(&path, &csv)?,
        None => print!("{csv}"),
    }
    if !boundary.degenerate.is_empty() {
        eprintln!(
            "{} directions with a repeated top eigenvalue; their boundary points are one choice among a segment",
            boundary.degenerate.len()
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct ListEntry {
    id: &'static str,
    side: Side,
    in_chain: bool,
    statement: &'static str,
}

fn cmd_list(json: bool) {
    if json {
        let entries: Vec<ListEntry> = BOUND_REGISTRY
            .iter()
            .map(|b| ListEntry {
                id: b.id,
                side: b.side,
                in_chain: b.in_chain,
                statement: b.statement,
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&entries).expect("registry serializes")
        );
        return;
    }
    for b in BOUND_REGISTRY {
        let scope = if b.in_chain { "chain" } else { "composite" };
        println!("{:<20} {:<9} {}", b.id, scope, b.statement);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Report(args) => cmd_report(args),
        Command::Fuzz(args) => cmd_fuzz(args),
        Command::Boundary(args) => cmd_boundary(args),
        Command::ListInequalities { json } => {
            cmd_list(json);
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violations) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
