//! Command-line interface: `simulate`, `analyze`, `optimize`, `export`, `serve`.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytics::{self, parse_grid};
use crate::archive;
use crate::belief::{estimate_p, trace_jsonl, BeliefState};
use crate::game::{play_game, GuestStrategy, ShowmasterStrategy};
use crate::oracle;
use crate::probability::{parse_rational, Probability};
use crate::session::SessionStore;
use crate::simulation::{self, format_reports, replication_seed, SweepCell, Z_THRESHOLD};

#[derive(Debug, Parser)]
#[command(name = "monty-lab", version, about = "Monty Hall games against fair, evil, moody and mind-reading hosts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo batch (or grid of batches) compared with exact values.
    Simulate(SimulateArgs),
    /// Exact payoffs and posteriors over a grid of p and q.
    Analyze(AnalyzeArgs),
    /// Indifference point of the host (same as `analyze --equilibrium`).
    Optimize,
    /// Write transcripts, oracle atom tables, belief traces or p estimates.
    Export(ExportArgs),
    /// Run the HTTP session service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HostKind {
    Fair,
    Evil,
    Moody,
    MindReader,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GuestKind {
    Stay,
    Switch,
    Mixed,
    Actor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct StrategyArgs {
    #[arg(long, value_enum, default_value = "fair")]
    pub host: HostKind,
    /// Evil frequency of a moody host; a value, list `a,b` or range `a..b`.
    #[arg(long, default_value = "1/2")]
    pub p: String,
    /// Reading accuracy of a mind-reading host.
    #[arg(long, default_value = "1")]
    pub accuracy: String,
    #[arg(long, value_enum, default_value = "stay")]
    pub guest: GuestKind,
    /// Stay probability of a mixed guest; a value, list or range.
    #[arg(long, default_value = "1/2")]
    pub q: String,
    /// Chance a mind reader sees through an acting guest.
    #[arg(long, default_value = "0")]
    pub detection: String,
    /// Step for range grids.
    #[arg(long)]
    pub step: Option<String>,
}

impl StrategyArgs {
    fn cells(&self) -> Result<Vec<SweepCell>, String> {
        let err = |e: crate::Error| e.to_string();
        let ps = if self.host == HostKind::Moody {
            parse_grid(&self.p, self.step.as_deref()).map_err(err)?
        } else {
            vec![Probability::zero()]
        };
        let qs = if self.guest == GuestKind::Mixed {
            parse_grid(&self.q, self.step.as_deref()).map_err(err)?
        } else {
            vec![Probability::zero()]
        };
        let accuracy: Probability = self.accuracy.parse().map_err(err)?;
        let detection: Probability = self.detection.parse().map_err(err)?;
        let mut cells = Vec::new();
        for p in &ps {
            let showmaster = match self.host {
                HostKind::Fair => ShowmasterStrategy::Fair,
                HostKind::Evil => ShowmasterStrategy::Evil,
                HostKind::Moody => ShowmasterStrategy::Moody { p: p.clone() },
                HostKind::MindReader => ShowmasterStrategy::MindReader { accuracy: accuracy.clone() },
            };
            for q in &qs {
                let guest = match self.guest {
                    GuestKind::Stay => GuestStrategy::Stay,
                    GuestKind::Switch => GuestStrategy::Switch,
                    GuestKind::Mixed => GuestStrategy::Mixed { q: q.clone() },
                    GuestKind::Actor => GuestStrategy::Actor { detection_risk: detection.clone() },
                };
                cells.push(SweepCell { showmaster: showmaster.clone(), guest });
            }
        }
        Ok(cells)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub strategies: StrategyArgs,
    /// Replications per cell.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fail when any |z| reaches this many standard errors.
    #[arg(long, default_value_t = Z_THRESHOLD)]
    pub z_max: f64,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Evil frequencies: a value, list `a,b` or range `a..b`.
    #[arg(long, default_value = "1/2")]
    pub p: String,
    /// Stay fractions: a value, list or range.
    #[arg(long, default_value = "1/2")]
    pub q: String,
    #[arg(long)]
    pub step: Option<String>,
    /// Shift every p by this margin (clamped to [0, 1]).
    #[arg(long, allow_hyphen_values = true)]
    pub offset: Option<String>,
    /// Print posteriors after each host action instead of payoffs.
    #[arg(long)]
    pub posteriors: bool,
    /// Print the indifference point found by bisection.
    #[arg(long)]
    pub equilibrium: bool,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Accepts `step <value>` after the flags.
    #[arg(hide = true)]
    pub rest: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportKind {
    /// Game transcripts as JSONL.
    Transcripts,
    /// The oracle's outcome tree as an aligned table.
    Atoms,
    /// Belief trace over the host actions of an archive, as JSONL.
    BeliefTrace,
    /// Estimate of the host's evil frequency from an archive.
    Estimate,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, value_enum, default_value = "transcripts")]
    pub what: ExportKind,
    #[command(flatten)]
    pub strategies: StrategyArgs,
    #[arg(long, default_value_t = 1_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Prior on evil for belief traces.
    #[arg(long, default_value = "1/2")]
    pub prior: String,
    /// JSONL archive to read (belief traces, estimates).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "MONTY_LAB_ADDR", default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    /// Append finished games to this JSONL archive.
    #[arg(long, env = "MONTY_LAB_ARCHIVE")]
    pub archive: Option<PathBuf>,
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Analyze(args) => analyze(args),
        Command::Optimize => equilibrium(Format::Table),
        Command::Export(args) => match export(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
        Command::Serve(args) => serve(args),
    }
}

fn simulate(args: SimulateArgs) -> ExitCode {
    let cells = match args.strategies.cells() {
        Ok(cells) => cells,
        Err(e) => return fail(e),
    };
    let reports = match simulation::sweep(&cells, args.n, args.seed) {
        Ok(reports) if cells.len() > 1 => reports,
        // A single cell runs directly on the master seed.
        Ok(_) => match simulation::run_batch(&cells[0].showmaster, &cells[0].guest, args.n, args.seed) {
            Ok(r) => vec![r],
            Err(e) => return fail(e),
        },
        Err(e) => return fail(e),
    };
    match args.format {
        Format::Table => print!("{}", format_reports(&reports)),
        Format::Json => {
            for r in &reports {
                println!("{}", r.to_json());
            }
        }
    }
    let violations = reports.iter().filter(|r| !r.within(args.z_max)).count();
    if violations > 0 {
        eprintln!("{violations} cell(s) with |z| >= {}", args.z_max);
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}

fn analyze(args: AnalyzeArgs) -> ExitCode {
    if args.equilibrium {
        return equilibrium(args.format);
    }
    let step = match args.rest.as_slice() {
        [] => args.step.clone(),
        [word, value] if word == "step" => Some(value.clone()),
        other => return fail(format!("unexpected arguments {other:?}")),
    };
    let ps = match parse_grid(&args.p, step.as_deref()) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let qs = match parse_grid(&args.q, step.as_deref()) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let offset = match args.offset.as_deref().map(parse_rational).transpose() {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    let ps: Vec<Probability> = match &offset {
        Some(o) => ps.iter().map(|p| analytics::offset_p(p, o)).collect(),
        None => ps,
    };
    if args.posteriors {
        print!("{}", posterior_report(&ps, args.format));
        return ExitCode::SUCCESS;
    }
    let rows = analytics::sweep(&ps, &qs, None);
    match args.format {
        Format::Table => print!("{}", analytics::format_table(&rows)),
        Format::Json => print!("{}", analytics::format_jsonl(&rows)),
    }
    ExitCode::SUCCESS
}

fn posterior_report(ps: &[Probability], format: Format) -> String {
    let mut out = String::new();
    if format == Format::Table {
        out.push_str(&format!(
            "{:<16} {:<22} {:<22} {:<22} {:<22} {}\n",
            "p", "posterior_evil", "posterior_fair", "posterior_car", "prob_other", "best_response"
        ));
    }
    for p in ps {
        let cols = [
            analytics::posterior_evil_given_other(p),
            analytics::posterior_fair_given_other(p),
            analytics::posterior_car_given_other(p),
            analytics::prob_other(p),
        ];
        let best = analytics::best_response(p);
        match format {
            Format::Table => {
                let cell = |v: &Probability| format!("{v} ({})", v.to_decimal_string());
                out.push_str(&format!(
                    "{:<16} {:<22} {:<22} {:<22} {:<22} {}\n",
                    p.to_string(),
                    cell(&cols[0]),
                    cell(&cols[1]),
                    cell(&cols[2]),
                    cell(&cols[3]),
                    best
                ));
            }
            Format::Json => {
                let row = serde_json::json!({
                    "p": p,
                    "posterior_evil": cols[0], "posterior_evil_decimal": cols[0].to_decimal_string(),
                    "posterior_fair": cols[1], "posterior_fair_decimal": cols[1].to_decimal_string(),
                    "posterior_car": cols[2], "posterior_car_decimal": cols[2].to_decimal_string(),
                    "prob_other": cols[3], "prob_other_decimal": cols[3].to_decimal_string(),
                    "posterior_evil_given_my": analytics::posterior_evil_given_my(),
                    "best_response": best,
                });
                out.push_str(&format!("{row}\n"));
            }
        }
    }
    out
}

fn equilibrium(format: Format) -> ExitCode {
    let search = analytics::search_indifference(analytics::BISECTION_STEPS);
    match format {
        Format::Table => {
            println!("indifference point  {} ({})", search.point, search.point.to_decimal_string());
            println!("bisection steps     {}", search.steps);
            println!("final bracket       [{}, {}]", search.lower, search.upper);
            println!("closed form         {}", analytics::indifference_closed_form());
            println!("confirmed           {}", search.confirmed);
        }
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "indifference_point": search.point,
                "decimal": search.point.to_decimal_string(),
                "steps": search.steps,
                "lower": search.lower,
                "upper": search.upper,
                "exact": search.exact,
                "confirmed": search.confirmed,
            })
        ),
    }
    if search.confirmed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn read_archive(path: &Option<PathBuf>) -> io::Result<Vec<crate::GameTranscript>> {
    let path = path.as_ref().ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "--input is required"))?;
    archive::read_jsonl(BufReader::new(File::open(path)?))
}

fn export(args: ExportArgs) -> io::Result<()> {
    let invalid = |e: crate::Error| io::Error::new(io::ErrorKind::InvalidInput, e.to_string());
    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match args.what {
        ExportKind::Transcripts | ExportKind::Atoms => {
            let cells = args.strategies.cells().map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
            for cell in &cells {
                if args.what == ExportKind::Atoms {
                    writeln!(out, "# showmaster {}  guest {}", cell.showmaster, cell.guest)?;
                    write!(out, "{}", oracle::atom_table(&oracle::enumerate(&cell.showmaster, &cell.guest)))?;
                } else {
                    for i in 0..args.n {
                        let t = play_game(&cell.showmaster, &cell.guest, replication_seed(args.seed, i));
                        writeln!(out, "{}", archive::to_json_line(&t))?;
                    }
                }
            }
        }
        ExportKind::BeliefTrace => {
            let prior: Probability = args.prior.parse().map_err(invalid)?;
            let transcripts = read_archive(&args.input)?;
            let state = BeliefState::new(prior).update_all(transcripts.iter().map(|t| t.host_action));
            write!(out, "{}", trace_jsonl(&state.trace()))?;
        }
        ExportKind::Estimate => {
            let transcripts = read_archive(&args.input)?;
            let estimate = estimate_p(&transcripts).map_err(invalid)?;
            writeln!(out, "{}", serde_json::to_string(&estimate).expect("estimate serializes"))?;
        }
    }
    out.flush()
}

fn serve(args: ServeArgs) -> ExitCode {
    let _ = tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .try_init();
    let store = match &args.archive {
        Some(path) => match SessionStore::with_archive(path) {
            Ok(store) => store,
            Err(e) => return fail(format!("cannot open archive {}: {e}", path.display())),
        },
        None => SessionStore::new(),
    };
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => return fail(e),
    };
    match runtime.block_on(crate::http::serve(args.addr, Arc::new(store))) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
