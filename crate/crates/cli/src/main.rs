use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use kdirac::report::{Check, Report};
use kdirac::suite::{SuiteConfig, Workbench, SUITES};
use kdirac::wpoly::{self, monomial_count, Params};
use kdirac::{restrict, Error, SliceFunction};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "kdirac",
    version,
    about = "Exact workbench for the parabolic k-Dirac operator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Number n (the Clifford space has dimension n + 1)
    #[arg(long, global = true, default_value_t = 2)]
    n: usize,

    /// Number k of Dirac components
    #[arg(long, global = true, default_value_t = 2)]
    k: usize,

    /// Largest weighted degree computed (default 5 for n = k = 2, else 4)
    #[arg(long, global = true)]
    max_degree: Option<usize>,

    /// Permutation of 1..n ordering the basis, e.g. "2,1,3"
    #[arg(long, global = true)]
    sigma: Option<String>,

    /// Seed for randomized sweeps
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for independent checks (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Write the report (or extension result) to this file
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report elapsed_ms as 0 so that reports are byte-identical across runs
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monogenic dimensions per degree against the closed formula
    Dims,
    /// Filtration characters and the Cartan test
    Cartan,
    /// Extend slice data to the unique monogenic spinor
    Extend {
        /// JSON list of terms
        #[arg(long)]
        input: PathBuf,
        /// Degree of the data (needed only for the zero polynomial)
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Run verification suites
    Verify {
        #[arg(value_enum)]
        which: Which,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    Clifford,
    Brackets,
    Ses,
    Spencer,
    LemmaDy,
    FlatCompat,
    Pullback,
    Uniqueness,
    All,
}

impl Which {
    fn suites(self) -> Vec<&'static str> {
        match self {
            Which::Clifford => vec!["clifford"],
            Which::Brackets => vec!["brackets"],
            Which::Ses => vec!["ses"],
            Which::Spencer => vec!["spencer"],
            Which::LemmaDy => vec!["lemma-dy"],
            Which::FlatCompat => vec!["flat-compat"],
            Which::Pullback => vec!["pullback"],
            Which::Uniqueness => vec!["uniqueness"],
            Which::All => SUITES.to_vec(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Which::All => "all",
            other => other.suites()[0],
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Invariant(_) => EXIT_INVARIANT,
        _ => EXIT_USAGE,
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("kdirac: {msg}");
    ExitCode::from(code)
}

/// Largest operator matrix (rows × cols) the run will build.
fn largest_cells(p: &Params, max_degree: usize) -> u128 {
    let dim_s = p.dim_s() as u128;
    (1..=max_degree + 1)
        .map(|d| p.k as u128 * monomial_count(p, d - 1) * dim_s * monomial_count(p, d) * dim_s)
        .max()
        .unwrap_or(0)
}

fn check_cell_budget(p: &Params, max_degree: usize) -> Result<(), String> {
    let Ok(raw) = std::env::var("KDIRAC_MAX_CELLS") else {
        return Ok(());
    };
    let limit: u128 = raw
        .trim()
        .parse()
        .map_err(|_| format!("KDIRAC_MAX_CELLS={raw:?} is not a number"))?;
    let need = largest_cells(p, max_degree);
    if need > limit {
        return Err(format!(
            "largest matrix needs {need} cells, over KDIRAC_MAX_CELLS={limit}"
        ));
    }
    Ok(())
}

fn emit(cli: &Cli, text: &str) -> Result<(), String> {
    match &cli.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            use std::io::Write;
            let sep = if text.ends_with('\n') { "" } else { "\n" };
            match write!(std::io::stdout().lock(), "{text}{sep}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(format!("cannot write to stdout: {e}"))
                }
                _ => Ok(()),
            }
        }
    }
}

fn run_report(
    cli: &Cli,
    bench: &Workbench,
    command: &str,
    checks: kdirac::Result<Vec<Check>>,
    start: Instant,
) -> ExitCode {
    let checks = match checks {
        Ok(c) => c,
        Err(e) => return fail(exit_code(&e), e),
    };
    let report = Report {
        params: serde_json::to_value(&bench.config).expect("config serializes"),
        command: command.to_string(),
        checks,
        elapsed_ms: if cli.no_timing {
            0
        } else {
            start.elapsed().as_millis() as u64
        },
    };
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Csv => match report.to_csv() {
            Ok(s) => s,
            Err(e) => return fail(EXIT_USAGE, e),
        },
    };
    if let Err(e) = emit(cli, &text) {
        return fail(EXIT_USAGE, e);
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn extend(cli: &Cli, bench: &Workbench, input: &PathBuf, degree: Option<usize>) -> ExitCode {
    let params = bench.params();
    let dim_s = bench.engine.dim_s();
    let text = match fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_USAGE, format!("cannot read {}: {e}", input.display())),
    };
    let poly = match wpoly::from_json(params, dim_s, &text) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let psi = match SliceFunction::new(poly) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let d = match (psi.degree(), degree) {
        (Some(d), Some(given)) if d != given => {
            return fail(
                EXIT_USAGE,
                format!("data has degree {d}, --degree says {given}"),
            );
        }
        (Some(d), _) | (None, Some(d)) => d,
        (None, None) => 0,
    };
    if let Err(e) = check_cell_budget(&params, d) {
        return fail(EXIT_USAGE, e);
    }
    let out = match bench.ivp.extend(&psi, d) {
        Ok(o) => o,
        Err(e) => return fail(exit_code(&e), e),
    };
    let residual: usize = match bench.engine.apply_d(&out) {
        Ok(parts) => parts.iter().map(|p| p.num_terms()).sum(),
        Err(e) => return fail(exit_code(&e), e),
    };
    let doc = json!({
        "params": {"n": params.n, "k": params.k},
        "degree": d,
        "terms": wpoly::to_terms(&out),
        "verification": {"D_residual": residual, "restriction_match": restrict(&out) == psi},
    });
    match emit(cli, &serde_json::to_string_pretty(&doc).expect("json")) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_USAGE, e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let params = match Params::new(cli.n, cli.k) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let max_degree = cli
        .max_degree
        .unwrap_or(if (cli.n, cli.k) == (2, 2) { 5 } else { 4 });
    let sigma = match &cli.sigma {
        Some(s) => match kdirac::Permutation::parse(s) {
            Ok(p) => p.images().to_vec(),
            Err(e) => return fail(EXIT_USAGE, e),
        },
        None => Vec::new(),
    };
    let config = SuiteConfig {
        n: cli.n,
        k: cli.k,
        max_degree,
        sigma,
        seed: cli.seed,
    };
    let bench = match Workbench::new(config) {
        Ok(b) => b,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    if let Command::Extend { input, degree } = &cli.command {
        return extend(&cli, &bench, input, *degree);
    }
    if let Err(e) = check_cell_budget(&params, max_degree) {
        return fail(EXIT_USAGE, e);
    }
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
    {
        Ok(p) => p,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    match &cli.command {
        Command::Dims => run_report(&cli, &bench, "dims", bench.dims(), start),
        Command::Cartan => run_report(&cli, &bench, "cartan", bench.cartan(), start),
        Command::Verify { which } => {
            let suites = which.suites();
            let results: Vec<kdirac::Result<Vec<Check>>> =
                pool.install(|| suites.par_iter().map(|s| bench.run(s)).collect());
            let checks = results
                .into_iter()
                .collect::<kdirac::Result<Vec<_>>>()
                .map(|v| v.concat());
            run_report(
                &cli,
                &bench,
                &format!("verify {}", which.name()),
                checks,
                start,
            )
        }
        Command::Extend { .. } => unreachable!("handled above"),
    }
}
