use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use stream_logic::algebra::fmt_rational;
use stream_logic::circuits::{encode_logic, equiv, parse_circuit, transfer, Circuit};
use stream_logic::expand::bisim_formula;
use stream_logic::logic::{parse, Formula};
use stream_logic::qe::{decide_with, eliminate_with, QeOptions};
use stream_logic::streams::{catalan, parse_stream, TruncSeries};
use stream_logic::Error;

/// Decision procedure for first-order stream logic.
#[derive(Parser)]
#[command(name = "streamlogic", version)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Ceiling on polynomials generated during elimination.
    #[arg(long, global = true, default_value_t = QeOptions::default().budget)]
    budget: u64,
    /// Log expansion rules and elimination steps to stderr.
    #[arg(long, global = true)]
    trace: bool,
    /// Skip linear presolving.
    #[arg(long, global = true)]
    no_presolve: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide a sentence: VALID (exit 0) or INVALID (exit 1).
    Decide { path: PathBuf },
    /// Print a quantifier-free equivalent.
    Eliminate { path: PathBuf },
    /// Print leading coefficients of a stream expression.
    Coeffs {
        expr: String,
        #[arg(long, default_value_t = 8)]
        count: usize,
    },
    /// Analyse a stream circuit.
    Circuit {
        path: PathBuf,
        /// Print the transfer matrix (the default).
        #[arg(long)]
        transfer: bool,
        /// Compare transfer matrices with another circuit.
        #[arg(long, value_name = "OTHER", conflicts_with_all = ["transfer", "verify"])]
        equiv: Option<PathBuf>,
        /// Decide a claim over the circuit's streams.
        #[arg(long, value_name = "CLAIM", conflicts_with = "transfer")]
        verify: Option<PathBuf>,
    },
    /// Decide whether a relation between x and y is a bisimulation.
    Bisim { path: PathBuf },
}

enum Failure {
    Io(PathBuf, std::io::Error),
    Logic(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Logic(e)
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = QeOptions {
        budget: cli.opts.budget,
        presolve: !cli.opts.no_presolve,
        trace: cli.opts.trace,
        ..QeOptions::default()
    };
    match run(cli.cmd, &opts) {
        Ok(code) => code,
        Err(Failure::Io(p, e)) => {
            println!("IO_ERROR");
            eprintln!("error: {}: {e}", p.display());
            ExitCode::from(2)
        }
        Err(Failure::Logic(e)) => {
            println!("{}", e.code());
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read(p: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(p).map_err(|e| Failure::Io(p.to_path_buf(), e))
}

fn run(cmd: Cmd, opts: &QeOptions) -> Outcome {
    match cmd {
        Cmd::Decide { path } => verdict(&parse(&read(&path)?)?, opts),
        Cmd::Eliminate { path } => {
            let f = parse(&read(&path)?)?;
            let (g, stats) = eliminate_with(&f, opts)?;
            println!("{g}");
            eprintln!("polys: {}, splits: {}", stats.polys_generated, stats.case_splits);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Coeffs { expr, count } => {
            let s = coefficients(&expr, count)?;
            let line: Vec<String> = s.coeffs().iter().map(fmt_rational).collect();
            println!("{}", line.join(" "));
            if s.start() != 0 {
                eprintln!("first index: {}", s.start());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Circuit {
            path,
            transfer: _,
            equiv: other,
            verify,
        } => {
            let c = load_circuit(&path)?;
            if let Some(o) = other {
                let d = load_circuit(&o)?;
                println!("{}", equiv(&c, &d)?);
                Ok(ExitCode::SUCCESS)
            } else if let Some(claim) = verify {
                let claim = parse(&read(&claim)?)?;
                verdict(&encode_logic(&c, &claim)?, opts)
            } else {
                println!("{}", transfer(&c)?);
                Ok(ExitCode::SUCCESS)
            }
        }
        Cmd::Bisim { path } => {
            let b = parse(&read(&path)?)?;
            verdict(&bisim_formula(&b)?, opts)
        }
    }
}

fn load_circuit(p: &Path) -> Result<Circuit, Failure> {
    Ok(parse_circuit(&read(p)?)?)
}

fn verdict(f: &Formula, opts: &QeOptions) -> Outcome {
    let start = Instant::now();
    let d = decide_with(f, opts)?;
    for line in &d.trace {
        eprintln!("trace: {line}");
    }
    if !d.report.applied_rules.is_empty() {
        eprintln!("rules: {}", d.report.applied_rules.join(", "));
    }
    if !d.report.introduced_vars.is_empty() {
        eprintln!("introduced: {}", d.report.introduced_vars.join(", "));
    }
    eprintln!(
        "polys: {}, splits: {}, presolved: {}, elapsed: {:.3}s",
        d.stats.polys_generated,
        d.stats.case_splits,
        d.stats.presolved_vars,
        start.elapsed().as_secs_f64()
    );
    if d.valid {
        println!("VALID");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("INVALID");
        Ok(ExitCode::from(1))
    }
}

/// `catalan`, `sqrt(<expr>)` or a rational expression in `X`; printed from
/// index `min(0, v)`.
fn coefficients(expr: &str, n: usize) -> Result<TruncSeries, Error> {
    let e = expr.trim();
    if e == "catalan" {
        return Ok(catalan(n));
    }
    if let Some(inner) = e.strip_prefix("sqrt(").and_then(|s| s.strip_suffix(')')) {
        let root = parse_stream(inner)?.coeffs(n).sqrt_prefix(n)?;
        return Ok(align(root, n));
    }
    Ok(align(parse_stream(e)?.coeffs(n), n))
}

fn align(s: TruncSeries, n: usize) -> TruncSeries {
    if s.start() > 0 {
        s.rebase(0).truncate(n)
    } else {
        s
    }
}
