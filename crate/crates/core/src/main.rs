use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use cltlb::encoder::{assemble, EncodeOptions};
use cltlb::formula::{parse, to_pnf, Formula};
use cltlb::oracle::{self, EnumConfig, Enumeration};
use cltlb::smt::{emit_smtlib, solve_script, SolverConfig, Status};
use cltlb::subst::{check_substitutable, replay, Outcome, ServiceModel, Strategy, SubstOptions};
use cltlb::trace::Trace;

const EXIT_USAGE: u8 = 3;
const EXIT_ERROR: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "cltlb", version, about = "Bounded satisfiability for temporal logic with counters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a formula for a model of bounded length.
    Sat(SatArgs),
    /// Check whether an actual service can stand in for an expected one.
    Subst(SubstArgs),
    /// Evaluate a formula on a trace, or search small models exhaustively.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct SolverArgs {
    /// Solver command line; the script is fed on stdin.
    #[arg(long, env = "CLTLB_SOLVER", default_value = "z3")]
    solver: String,
    /// SMT-LIB2 logic name.
    #[arg(long, env = "CLTLB_LOGIC", default_value = cltlb::smt::DEFAULT_LOGIC)]
    logic: String,
    /// Per-check timeout in seconds.
    #[arg(long, env = "CLTLB_TIMEOUT", default_value_t = 30.0)]
    timeout: f64,
    /// Print solver output to stderr.
    #[arg(short, long)]
    verbose: bool,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default().with_command(&self.solver);
        cfg.logic = self.logic.clone();
        cfg.timeout = Duration::from_secs_f64(self.timeout.max(0.0));
        cfg
    }
}

#[derive(Args, Debug)]
struct SatArgs {
    file: PathBuf,
    /// Number of instants after the first.
    #[arg(short = 'k', long = "bound", value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    /// Pin a variable before instant 0, as VAR@INSTANT=VALUE (e.g. x@-1=4).
    #[arg(long = "init", value_parser = parse_init)]
    init: Vec<(String, i64, i64)>,
    /// Also write the SMT-LIB2 script here.
    #[arg(long)]
    emit_smt: Option<PathBuf>,
    /// Write the witness trace as JSON here.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Print a JSON report instead of text.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct SubstArgs {
    model: PathBuf,
    /// Expected operations, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    sequence: Vec<String>,
    #[arg(long, default_value = "store")]
    strategy: Strategy,
    /// Defaults to the number of states of both services plus repetitions.
    #[arg(short = 'k', long = "bound", value_parser = clap::value_parser!(u32).range(1..))]
    k: Option<u32>,
    /// Accept the first adaptation found instead of the shortest one.
    #[arg(long)]
    first: bool,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["trace", "enumerate"]))]
struct OracleArgs {
    file: PathBuf,
    /// Trace in JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Instant to evaluate at.
    #[arg(long, default_value_t = 0, requires = "trace")]
    at: usize,
    /// Search all traces with integer values in [LO, HI].
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, requires = "k")]
    enumerate: Option<Vec<i64>>,
    #[arg(short = 'k', long = "bound", value_parser = clap::value_parser!(u32).range(1..))]
    k: Option<u32>,
    /// Largest number of trace cells to enumerate.
    #[arg(long, default_value_t = 64)]
    budget: usize,
    #[arg(long)]
    json: bool,
}

fn parse_init(s: &str) -> Result<(String, i64, i64), String> {
    let err = || format!("`{s}` is not VAR@INSTANT=VALUE");
    let (var, rest) = s.split_once('@').ok_or_else(err)?;
    let (at, value) = rest.split_once('=').ok_or_else(err)?;
    let at: i64 = at.trim().parse().map_err(|_| err())?;
    let value: i64 = value.trim().parse().map_err(|_| err())?;
    if at >= 0 {
        return Err(format!("`{s}`: initial values belong to negative instants"));
    }
    Ok((var.trim().to_string(), at, value))
}

/// Failure with a message for stderr and an exit status.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure(format!("cannot write {}: {e}", path.display())))
}

fn load_formula(path: &Path) -> Result<Formula, Failure> {
    let text = read(path)?;
    let f = parse(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    Ok(to_pnf(&f))
}

fn status_code(status: Status) -> u8 {
    match status {
        Status::Sat => 0,
        Status::Unsat => 1,
        Status::Unknown => 2,
        Status::SolverError => EXIT_ERROR,
    }
}

fn cmd_sat(args: &SatArgs) -> Result<u8, Failure> {
    let f = load_formula(&args.file)?;
    let k = args.k as usize;
    let mut opts = EncodeOptions::default();
    let mut init: BTreeMap<String, BTreeMap<i64, i64>> = BTreeMap::new();
    for (var, at, value) in &args.init {
        init.entry(var.clone()).or_default().insert(*at, *value);
    }
    opts.init = init;
    let (cs, meta) = assemble(&f, k, &opts)?;
    let cfg = args.solver.config();
    let script = emit_smtlib(&cs, &cfg.logic);
    if let Some(path) = &args.emit_smt {
        write(path, &script)?;
    }
    let verdict = solve_script(&script, &meta, &cfg);
    if args.solver.verbose || verdict.status == Status::SolverError {
        eprintln!("{}", verdict.diagnostics);
    }
    if let (Some(path), Some(trace)) = (&args.trace_out, &verdict.trace) {
        write(path, &serde_json::to_string_pretty(trace)?)?;
    }
    if args.json {
        let report = json!({ "status": verdict.status.as_str(), "k": k, "trace": verdict.trace });
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("{}", verdict.status);
        if let Some(trace) = &verdict.trace {
            print!("{trace}");
        }
    }
    Ok(status_code(verdict.status))
}

fn cmd_subst(args: &SubstArgs) -> Result<u8, Failure> {
    let model = ServiceModel::load(&args.model)?;
    let seq: Vec<String> = args.sequence.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    let opts = SubstOptions { strategy: args.strategy, k: args.k.map(|k| k as usize), minimize: !args.first };
    let report = check_substitutable(&model, &seq, &opts, &args.solver.config())?;
    let (word, code) = match &report.outcome {
        Outcome::Substitutable(_) => ("substitutable", 0),
        Outcome::NotSubstitutable => ("not-substitutable", 1),
        Outcome::Unknown(_) => ("unknown", 2),
    };
    if let Outcome::Substitutable(script) = &report.outcome {
        replay(script, &model, &seq).map_err(|e| Failure(format!("mapping script fails its replay check: {e}")))?;
    }
    if let (Outcome::Unknown(diag), true) = (&report.outcome, args.solver.verbose) {
        eprintln!("{diag}");
    }
    let script = match &report.outcome {
        Outcome::Substitutable(s) => Some(s),
        _ => None,
    };
    if args.json {
        let out = json!({ "verdict": word, "k": report.k, "strategy": args.strategy, "script": script });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!("{word} (k = {})", report.k);
        if let Some(script) = script {
            println!("actual operations: {}", script.actual_ops().join(", "));
            print!("{script}");
        }
    }
    Ok(code)
}

fn cmd_oracle(args: &OracleArgs) -> Result<u8, Failure> {
    let f = load_formula(&args.file)?;
    if let Some(path) = &args.trace {
        let trace: Trace = serde_json::from_str(&read(path)?)?;
        trace.validate()?;
        let value = oracle::eval(&f, &trace, args.at)?;
        let closes = oracle::loop_closes(&f, &trace)?;
        if args.json {
            println!("{}", json!({ "value": value, "at": args.at, "loop_closes": closes }));
        } else {
            println!("{value}");
            if !closes {
                println!("note: past subformulas disagree across the loop; the trace is not a model");
            }
        }
        return Ok(if value { 0 } else { 1 });
    }
    let range = args.enumerate.as_deref().unwrap_or_default();
    let [lo, hi] = range else {
        return Err(Failure("--enumerate takes LO and HI".into()));
    };
    let k = args.k.ok_or_else(|| Failure("--enumerate needs --bound".into()))? as usize;
    let cfg = EnumConfig { budget: args.budget, ..Default::default() };
    match oracle::enumerate(&f, k, *lo, *hi, cfg)? {
        Enumeration::Sat(trace) => {
            if args.json {
                println!("{}", serde_json::to_string_pretty(&json!({ "status": "sat", "trace": trace }))?);
            } else {
                println!("sat");
                print!("{trace}");
            }
            Ok(0)
        }
        Enumeration::UnsatWithinRange => {
            if args.json {
                println!("{}", json!({ "status": "unsat-within-range" }));
            } else {
                println!("unsat-within-range");
            }
            Ok(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Sat(a) => cmd_sat(a),
        Command::Subst(a) => cmd_subst(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
