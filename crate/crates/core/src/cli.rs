//! Command-line front end.
//!
//! Exit codes: 0 when a witness is produced and certified (or a document
//! re-verifies), 1 for malformed input, 2 for an honest mathematical failure.
//! Errors are reported on standard error as a JSON object.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::corpus::{run_corpus, Subset};
use crate::error::Error;
use crate::io::{solve, solve_timed, verify_document, Operation, Overrides, ProblemSpec, WitnessDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "stablerank", version, about = "Certified reductions of invertible tuples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve a problem file, or re-check a witness document.
    Run(RunArgs),
    /// Run a built-in instance set and print a pass/fail table.
    Corpus(CorpusArgs),
}

#[derive(clap::Args, Debug)]
pub struct RunArgs {
    /// Problem file; with --verify-only, a witness document.
    #[arg(long)]
    pub problem: PathBuf,
    /// small-norm, norm-one, all-units, unitary, stabilize, certify,
    /// disk-norm-one or disk-witness-search.
    #[arg(long, required_unless_present = "verify_only")]
    pub op: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_retries: Option<usize>,
    #[arg(long)]
    pub max_refine: Option<usize>,
    /// Write the document here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub verify_only: bool,
    /// Record the solve time in the document.
    #[arg(long)]
    pub timings: bool,
}

#[derive(clap::Args, Debug)]
pub struct CorpusArgs {
    /// pl-quick, pl-full, disk or all.
    pub subset: String,
    /// Write each witness document to `<dir>/<entry>.json`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Print per-entry wall times on standard error.
    #[arg(long)]
    pub timings: bool,
}

fn report(code: i32, kind: &str, message: impl Into<String>) -> i32 {
    let body = json!({ "error": { "kind": kind, "message": message.into() } });
    eprintln!("{body}");
    code
}

fn report_error(e: &Error) -> i32 {
    if e.is_honest_failure() {
        report(EXIT_FAILURE, "failure", e.to_string())
    } else {
        report(EXIT_MALFORMED, "malformed-input", e.to_string())
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("STABLERANK_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| format!("STABLERANK_THREADS must be a count, got `{raw}`"))?;
    if n > 0 {
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(msg) = configure_threads() {
        return report(EXIT_MALFORMED, "malformed-input", msg);
    }
    match cli.command {
        Command::Run(a) => run_command(&a),
        Command::Corpus(a) => corpus_command(&a),
    }
}

fn run_command(a: &RunArgs) -> i32 {
    let text = match fs::read_to_string(&a.problem) {
        Ok(t) => t,
        Err(e) => return report(EXIT_MALFORMED, "malformed-input", format!("{}: {e}", a.problem.display())),
    };
    if a.verify_only {
        let doc = match WitnessDocument::from_json(&text) {
            Ok(d) => d,
            Err(e) => return report_error(&e),
        };
        let v = match verify_document(&doc) {
            Ok(v) => v,
            Err(e) => return report_error(&e),
        };
        let out = serde_json::to_string_pretty(&v).expect("verifications serialize");
        if let Err(e) = emit(&out, a.out.as_deref()) {
            return report_error(&e);
        }
        if !v.passed {
            let failed: Vec<_> = v.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            return report(EXIT_FAILURE, "certificate-failed", failed.join("; "));
        }
        return EXIT_OK;
    }
    let op = match a.op.as_deref().map(str::parse::<Operation>) {
        Some(Ok(op)) => op,
        Some(Err(e)) => return report_error(&e),
        None => return report(EXIT_MALFORMED, "malformed-input", "--op is required"),
    };
    let mut problem = match ProblemSpec::from_json(&text) {
        Ok(p) => p,
        Err(e) => return report_error(&e),
    };
    problem.apply(&Overrides {
        operation: Some(op),
        epsilon: a.epsilon,
        seed: a.seed,
        max_retries: a.max_retries,
        max_refinements: a.max_refine,
    });
    let result = if a.timings { solve_timed(&problem) } else { solve(&problem) };
    match result.and_then(|doc| emit(&doc.to_json(), a.out.as_deref())) {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(&e),
    }
}

fn corpus_command(a: &CorpusArgs) -> i32 {
    let subset: Subset = match a.subset.parse() {
        Ok(s) => s,
        Err(e) => return report_error(&e),
    };
    let report_ = match run_corpus(subset, &a.subset) {
        Ok(r) => r,
        Err(e) => return report_error(&e),
    };
    if let Some(dir) = &a.out_dir {
        let written = fs::create_dir_all(dir).map_err(Error::from).and_then(|()| {
            for o in &report_.outcomes {
                if let Some(doc) = &o.document {
                    let file = dir.join(format!("{}.json", o.name.replace('/', "__")));
                    fs::write(file, doc.to_json())?;
                }
            }
            Ok(())
        });
        if let Err(e) = written {
            return report_error(&e);
        }
    }
    print!("{}", report_.summary());
    if a.timings {
        eprint!("{}", report_.timing_table());
    }
    if report_.all_passed() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}
