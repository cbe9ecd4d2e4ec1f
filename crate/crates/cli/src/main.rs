//! `bbgroup`: runs the recognition pipelines on generated or user-supplied
//! black boxes and writes JSON reports.

mod modes;
mod report;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "bbgroup", version, about = "Structure recovery for black box SL2 groups")]
struct Cli {
    #[command(subcommand)]
    mode: Mode,
}

#[derive(Subcommand, Debug)]
enum Mode {
    /// Recover (P)SL2(q), q = 1 mod 4 odd, and check the map Phi.
    RecognizeOdd(RunArgs),
    /// Recover SL2(2^n) from a revealed involution and check the map Psi.
    RecognizeChar2(RunArgs),
    /// Build the Frobenius shift box and check it.
    Frobenius(RunArgs),
    /// Emit the recovered structure constants and the isomorphism to F_q.
    FieldReport(RunArgs),
    /// Run the built-in oracle suites.
    Selftest(RunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Generator file; otherwise a hidden standard copy of the group is built.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Degree in characteristic 2 (the field has 2^n elements).
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent runs with seeds seed, seed + 1, ...
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Keyed pseudorandom element strings (the default).
    #[arg(long, conflicts_with = "transparent")]
    pub opaque: bool,
    /// Element strings are the matrices themselves.
    #[arg(long)]
    pub transparent: bool,
    /// Generate PSL2 instead of SL2.
    #[arg(long)]
    pub psl: bool,
    /// Random pairs for the homomorphism checks.
    #[arg(long, default_value_t = 200)]
    pub pairs: usize,
}

impl RunArgs {
    pub fn is_opaque(&self) -> bool {
        !self.transparent
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, args) = match &cli.mode {
        Mode::RecognizeOdd(a) => ("recognize-odd", a),
        Mode::RecognizeChar2(a) => ("recognize-char2", a),
        Mode::Frobenius(a) => ("frobenius", a),
        Mode::FieldReport(a) => ("field-report", a),
        Mode::Selftest(a) => ("selftest", a),
    };
    let outcome = match modes::run(name, args) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let json = serde_json::to_string_pretty(&outcome.report).expect("reports serialize");
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
            println!("{}", outcome.summary);
        }
        None => {
            println!("{json}");
            eprintln!("{}", outcome.summary);
        }
    }
    ExitCode::from(outcome.exit_code)
}
