//! `crnf`: classify, normalize, compare and trace finite-type hypersurface
//! germs in C² given as exact-rational germ files.
//!
//! Exit codes: 0 ok, 1 inequivalent, 2 parse, 3 type undetermined,
//! 4 precondition, 5 undecided, 6 wrong case.

mod classify;
mod normalize;
mod outcome;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use normalize::{Form, NormalizeArgs};
use outcome::{CmdResult, PARSE};

#[derive(Parser)]
#[command(name = "crnf", version, about = "Exact normal forms of finite-type real hypersurface germs in C²")]
struct Cli {
    /// Emit structured JSON records instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type, model polynomial, class, case tag and locus generators.
    Classify {
        germ: PathBuf,
        /// Candidate curve whose type is checked for constancy (repeatable).
        #[arg(long = "chain")]
        chains: Vec<PathBuf>,
    },
    /// Normal form, normalizing map and a condition-by-condition certificate.
    Normalize {
        germ: PathBuf,
        #[arg(long, value_enum, default_value = "kolar")]
        form: Form,
        /// Truncation weight (defaults to the file's W).
        #[arg(long)]
        weight: Option<u32>,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        lambda: String,
        /// Unimodular rotation `a/b,c/d` (circular class).
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        rho: Option<String>,
        /// Chain file for the strong form.
        #[arg(long)]
        chain: Option<PathBuf>,
        /// Normal-form germ file (printed to stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "map-out")]
        map_out: Option<PathBuf>,
        #[arg(long = "cert-out")]
        cert_out: Option<PathBuf>,
    },
    /// Decides equivalence of two germs up to the residual group.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        weight: Option<u32>,
        #[arg(long = "chainA")]
        chain_a: Vec<PathBuf>,
        #[arg(long = "chainB")]
        chain_b: Vec<PathBuf>,
        /// Where to write the witness map on equivalence.
        #[arg(long = "map-out")]
        map_out: Option<PathBuf>,
    },
    /// Traces a chain through the Levi degeneracy surface of a T2 germ.
    Trace {
        germ: PathBuf,
        /// Start point `x,y,u` (decimals or p/q).
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 0.05)]
        h: f64,
        /// Polyline file of `t u x y` lines (printed to stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(command: &Command) -> CmdResult {
    match command {
        Command::Classify { germ, chains } => classify::classify(germ, chains),
        Command::Normalize { germ, form, weight, lambda, omega, rho, chain, out, map_out, cert_out } => normalize::normalize(NormalizeArgs {
            path: germ,
            form: *form,
            weight: *weight,
            lambda,
            omega: omega.as_deref(),
            rho: rho.as_deref(),
            chain: chain.as_deref(),
            out: out.as_deref(),
            map_out: map_out.as_deref(),
            cert_out: cert_out.as_deref(),
        }),
        Command::Equiv { a, b, weight, chain_a, chain_b, map_out } => normalize::equiv(a, b, *weight, chain_a, chain_b, map_out.as_deref()),
        Command::Trace { germ, point, steps, h, out } => classify::trace(germ, point, *steps, *h, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { PARSE } else { 0 });
        }
    };
    let mut stdout = std::io::stdout().lock();
    let code = match run(&cli.command) {
        Ok(o) => {
            let _ = if cli.json { writeln!(stdout, "{}", o.json) } else { write!(stdout, "{}", o.text) };
            o.code
        }
        Err(f) => {
            if cli.json {
                let _ = writeln!(stdout, "{}", json!({ "error": f.message, "exit": f.code }));
            } else {
                eprintln!("error: {}", f.message);
            }
            f.code
        }
    };
    ExitCode::from(code)
}
