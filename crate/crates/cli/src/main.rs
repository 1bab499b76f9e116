//! `hrush`: command-line access to the predimension toolkit.
//!
//! Positional arguments that name existing files are read as input; the rest
//! are object names looked up in what was read. With no input file the
//! built-in prelude (`s3`, `s4`, `S1`, `S2`, `U23`) is used.

mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hrush_core::Error;

#[derive(Parser, Debug)]
#[command(name = "hrush", version, about = "Predimension, closure and pregeometry computations on finite structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Opts {
    /// A subset, as `a,b`, `{a,b}` or `{}`; repeat for commands taking two.
    #[arg(long, global = true)]
    pub subset: Vec<String>,
    /// Emit JSON with sorted keys instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Universe cap for exhaustive subset enumeration (default: HRUSH_CAP or 20).
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub rounds: Option<usize>,
    #[arg(long, global = true)]
    pub arity: Option<usize>,
    /// Symbol map for π-reduction, as `R3=R4`; repeat or comma-separate.
    #[arg(long, global = true)]
    pub target: Vec<String>,
    #[arg(long, global = true)]
    pub suite: Option<String>,
    /// Catalog bound for the generic builders.
    #[arg(long, global = true)]
    pub bound: Option<usize>,
    /// Search for an embedding rather than an isomorphism (pgiso).
    #[arg(long, global = true)]
    pub embed: bool,
    /// Run without the thread pool.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Inputs {
    /// Input files and object names.
    pub args: Vec<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Predimension of a subset (default: the whole universe).
    Delta(Inputs),
    /// Whether every subset has nonnegative predimension.
    Inclass(Inputs),
    /// Whether a subset is self-sufficient.
    Ssuff(Inputs),
    /// Self-sufficient closure of a subset.
    Ssclosure(Inputs),
    /// Dimension of a subset (default: the whole universe).
    Dim(Inputs),
    /// Dimension closure of a subset.
    Dclosure(Inputs),
    /// Relative dimension d(X/Z): `--subset X --subset Z`.
    Reldim(Inputs),
    /// Rank table of the pregeometry of a structure.
    Pg(Inputs),
    /// Isomorphism (or, with --embed, embedding) between two pregeometries.
    Pgiso(Inputs),
    /// Localize a pregeometry at `--subset Z`; Z leaves the ground set.
    Localize(Inputs),
    /// Replace the relations on the points of NEW inside M: `replace M NEW`.
    Replace(Inputs),
    /// Rewrite each FROM tuple as weight(FROM)/weight(TO) TO tuples on the same points: `--target R3=R4`.
    Pireduce(Inputs),
    /// Derive every tuple of arity four or more down to ternary tuples on fresh points.
    Derive(Inputs),
    /// Extend every ternary tuple (a,b,c) to (a,b,c,…,c) of length `--arity n`.
    Pad(Inputs),
    /// The diagonal structure on `--subset Z` with `--arity n` tuples.
    Diag(Inputs),
    /// Free amalgam of A1 and A2 over `--subset A0`.
    Amalgam(Inputs),
    /// Build a bounded generic chain for the `--arity n` signature (or a named signature).
    Generic(Inputs),
    /// Build a chain, then check the extension property against its catalog.
    Extcheck(Inputs),
    /// Search for an `--arity n` structure with the given pregeometry.
    Lift(Inputs),
    /// Whether A is an n-strong substructure of B: `strongsub A B`.
    Strongsub(Inputs),
    /// Amalgamate pregeometries: `pgamalgam A0 A1 A2`.
    Pgamalgam(Inputs),
    /// Bounded generic chain read through its dimension function.
    Pgeneric(Inputs),
    /// Run a seeded property suite; without --suite, list the suites.
    Proptest(Inputs),
}

/// A failure with its exit status: 1 domain, 2 size limit, 3 parse or input.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_size_limit() {
            2
        } else if e.is_parse() {
            3
        } else {
            1
        };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli.command, &cli.opts) {
        Ok(out) => {
            print!("{}", out.render(cli.opts.json));
            ExitCode::from(out.status)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
