//! `steerlp` command-line front end.

mod commands;
mod config;
mod error;
mod output;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{parse_noise, Context, FacetArgs, MeasureArgs, NoiseSpec, SolverArgs};
use crate::error::CliResult;

/// Environment variable holding the worker count for `table`.
pub const WORKERS_ENV: &str = "STEERLP_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "steerlp", version, about = "Polytope LP bounds on measurement incompatibility and steering robustness")]
struct Cli {
    /// Directory that relative input and output paths are resolved against.
    #[arg(long, global = true, default_value = ".")]
    workdir: PathBuf,
    /// Write 0 in timing fields so identical configs give byte-identical outputs.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Generate, import, refine or analyze polytopes.
    #[command(subcommand)]
    Polytope(PolytopeCmd),
    /// Write a measurement-set JSON file.
    Measure(MeasureCmd),
    /// LP bracket on the incompatibility robustness (optionally with the exact oracle).
    Robustness(RobustnessCmd),
    /// Exact robustness by conic programming over deterministic strategies.
    Sdp(SdpCmd),
    /// Upper bound on a state's steering robustness from an outer vertex set.
    StateUpper(StateCmd),
    /// Lower bound on a state's steering robustness from quasi-measurements.
    StateLower(StateCmd),
    /// Regenerate table and figure data as CSV.
    Table(TableCmd),
    /// Validate a measurement, assemblage, state or polytope file.
    Validate(ValidateCmd),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PolytopeCmd {
    /// Vertices (and facets unless --no-facets) of a generator spec.
    Generate {
        #[arg(long)]
        polytope: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        no_facets: bool,
        #[command(flatten)]
        facet: FacetArgs,
    },
    /// Validate an external vertex file, compute facets and r, and write it back.
    Import {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Recompute r even when the file stores one.
        #[arg(long)]
        recompute: bool,
        #[command(flatten)]
        facet: FacetArgs,
    },
    /// Add the eigenprojectors of the facets attaining the minimum, `steps` times.
    Refine {
        #[arg(long)]
        polytope: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        /// Per-step history as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        facet: FacetArgs,
    },
    /// Print the shrinking factor and the minimizing facets.
    Shrink {
        #[arg(long)]
        polytope: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        facet: FacetArgs,
    },
    /// The outer set `Lambda_{1/r}` of an inner polytope.
    Outer {
        #[arg(long)]
        polytope: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        facet: FacetArgs,
    },
}

#[derive(Args, Debug, Serialize)]
struct MeasureCmd {
    #[command(flatten)]
    measure: MeasureArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct RobustnessCmd {
    #[command(flatten)]
    measure: MeasureArgs,
    /// Assemblage JSON file instead of a measurement set.
    #[arg(long, conflicts_with_all = ["measurements", "family"])]
    assemblage: Option<PathBuf>,
    /// Generator spec or polytope JSON file.
    #[arg(long)]
    polytope: String,
    /// Also run the exact oracle.
    #[arg(long)]
    oracle: bool,
    /// Skip dual certificate extraction.
    #[arg(long)]
    no_certificate: bool,
    /// Run log to append a CSV row to.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Result JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    facet: FacetArgs,
}

#[derive(Args, Debug, Serialize)]
struct SdpCmd {
    #[command(flatten)]
    measure: MeasureArgs,
    #[arg(long, conflicts_with_all = ["measurements", "family"])]
    assemblage: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug, Serialize)]
struct StateCmd {
    /// `phi:D`, `random-hs:DA:DB:SEED` or a state JSON file.
    #[arg(long)]
    state: String,
    #[command(flatten)]
    measure: MeasureArgs,
    /// Inner polytope spec or file; the upper bound uses its outer set unless the file is already outer.
    #[arg(long)]
    polytope: String,
    /// `local` (1/d_A x rho_B), `global` (1/(d_A d_B)) or a state JSON file.
    #[arg(long, default_value = "local", value_parser = parse_noise)]
    noise: NoiseSpec,
    /// Measurement shrinking factor for the lower bound; computed from the
    /// measurement directions when omitted (dichotomic qubit measurements only).
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    facet: FacetArgs,
}

#[derive(Args, Debug, Serialize)]
struct TableCmd {
    /// Which outputs to produce.
    #[arg(required = true, value_enum)]
    which: Vec<table::Which>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Smaller parameter grids for a fast smoke run.
    #[arg(long)]
    quick: bool,
    /// Largest m for which the exact oracle fills the `exact` column.
    #[arg(long)]
    oracle_max_m: Option<usize>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug, Serialize)]
struct ValidateCmd {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = commands::FileKind::Auto)]
    kind: commands::FileKind,
    #[arg(long, default_value_t = steerlp::quantum::DEFAULT_TOL)]
    tol: f64,
}

fn run(cli: Cli) -> CliResult<()> {
    let ctx = Context { workdir: cli.workdir.clone(), timing: !cli.no_timing };
    if !ctx.workdir.is_dir() {
        return Err(error::CliError::Io(format!("--workdir {} is not a directory", ctx.workdir.display())));
    }
    let config = serde_json::json!({ "command": &cli.command, "no_timing": cli.no_timing });
    match &cli.command {
        Command::Polytope(c) => commands::polytope(&ctx, &config, c),
        Command::Measure(c) => commands::measure(&ctx, &config, c),
        Command::Robustness(c) => commands::robustness(&ctx, &config, c),
        Command::Sdp(c) => commands::sdp(&ctx, &config, c),
        Command::StateUpper(c) => commands::state(&ctx, &config, c, true),
        Command::StateLower(c) => commands::state(&ctx, &config, c, false),
        Command::Table(c) => table::run(&ctx, &config, c),
        Command::Validate(c) => commands::validate(&ctx, c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not size the worker pool: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
