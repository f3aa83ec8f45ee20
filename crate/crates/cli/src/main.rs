//! `wps`: build and verify Beilinson-type resolutions on weighted projective stacks.

mod run;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use run::{execute, parse_weights, Check, CliError, CliResult, RunConfig};
use sweep::SweepOptions;
use wps_core::FieldConfig;

#[derive(Parser)]
#[command(name = "wps", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Comma-separated weights, e.g. 1,1,2
    #[arg(long)]
    weights: String,
    /// Coefficient field: `q` or `fp:P` with P a prime larger than the total weight
    #[arg(long, default_value = "q", value_parser = parse_field)]
    field: FieldConfig,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Output {
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Build R_k and print it with its d² check
    Resolve {
        #[command(flatten)]
        common: Common,
        /// Defaults to 1-w
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i64>,
    },
    /// d² = 0, recursion against the closed form, and μ_k chain maps
    #[command(name = "verify-d2")]
    VerifyD2 {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i64>,
        /// Flip the sign of one differential entry in each R_k before checking
        #[arg(long)]
        mutate_sign: bool,
    },
    /// The pushed-forward resolution resolves O(k), strand by strand
    #[command(name = "verify-diagonal")]
    VerifyDiagonal {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i64>,
        /// Largest strand degree checked; defaults to 3w
        #[arg(long)]
        degree_bound: Option<i64>,
    },
    /// Cohomology table of the twisted blocks B_l(k)
    #[command(name = "verify-blk")]
    VerifyBlk {
        #[command(flatten)]
        common: Common,
    },
    /// Acyclicity of the cone of ε_m
    #[command(name = "verify-mres")]
    VerifyMres {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: Option<i64>,
        #[arg(long)]
        degree_bound: Option<i64>,
    },
    /// G^w = Id on numerical K-theory of the degree-w hypersurface
    Ktheory {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: Option<i64>,
    },
    /// (G|_D)^d = Id on the orthogonal sublattice, for one degree or all 0 < d <= w
    Fano {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: Option<i64>,
    },
    /// Run checks over a file of weight vectors, one per line
    Sweep {
        file: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "ktheory")]
        checks: Vec<Check>,
        #[arg(long, default_value = "q", value_parser = parse_field)]
        field: FieldConfig,
        #[arg(long)]
        degree_bound: Option<i64>,
        /// Omit the elapsed_ms column so output is byte-stable
        #[arg(long)]
        no_timings: bool,
        #[command(flatten)]
        output: Output,
    },
}

fn parse_field(s: &str) -> Result<FieldConfig, String> {
    s.parse().map_err(|e: wps_core::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|_| dispatch(cli.command)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("wps: {e}");
            ExitCode::from(match e {
                CliError::Config(_) => 2,
                CliError::Verify(_) => 1,
            })
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("WPS_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("WPS_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn dispatch(command: Command) -> CliResult<bool> {
    let (check, common, k, m, degree, degree_bound, mutate_sign) = match command {
        Command::Sweep { file, checks, field, degree_bound, no_timings, output } => {
            return run_sweep(file, checks, field, degree_bound, !no_timings, output)
        }
        Command::Resolve { common, k } => (Check::Resolve, common, k, None, None, None, false),
        Command::VerifyD2 { common, k, mutate_sign } => (Check::D2, common, k, None, None, None, mutate_sign),
        Command::VerifyDiagonal { common, k, degree_bound } => (Check::Diagonal, common, k, None, None, degree_bound, false),
        Command::VerifyBlk { common } => (Check::Blk, common, None, None, None, None, false),
        Command::VerifyMres { common, m, degree_bound } => (Check::Mres, common, None, m, None, degree_bound, false),
        Command::Ktheory { common, degree } => (Check::Ktheory, common, None, None, degree, None, false),
        Command::Fano { common, degree } => (Check::Fano, common, None, None, degree, None, false),
    };
    let mut cfg = RunConfig::new(parse_weights(&common.weights)?, common.field, degree_bound)?;
    cfg.k = k;
    cfg.m = m;
    cfg.degree = degree;
    cfg.mutate_sign = mutate_sign;
    let outcome = execute(check, &cfg)?;

    let body = match common.output.format {
        Format::Json => {
            let mut doc = json!({
                "command": check.name(),
                "weights": cfg.weights.weights(),
                "field": cfg.field.to_string(),
                "pass": outcome.pass,
                "reports": Value::Array(outcome.reports),
            });
            if matches!(check, Check::Diagonal | Check::Mres) {
                doc["degree_bound"] = cfg.degree_bound.into();
            }
            pretty(&doc)?
        }
        Format::Text => {
            format!("{}wps {}: {}\n", outcome.text, check.name(), if outcome.pass { "PASS" } else { "FAIL" })
        }
    };
    emit(&body, common.output.out.as_deref())?;
    Ok(outcome.pass)
}

fn run_sweep(
    file: PathBuf,
    checks: Vec<Check>,
    field: FieldConfig,
    degree_bound: Option<i64>,
    timings: bool,
    output: Output,
) -> CliResult<bool> {
    let contents = std::fs::read_to_string(&file)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", file.display())))?;
    let opts = SweepOptions { checks, field, degree_bound, timings };
    let rows = sweep::sweep(&contents, &opts);
    for r in rows.iter().filter(|r| r.status == "warning") {
        eprintln!("wps: line {}: {}", r.line, r.message);
    }
    let body = match output.format {
        Format::Json => pretty(&json!({ "rows": rows }))?,
        Format::Text => sweep::to_csv(&rows, timings)?,
    };
    emit(&body, output.out.as_deref())?;
    Ok(sweep::all_pass(&rows))
}

fn pretty(v: &Value) -> CliResult<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| CliError::Verify(e.to_string()))
}

fn emit(body: &str, out: Option<&std::path::Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
