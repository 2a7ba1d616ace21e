mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use hfk_core::{
    alexander, epsilon, hf_ranks, hfk_ranks, is_simple, make_staircase, parse, recognize_staircase,
    run_suite, serialize, InstanceSource, KnotComplex, StaircaseSpec, Suite, SuiteParams,
};
use report::{digest, table, CliError, Report};

/// Surgery formulas for knot Floer complexes over GF(2).
///
/// Every command prints a JSON report on stdout. Exit status is 0 on success,
/// 1 on a domain error and 2 on a usage error.
#[derive(Parser)]
#[command(name = "hfksurg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Complex file (JSON)
    file: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check a complex file against every invariant
    Validate(Input),
    /// Homology of the complex by homological degree
    Homology(Input),
    /// Largest Alexander level
    Genus(Input),
    /// Degree of the homology generator (rank-one complexes only)
    DInvariant(Input),
    /// Knot Floer ranks of the induced knot after n-surgery, by level
    Hfk {
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        n: i64,
        #[command(flatten)]
        input: Input,
    },
    /// Heegaard Floer ranks of the n-surgery, by residue class mod n
    Hf {
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        n: i64,
        #[command(flatten)]
        input: Input,
    },
    /// Whether the induced knot has simple knot Floer homology
    Simple {
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        n: i64,
        #[command(flatten)]
        input: Input,
    },
    /// The map epsilon_s : H{<s} -> H{<=-s}
    Epsilon {
        #[arg(long, allow_negative_numbers = true)]
        s: i64,
        #[command(flatten)]
        input: Input,
    },
    /// Alexander polynomial (graded Euler characteristic)
    Alexander(Input),
    /// Build or recognize staircase complexes
    #[command(subcommand)]
    Staircase(StaircaseCommand),
    /// Run a verification suite
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum StaircaseCommand {
    /// Print the staircase complex file for the given steps
    Make {
        /// Strictly increasing positive levels, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        steps: Vec<i64>,
        /// Degree of the homology generator
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        d: i64,
    },
    /// Decide whether a complex is a staircase
    Check(Input),
}

#[derive(Args)]
struct VerifyArgs {
    /// small-surgery, large-forward or converse
    #[arg(long)]
    suite: Suite,
    #[arg(long)]
    max_genus: u32,
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
    max_n: i64,
    /// Use this many seeded random complexes instead of staircases
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, requires = "random", default_value_t = 0)]
    seed: u64,
    /// Generator bound for random complexes
    #[arg(long, requires = "random", default_value_t = 9)]
    max_dim: usize,
    /// Include wall-clock time in the report
    #[arg(long)]
    timing: bool,
}

/// Reads and parses the input file, recording its digest first so that error
/// reports identify the bytes that failed.
fn load(input: &Input, digest_out: &mut Option<String>) -> Result<KnotComplex, CliError> {
    let bytes = std::fs::read(&input.file).map_err(|e| {
        CliError::domain("io", format!("cannot read {}: {e}", input.file.display()))
    })?;
    *digest_out = Some(digest(&bytes));
    Ok(parse(&bytes)?)
}

enum Output {
    Report(Value),
    /// Printed verbatim, not wrapped in a report.
    Raw(String),
}

fn run(command: Command, digest_out: &mut Option<String>) -> Result<Output, CliError> {
    let result = match command {
        Command::Validate(input) => {
            let b = load(&input, digest_out)?;
            json!({
                "valid": true,
                "name": b.name(),
                "generators": b.dim(),
                "genus": b.genus().ok(),
            })
        }
        Command::Homology(input) => {
            let b = load(&input, digest_out)?;
            let ranks = b.homology(&b.whole());
            json!({"by_degree": table(ranks.ranks.clone()), "total": ranks.total()})
        }
        Command::Genus(input) => {
            let b = load(&input, digest_out)?;
            json!({"genus": b.genus()?})
        }
        Command::DInvariant(input) => {
            let b = load(&input, digest_out)?;
            json!({"d": b.d_invariant()?})
        }
        Command::Hfk { n, input } => {
            let b = load(&input, digest_out)?;
            table(hfk_ranks(&b, n)?.ranks)
        }
        Command::Hf { n, input } => {
            let b = load(&input, digest_out)?;
            table(hf_ranks(&b, n)?.ranks)
        }
        Command::Simple { n, input } => {
            let b = load(&input, digest_out)?;
            let v = is_simple(&b, n)?;
            json!({
                "simple": v.simple,
                "witness_levels": v.witness_levels,
                "hfk_total": v.hfk_total,
                "hf_total": v.hf_total,
            })
        }
        Command::Epsilon { s, input } => {
            let b = load(&input, digest_out)?;
            let e = epsilon(&b, s)?;
            let rows: Vec<Vec<u8>> = (0..e.matrix.rows())
                .map(|i| (0..e.matrix.cols()).map(|j| u8::from(e.matrix.row(i).get(j))).collect())
                .collect();
            json!({
                "s": e.s,
                "source_rank": e.source_rank,
                "target_rank": e.target_rank,
                "matrix": rows,
                "vanishes": e.vanishes(),
            })
        }
        Command::Alexander(input) => {
            let b = load(&input, digest_out)?;
            let p = alexander(&b)?;
            json!({
                "coefficients": table(p.coeffs.clone()),
                "polynomial": p.to_string(),
            })
        }
        Command::Staircase(StaircaseCommand::Make { steps, d }) => {
            let spec = StaircaseSpec::new(steps, d)?;
            return Ok(Output::Raw(serialize(&make_staircase(&spec))));
        }
        Command::Staircase(StaircaseCommand::Check(input)) => {
            let b = load(&input, digest_out)?;
            match recognize_staircase(&b) {
                Ok(spec) => json!({
                    "staircase": true,
                    "steps": spec.steps(),
                    "d_top": spec.d_top(),
                    "genus": spec.genus(),
                }),
                Err(reason) => json!({
                    "staircase": false,
                    "reason": reason,
                    "message": reason.to_string(),
                }),
            }
        }
        Command::Verify(args) => {
            let source = match args.random {
                Some(count) => InstanceSource::Random {
                    count,
                    seed: args.seed,
                    dim_bound: args.max_dim,
                },
                None => InstanceSource::Staircases,
            };
            if args.random.is_none() && args.max_genus > 16 {
                return Err(CliError::usage("--max-genus above 16 enumerates too many staircases"));
            }
            let params = SuiteParams {
                max_genus: args.max_genus,
                max_n: args.max_n,
                source,
            };
            let mut report = run_suite(args.suite, &params)?;
            if !args.timing {
                report.elapsed_ms = None;
            }
            serde_json::to_value(report).expect("suite reports are plain JSON values")
        }
    };
    Ok(Output::Report(result))
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    // A closed pipe is not worth a panic.
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn main() -> ExitCode {
    let argv: Vec<OsString> = std::env::args_os().collect();
    let echo: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();

    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            emit(&e.to_string());
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let mut report = Report::new(echo, None);
            let message = e.render().to_string();
            report.error = Some(CliError::usage(message.trim_end()).body);
            emit(&report.to_json());
            return ExitCode::from(2);
        }
    };

    let mut input_digest = None;
    let outcome = run(cli.command, &mut input_digest);
    let mut report = Report::new(echo, input_digest);
    match outcome {
        Ok(Output::Raw(text)) => {
            emit(&text);
            ExitCode::SUCCESS
        }
        Ok(Output::Report(value)) => {
            report.result = Some(value);
            emit(&report.to_json());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = e.code;
            report.error = Some(e.body);
            emit(&report.to_json());
            ExitCode::from(code)
        }
    }
}
