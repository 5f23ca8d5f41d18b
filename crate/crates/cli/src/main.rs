use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fraclab::{Command, Format, Input, RunConfig};
use fraclab_core::verify::Suite;

#[derive(Parser)]
#[command(name = "fraclab", version, about = "Exact fractional chromatic number, Hall ratio and related checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Construction expression, e.g. "join(cycle(5),cycle(7))"
    #[arg(long, global = true, conflicts_with = "dimacs")]
    expr: Option<String>,
    /// DIMACS edge-format input file
    #[arg(long, global = true)]
    dimacs: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest vertex count for the exact Hall ratio
    #[arg(long, global = true, default_value_t = fraclab_core::hall::DEFAULT_HALL_CAP)]
    hall_cap: usize,
    /// Largest vertex count for the exact LP
    #[arg(long, global = true, default_value_t = fraclab_core::fraclp::DEFAULT_LP_LIMIT)]
    lp_cap: usize,
    /// Bit budget for up-arrow evaluation
    #[arg(long, global = true, default_value_t = fraclab_core::ackermann::DEFAULT_BUDGET)]
    bits: u64,
    #[arg(long, global = true)]
    json: bool,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the graph and print it in DIMACS format
    Gen,
    Alpha,
    Chi,
    /// Exact fractional chromatic number with a checked certificate
    ChiF,
    Hall,
    /// n/alpha, rho, chi_f, chi and the chain between them
    Gap,
    Ackermann,
    /// Run one verification suite, or `all`
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { fraclab::EXIT_USAGE as u8 } else { 0 });
        }
    };
    let command = match cli.command {
        Cmd::Gen => Command::Gen,
        Cmd::Alpha => Command::Alpha,
        Cmd::Chi => Command::Chi,
        Cmd::ChiF => Command::ChiF,
        Cmd::Hall => Command::Hall,
        Cmd::Gap => Command::Gap,
        Cmd::Ackermann => Command::Ackermann,
        Cmd::Verify { suite } if suite == "all" => Command::Verify(None),
        Cmd::Verify { suite } => match suite.parse::<Suite>() {
            Ok(s) => Command::Verify(Some(s)),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(fraclab::EXIT_USAGE as u8);
            }
        },
    };
    let input = match (cli.expr, cli.dimacs) {
        (Some(e), _) => Some(Input::Expr(e)),
        (None, Some(p)) => Some(Input::Dimacs(p)),
        (None, None) => None,
    };
    let config = RunConfig {
        command,
        input,
        seed: cli.seed,
        hall_cap: cli.hall_cap,
        lp_cap: cli.lp_cap,
        bits: cli.bits,
        format: if cli.json { Format::Json } else { Format::Table },
        out: cli.out,
    };
    let outcome = fraclab::run(&config);
    if outcome.output.starts_with("error:") {
        eprint!("{}", outcome.output);
    } else {
        let _ = std::io::stdout().write_all(outcome.output.as_bytes());
    }
    ExitCode::from(outcome.status as u8)
}
