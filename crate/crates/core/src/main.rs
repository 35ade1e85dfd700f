use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use poisson_duality::cli::{load, run, Command, Flags, Format, Outcome, EXIT_INPUT};

/// Exact Poisson (co)homology with module coefficients and duality checks.
#[derive(Debug, Parser)]
#[command(name = "poisson-duality", version)]
struct Args {
    command: Command,
    /// Problem file (JSON).
    file: PathBuf,
    /// Restrict tables to one degree.
    #[arg(long)]
    degree: Option<usize>,
    /// Restrict tables to one weight.
    #[arg(long, allow_hyphen_values = true)]
    weight: Option<i64>,
    /// Weight cap (cochain weights for `duality`).
    #[arg(long, allow_hyphen_values = true)]
    max_weight: Option<i64>,
    /// Random elements checked by `duality`.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let outcome = match load(&args.file) {
        Ok(spec) => {
            let flags = Flags {
                degree: args.degree,
                weight: args.weight,
                max_weight: args.max_weight,
                trials: args.trials,
                seed: args.seed,
            };
            run(args.command, &spec, &flags)
        }
        Err(e) => Outcome::input_error(args.command, &e),
    };
    print!("{}", outcome.render(args.format));
    ExitCode::from(outcome.exit_code as u8)
}
