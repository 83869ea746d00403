use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qcl::cli::{self, CliError, CliResult, Fault, Format, Level, SweepConfig};

#[derive(Parser)]
#[command(name = "qcl", version, about = "Capacities and bounds for the qutrit Landau-Streater family")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Phase,
    Bell,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate capacities at one x.
    Point {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, default_value = "chi_star,c_ea,q1_lower,q_sdp,q_flag")]
        quantities: String,
        #[arg(long, default_value_t = cli::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = cli::DEFAULT_STARTS)]
        starts: usize,
    },
    /// Evaluate capacities on a grid and write CSV or JSON.
    Sweep {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x_min: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        x_max: f64,
        #[arg(long, default_value_t = cli::DEFAULT_STEPS)]
        steps: usize,
        #[arg(long, default_value = "chi_star,c_ea,q1_lower,q_sdp,q_flag")]
        quantities: String,
        #[arg(long, default_value_t = cli::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = cli::DEFAULT_STARTS)]
        starts: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Run the invariant suites.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        #[arg(long, default_value_t = cli::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = cli::DEFAULT_STARTS)]
        starts: usize,
        /// Negative control: corrupt the Kraus normalization.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Simulate a dense-coding protocol through the x = 1 channel.
    Protocol {
        #[arg(value_enum)]
        name: ProtocolArg,
    },
}

fn run(args: Args) -> CliResult<()> {
    match args.command {
        Command::Point { x, quantities, seed, starts } => {
            let qs = cli::parse_quantities(&quantities)?;
            if starts == 0 {
                return Err(CliError::Usage("starts must be at least 1".into()));
            }
            let record = cli::evaluate(x, &qs, starts, seed)?;
            println!("{}", cli::point_line(&record));
        }
        Command::Sweep { x_min, x_max, steps, quantities, seed, starts, out, format } => {
            let cfg = SweepConfig {
                x_min,
                x_max,
                steps,
                quantities: cli::parse_quantities(&quantities)?,
                seed,
                starts,
                out,
                format: match format {
                    FormatArg::Csv => Format::Csv,
                    FormatArg::Json => Format::Json,
                },
            };
            if let Some(text) = cli::run_sweep(&cfg)? {
                print!("{text}");
            }
        }
        Command::Verify { level, seed, starts, inject_fault } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let fault = inject_fault.then_some(Fault::CorruptKrausNormalization);
            let (text, result) = cli::run_verify(level, fault, starts, seed);
            print!("{text}");
            result?;
        }
        Command::Protocol { name } => {
            let name = match name {
                ProtocolArg::Phase => "phase",
                ProtocolArg::Bell => "bell",
            };
            print!("{}", cli::run_protocol(name)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(n) = std::env::var("QCL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size thread pool: {e}");
        }
    }
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
