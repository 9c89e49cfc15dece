use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use cograte::SolverSettings;
use cograte_cli::commands::{self, CliError, Format};
use cograte_cli::config::{parse_alpha_list, parse_bracket, MuGrid};

#[derive(Parser)]
#[command(
    name = "cograte",
    version,
    about = "Rate regions and outer bounds for the Gaussian MIMO cognitive channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(clap::Args)]
struct Common {
    /// Seed for the multi-start solvers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Large μ standing in for μ = ∞.
    #[arg(long, default_value_t = 1e6)]
    mu_infinity: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Trace the achievable region boundary.
    Region {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, default_value = "log:0.01:100:25")]
        mu_grid: MuGrid,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[command(flatten)]
        common: Common,
    },
    /// Trace partial outer bound boundaries for a list of α values.
    Bound {
        #[arg(long)]
        channel: PathBuf,
        /// Comma-separated α values.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value = "log:0.01:100:25")]
        mu_grid: MuGrid,
        /// Output directory; one file per α plus bound.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[command(flatten)]
        common: Common,
    },
    /// Minimize the partial outer bound over α.
    SweepAlpha {
        #[arg(long)]
        channel: PathBuf,
        /// μ values; defaults to the μ = ∞ surrogate.
        #[arg(long)]
        mu_grid: Option<MuGrid>,
        #[arg(long, default_value = "1e-3:1e3", allow_hyphen_values = true)]
        alpha_bracket: String,
        /// Grid resolution of the oracle cross-check.
        #[arg(long, default_value_t = 400, value_parser = clap::value_parser!(u64).range(2..))]
        resolution: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Regenerate every artifact for the bundled example channel.
    ReproducePaper {
        #[arg(long, default_value = "reproduce")]
        out: PathBuf,
        #[arg(long, default_value_t = 400, value_parser = clap::value_parser!(u64).range(2..))]
        resolution: u64,
        #[command(flatten)]
        common: Common,
    },
}

fn settings(common: &Common) -> Result<SolverSettings, CliError> {
    if !(common.mu_infinity.is_finite() && common.mu_infinity >= 1.0) {
        return Err(CliError::config(
            "--mu-infinity must be a finite value of at least 1",
        ));
    }
    Ok(SolverSettings {
        seed: common.seed,
        ..SolverSettings::default()
    })
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("COGRATE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::config(format!(
            "COGRATE_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(format!("cannot size thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Region {
            channel,
            mu_grid,
            out,
            format,
            common,
        } => {
            let opts = settings(&common)?;
            let ch = commands::read_channel(&channel)?;
            commands::region(&ch, &mu_grid.values(), &opts, out.as_deref(), format.into())
        }
        Command::Bound {
            channel,
            alpha,
            mu_grid,
            out,
            format,
            common,
        } => {
            let opts = settings(&common)?;
            let alphas = parse_alpha_list(&alpha).map_err(CliError::config)?;
            let ch = commands::read_channel(&channel)?;
            commands::bound(
                &ch,
                &alphas,
                &mu_grid.values(),
                &opts,
                out.as_deref(),
                format.into(),
            )
        }
        Command::SweepAlpha {
            channel,
            mu_grid,
            alpha_bracket,
            resolution,
            out,
            common,
        } => {
            let opts = settings(&common)?;
            let bracket = parse_bracket(&alpha_bracket).map_err(CliError::config)?;
            let mus = mu_grid.map_or_else(|| vec![common.mu_infinity], |g| g.values());
            let ch = commands::read_channel(&channel)?;
            commands::sweep_alpha(
                &ch,
                &mus,
                bracket,
                resolution as usize,
                &opts,
                out.as_deref(),
            )
        }
        Command::ReproducePaper {
            out,
            resolution,
            common,
        } => {
            let opts = settings(&common)?;
            let start = Instant::now();
            let summary =
                commands::reproduce(&out, &opts, common.mu_infinity, resolution as usize)?;
            print!("{}", summary.table());
            println!(
                "elapsed {:.1} s, artifacts in {}",
                start.elapsed().as_secs_f64(),
                out.display()
            );
            let failed: Vec<_> = summary.failures().iter().map(|c| c.name).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError {
                    kind: cograte_cli::FailureKind::Acceptance,
                    message: format!("failed checks: {}", failed.join(", ")),
                })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
