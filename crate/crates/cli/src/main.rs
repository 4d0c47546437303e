use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod output;

use commands::CliError;
use config::RunConfig;

#[derive(Parser)]
#[command(name = "wsladder", version, about = "Wannier-Stark resonances of atoms in a tilted optical lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Bloch bands ε_α(q), band means and gaps.
    Bands,
    /// Classified complex spectrum of one scenario.
    Spectrum,
    /// First-band lifetimes per well below the surface, for every u in u_list.
    Lifetimes,
    /// Bulk lifetimes against the Landau-Zener estimate.
    LzCompare,
    /// Well-1 widths for a list of Yukawa couplings.
    YukawaTable,
    /// Above-surface spectra for every barrier height in v0_list.
    BarrierScan,
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let mut overrides = cli.set.iter().map(|s| config::parse_override(s)).collect::<Result<Vec<_>, _>>()?;
    if let Some(o) = &cli.out {
        overrides.push(("out".into(), o.display().to_string()));
    }
    if let Some(f) = cli.format {
        let v = match f {
            FormatArg::Csv => "csv",
            FormatArg::Json => "json",
        };
        overrides.push(("format".into(), v.into()));
    }
    let cfg = RunConfig::load(cli.config.as_deref(), &overrides)?;
    match cli.command {
        Command::Bands => commands::cmd_bands(&cfg),
        Command::Spectrum => commands::cmd_spectrum(&cfg),
        Command::Lifetimes => commands::cmd_lifetimes(&cfg),
        Command::LzCompare => commands::cmd_lz_compare(&cfg),
        Command::YukawaTable => commands::cmd_yukawa_table(&cfg),
        Command::BarrierScan => commands::cmd_barrier_scan(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("wsladder: {e}");
            ExitCode::from(match e {
                CliError::Io(..) => 1,
                CliError::Config(_) => 2,
                CliError::Numerical(_) => 3,
            })
        }
    }
}
