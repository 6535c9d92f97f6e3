use std::path::PathBuf;

use clap::{Parser, Subcommand};

use ciaudit::config::Overrides;
use ciaudit::run::{self, AuditArgs, GenArgs, InvertArgs, PlotdataArgs};

#[derive(Parser)]
#[command(
    name = "ciaudit",
    version,
    about = "Audit how much each component of a composite indicator actually matters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full audit and write a JSON report.
    Audit {
        /// Panel CSV: header row, unit label column, one indicator per column.
        #[arg(long)]
        data: PathBuf,
        /// TOML run configuration; `weights` is required.
        #[arg(long)]
        config: PathBuf,
        /// Report destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the per-indicator table as a flat CSV.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, value_name = "minmax|standardize|none")]
        normalization: Option<String>,
        #[arg(long, value_name = "linear|geometric")]
        aggregation: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Importance-ratio targets r2,...,rk; adds an inverse block.
        #[arg(long)]
        targets: Option<String>,
    },
    /// Solve for the weights that would realize stated importance ratios.
    Invert {
        /// Either a panel CSV or a headerless square covariance CSV.
        #[arg(long)]
        data: PathBuf,
        /// Optional TOML file supplying `targets` and `normalization`.
        #[arg(long)]
        config: Option<PathBuf>,
        /// JSON report destination; stdout summary is printed either way.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Importance-ratio targets r2,...,rk relative to the first indicator.
        #[arg(long)]
        targets: Option<String>,
        /// Normalization for panel inputs; ignored for covariance inputs.
        #[arg(long, value_name = "minmax|standardize|none")]
        normalization: Option<String>,
    },
    /// Emit tidy CSV curves (CV, p-value, main effect, scatter) for one indicator.
    Plotdata {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Indicator column label to plot.
        #[arg(long)]
        indicator: String,
        /// Output directory for cv.csv, pvalue.csv, effect.csv, scatter.csv.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, value_name = "minmax|standardize|none")]
        normalization: Option<String>,
        #[arg(long, value_name = "linear|geometric")]
        aggregation: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Draw a synthetic Gaussian panel and write it as a panel CSV.
    Gen {
        /// TOML spec with n, mu, sigma, and an optional seed.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the spec.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = match cli.command {
        Command::Audit {
            data,
            config,
            out,
            table,
            normalization,
            aggregation,
            seed,
            targets,
        } => run::cmd_audit(&AuditArgs {
            data,
            config,
            out,
            table,
            overrides: Overrides {
                normalization,
                aggregation,
                seed,
                targets,
            },
        }),
        Command::Invert {
            data,
            config,
            out,
            targets,
            normalization,
        } => run::cmd_invert(&InvertArgs {
            data,
            config,
            out,
            targets,
            normalization,
        }),
        Command::Plotdata {
            data,
            config,
            indicator,
            out,
            normalization,
            aggregation,
            seed,
        } => run::cmd_plotdata(&PlotdataArgs {
            data,
            config,
            indicator,
            out_dir: out,
            overrides: Overrides {
                normalization,
                aggregation,
                seed,
                targets: None,
            },
        }),
        Command::Gen { config, out, seed } => run::cmd_gen(&GenArgs { config, out, seed }),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
