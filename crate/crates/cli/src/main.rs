use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use qstancu_cli::config::{Command, Format, RunConfig};
use qstancu_cli::output::{write_csv, write_json};
use qstancu_core::{Family, Grid};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OperatorArg {
    Cai,
    Modified,
    Qsb,
    Classical,
}

impl From<OperatorArg> for Family {
    fn from(a: OperatorArg) -> Self {
        match a {
            OperatorArg::Cai => Family::CaiPreserving,
            OperatorArg::Modified => Family::ModifiedQ,
            OperatorArg::Qsb => Family::QStancuBeta,
            OperatorArg::Classical => Family::Classical,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SequenceArg {
    Standard,
    Statonly,
    Constant,
}

/// Convergence tables for q-Stancu-Beta operators.
///
/// Exits with 0 when every row passes, 1 when some row fails and 2 on
/// errors. The moment tolerance (default 1e-8) can be overridden with
/// QSTANCU_MOMENT_TOL.
#[derive(Debug, Parser)]
#[command(name = "qstancu", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    #[arg(long, value_enum, default_value = "cai")]
    operator: OperatorArg,
    /// Operator indices, strictly increasing.
    #[arg(long = "n", value_delimiter = ',', num_args = 1..)]
    n: Option<Vec<u32>>,
    /// Fixed q values for the moments, bounds and compare commands.
    #[arg(long = "q", value_delimiter = ',', num_args = 1..)]
    q: Option<Vec<f64>>,
    /// Evaluation points for the moments command.
    #[arg(long = "x", value_delimiter = ',', num_args = 1..)]
    x: Option<Vec<f64>>,
    /// Lattice scales A for the moments command.
    #[arg(long = "lattice-scale", value_delimiter = ',', num_args = 1..)]
    lattice_scale: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "standard")]
    sequence: SequenceArg,
    #[arg(long = "grid-max", default_value_t = qstancu_cli::config::DEFAULT_GRID_MAX)]
    grid_max: f64,
    #[arg(long = "grid-points", default_value_t = qstancu_cli::config::DEFAULT_GRID_POINTS)]
    grid_points: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(cli: Cli) -> Result<RunConfig> {
    let mut config = RunConfig::new(cli.command)?;
    config.operator = cli.operator.into();
    if let Some(n) = cli.n {
        config.n_ladder = n;
    }
    if let Some(q) = cli.q {
        config.q_values = q;
    }
    if let Some(x) = cli.x {
        config.x_values = x;
    }
    if let Some(a) = cli.lattice_scale {
        config.lattice_scales = a;
    }
    config.sequence = match cli.sequence {
        SequenceArg::Standard => "standard",
        SequenceArg::Statonly => "statonly",
        SequenceArg::Constant => "constant",
    }
    .to_string();
    config.grid = Grid::new(0.0, cli.grid_max, cli.grid_points)?;
    config.format = cli.format;
    config.output_path = cli.out;
    Ok(config)
}

fn execute(cli: Cli) -> Result<bool> {
    let config = build_config(cli)?;
    let report = qstancu_cli::run(&config)?;
    let sink: Box<dyn Write> = match &config.output_path {
        Some(path) => Box::new(File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match config.format {
        Format::Csv => write_csv(&report, &mut sink)?,
        Format::Json => write_json(&config, &report, &mut sink)?,
    }
    sink.flush()?;
    let s = report.summary();
    eprintln!("{} rows, {} failing, min slack {:e}", s.rows, s.failures, s.min_slack);
    Ok(s.all_pass)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
