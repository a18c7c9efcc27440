use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use discord_core::optimizer::Method;
use discord_core::runner::{
    self, ConfigOverrides, Family, OmegaLine, RunConfig, SweepSpec, CONFIG_ENV, EXIT_INPUT_ERROR, EXIT_OK,
};
use discord_core::states::FILE_TOL;

/// Classical correlation and quantum discord of two-party states.
#[derive(Parser, Debug)]
#[command(name = "qdiscord", version, about)]
struct Cli {
    /// JSON configuration file (defaults to $QDISCORD_CONFIG when set).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Correlation report for one state file.
    Compute {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        opts: RunFlags,
    },
    /// Sweep a state family and write a CSV.
    Sweep {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        start: f64,
        #[arg(long)]
        end: f64,
        #[arg(long)]
        step: f64,
        /// Bell-diagonal ω at parameter 0, as "c1,c2,c3".
        #[arg(long, value_parser = parse_triple)]
        omega_offset: Option<[f64; 3]>,
        /// Bell-diagonal dω/dp, as "c1,c2,c3".
        #[arg(long, value_parser = parse_triple)]
        omega_slope: Option<[f64; 3]>,
        /// Write a gnuplot script next to the CSV.
        #[arg(long)]
        plot_script: bool,
        #[command(flatten)]
        opts: RunFlags,
    },
    /// Brute-force grid minimum of the conditional entropy.
    Oracle {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        oracle_resolution: Option<usize>,
        #[arg(long)]
        tolerance_input: Option<f64>,
    },
    /// Check Hermiticity, trace and positivity of a state file.
    Validate {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        tolerance_input: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct RunFlags {
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also run the grid oracle and report the gap.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    oracle_resolution: Option<usize>,
    /// JSON report (compute) or CSV (sweep) destination.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tolerance_input: Option<f64>,
}

impl RunFlags {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            method: self.method,
            eta: self.eta,
            tol: self.tol,
            max_iter: self.max_iter,
            restarts: self.restarts,
            seed: self.seed,
            oracle: self.oracle.then_some(true),
            oracle_resolution: self.oracle_resolution,
            output_path: self.out.clone(),
            emit_plot_script: None,
            input_tolerance: self.tolerance_input,
        }
    }
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected three comma-separated numbers, got {}", v.len()))
}

fn config_path(explicit: Option<PathBuf>) -> Option<PathBuf> {
    explicit.or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from))
}

fn resolve(path: Option<&Path>, overrides: &ConfigOverrides) -> anyhow::Result<RunConfig> {
    Ok(runner::resolve_config(path, overrides)?)
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let cfg_path = config_path(cli.config);
    match cli.command {
        Command::Compute { state, opts } => {
            let cfg = resolve(cfg_path.as_deref(), &opts.overrides())?;
            let out = runner::cmd_compute(&state, &cfg)?;
            print!("{}", out.text);
            if let Some(p) = &cfg.output_path {
                println!("report written to {}", p.display());
            }
            Ok(out.exit_code)
        }
        Command::Sweep {
            family,
            start,
            end,
            step,
            omega_offset,
            omega_slope,
            plot_script,
            opts,
        } => {
            let mut overrides = opts.overrides();
            if plot_script {
                overrides.emit_plot_script = Some(true);
            }
            let cfg = resolve(cfg_path.as_deref(), &overrides)?;
            let omega = match (omega_offset, omega_slope) {
                (None, None) => None,
                (o, s) => {
                    let d = OmegaLine::default();
                    Some(OmegaLine {
                        offset: o.unwrap_or(d.offset),
                        slope: s.unwrap_or(d.slope),
                    })
                }
            };
            let spec = SweepSpec {
                family,
                param_start: start,
                param_end: end,
                param_step: step,
                omega,
            };
            let out = runner::cmd_sweep(&spec, &cfg)?;
            match &out.csv_path {
                Some(p) => eprintln!("{} rows written to {}", out.rows.len(), p.display()),
                None => print!("{}", out.csv),
            }
            if let Some(p) = &out.plot_path {
                eprintln!("plot script written to {}", p.display());
            }
            Ok(out.exit_code)
        }
        Command::Oracle {
            state,
            oracle_resolution,
            tolerance_input,
        } => {
            let overrides = ConfigOverrides {
                oracle_resolution,
                input_tolerance: tolerance_input,
                ..Default::default()
            };
            let cfg = resolve(cfg_path.as_deref(), &overrides)?;
            let (_, text) = runner::cmd_oracle(&state, cfg.oracle_resolution, cfg.input_tolerance)?;
            print!("{text}");
            Ok(EXIT_OK)
        }
        Command::Validate { state, tolerance_input } => {
            let report = runner::cmd_validate(&state, tolerance_input.unwrap_or(FILE_TOL))?;
            println!("{report}");
            Ok(if report.valid { EXIT_OK } else { EXIT_INPUT_ERROR })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT_ERROR as u8)
        }
    }
}
