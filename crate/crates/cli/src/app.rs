//! Command-line surface and exit-code policy.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mrtnet_core::mcsim::{DEFAULT_TRUNCATION_TOLERANCE, DEFAULT_WINDOW_RADIUS};

use crate::config::{parse_config, ConfigError, McSpec, SweepSpec, WindowChoice};
use crate::plot::emit_plot_script;
use crate::sweep::{run_sweep, SweepError};
use crate::validate::validate;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "mrtnet", version, about = "Success probability and ASE of MRT downlinks in Poisson networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a configured sweep and write it as CSV.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare analytic curves with simulation and write a report.
    Validate {
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Emit a matplotlib script for a sweep CSV.
    Plot {
        csv: PathBuf,
        /// psuc, ase, pdf_g or rayleigh_quotient_pdf.
        #[arg(long)]
        mode: String,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Master seed for the simulator.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of Monte Carlo trials per variant.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Simulation disk radius, or `auto` to size it from the truncation tolerance.
    #[arg(long)]
    pub window_radius: Option<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutArgs {
    /// Output file. Defaults to stdout, or to a file named after the input
    /// inside the output directory when one is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Default output directory.
    #[arg(long, env = "MRTNET_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("validation failed")]
    ValidationFailed,
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::ValidationFailed => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Config(m) => CliError::Config(m),
            SweepError::Numerical(e) => CliError::Numerical(e.to_string()),
        }
    }
}

/// Applies command-line overrides to the simulation settings.
pub fn apply_overrides(spec: &mut SweepSpec, run: &RunArgs) -> Result<(), CliError> {
    let window = match run.window_radius.as_deref() {
        None => None,
        Some("auto") => Some(WindowChoice::Auto),
        Some(s) => match s.parse::<f64>() {
            Ok(r) if r > 0.0 && r.is_finite() => Some(WindowChoice::Fixed(r)),
            _ => return Err(CliError::Config(format!("--window-radius must be positive or `auto`, got `{s}`"))),
        },
    };
    if spec.mc.is_none() {
        match run.trials {
            Some(_) => {
                spec.mc = Some(McSpec {
                    trials: 1,
                    seed: 0,
                    window: WindowChoice::Fixed(DEFAULT_WINDOW_RADIUS),
                    truncation_tolerance: DEFAULT_TRUNCATION_TOLERANCE,
                })
            }
            None if run.seed.is_some() || window.is_some() => {
                return Err(CliError::Config("--seed/--window-radius need simulation enabled (mc.trials or --trials)".into()))
            }
            None => return Ok(()),
        }
    }
    let mc = spec.mc.as_mut().expect("set above");
    if let Some(t) = run.trials {
        if t == 0 {
            return Err(CliError::Config("--trials must be positive".into()));
        }
        mc.trials = t;
    }
    if let Some(s) = run.seed {
        mc.seed = s;
    }
    if let Some(w) = window {
        mc.window = w;
    }
    Ok(())
}

fn destination(out: &OutArgs, input: &Path, extension: &str) -> Option<PathBuf> {
    if let Some(p) = &out.out {
        return Some(p.clone());
    }
    let dir = out.out_dir.as_ref()?;
    let stem = input.file_stem().map(|s| s.to_os_string()).unwrap_or_else(|| "out".into());
    Some(dir.join(stem).with_extension(extension))
}

fn emit(out: &OutArgs, input: &Path, extension: &str, text: &str) -> Result<(), CliError> {
    match destination(out, input, extension) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| CliError::Config(format!("cannot create {}: {e}", parent.display())))?;
            }
            fs::write(&path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep { config, run } => {
            let mut spec = parse_config(&config)?;
            apply_overrides(&mut spec, &run)?;
            let table = run_sweep(&spec)?;
            emit(&run.out, &config, "csv", &table.to_csv())?;
            if table.failures.is_empty() {
                Ok(())
            } else {
                for f in &table.failures {
                    eprintln!("warning: {f}");
                }
                Err(CliError::Numerical(format!("{} cell(s) could not be computed", table.failures.len())))
            }
        }
        Command::Validate { config, run } => {
            let mut spec = parse_config(&config)?;
            apply_overrides(&mut spec, &run)?;
            let report = validate(&spec)?;
            emit(&run.out, &config, "report.txt", &report.text)?;
            if report.passed {
                Ok(())
            } else {
                Err(CliError::ValidationFailed)
            }
        }
        Command::Plot { csv, mode, out } => {
            let script = emit_plot_script(&csv, &mode).map_err(|e| CliError::Config(e.to_string()))?;
            emit(&out, &csv, "py", &script)
        }
    }
}

pub fn main_with_exit_code() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("mrtnet: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config_str;

    fn spec() -> SweepSpec {
        parse_config_str("mode = psuc_vs_threshold\nsweep.start=0\nsweep.stop=1\nsweep.step=1\nvariants=2:0.5\n").unwrap()
    }

    #[test]
    fn trials_flag_enables_simulation() {
        let mut s = spec();
        let run = RunArgs {
            trials: Some(500),
            seed: Some(9),
            window_radius: Some("auto".into()),
            ..RunArgs::default()
        };
        apply_overrides(&mut s, &run).unwrap();
        let mc = s.mc.unwrap();
        assert_eq!((mc.trials, mc.seed, mc.window), (500, 9, WindowChoice::Auto));
    }

    #[test]
    fn seed_without_simulation_rejected() {
        let mut s = spec();
        let run = RunArgs {
            seed: Some(1),
            ..RunArgs::default()
        };
        assert_eq!(apply_overrides(&mut s, &run).unwrap_err().exit_code(), EXIT_CONFIG);
    }

    #[test]
    fn bad_window_rejected() {
        let mut s = spec();
        let run = RunArgs {
            trials: Some(5),
            window_radius: Some("-3".into()),
            ..RunArgs::default()
        };
        assert!(apply_overrides(&mut s, &run).is_err());
    }

    #[test]
    fn destination_prefers_explicit_path() {
        let out = OutArgs {
            out: Some("a/b.csv".into()),
            out_dir: Some("dir".into()),
        };
        assert_eq!(destination(&out, Path::new("x/psuc.cfg"), "csv"), Some(PathBuf::from("a/b.csv")));
        let out = OutArgs {
            out: None,
            out_dir: Some("dir".into()),
        };
        assert_eq!(destination(&out, Path::new("x/psuc.cfg"), "csv"), Some(PathBuf::from("dir/psuc.csv")));
        assert_eq!(destination(&OutArgs::default(), Path::new("f.cfg"), "csv"), None);
    }
}
