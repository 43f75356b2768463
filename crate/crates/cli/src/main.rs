use std::path::{Path, PathBuf};
use std::process::ExitCode;

use angelesco_cli::error::{CliError, EXIT_VALIDATION};
use angelesco_cli::svg::{self, Series};
use angelesco_cli::{csv, run, RunConfig};
use angelesco_core::Method;
use clap::{Args, Parser, Subcommand};

/// Ray limits of recurrence coefficients for two-interval Angelesco systems.
#[derive(Parser)]
#[command(name = "angelesco", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute limit curves and write one CSV per method plus run.json.
    Compute(ConfigArgs),
    /// Run all methods and cross-checks; exit 1 if any check fails.
    Validate(ConfigArgs),
    /// Overlay CSV curves in a four-panel SVG.
    Plot {
        /// CSV files written by `compute`.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output SVG path.
        #[arg(long, short, default_value = "limits.svg")]
        out: PathBuf,
    },
}

/// `--config` plus one flag per configuration key, applied on top of the file.
#[derive(Args)]
struct ConfigArgs {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    interval1: Option<String>,
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    interval2: Option<String>,
    #[arg(long)]
    weight1: Option<String>,
    #[arg(long)]
    weight2: Option<String>,
    #[arg(long = "grid_points", alias = "grid-points")]
    grid_points: Option<String>,
    #[arg(long = "lattice_level", alias = "lattice-level")]
    lattice_level: Option<String>,
    #[arg(long = "snapshot_levels", alias = "snapshot-levels")]
    snapshot_levels: Option<String>,
    #[arg(long)]
    richardson: Option<String>,
    #[arg(long = "ode_steps", alias = "ode-steps")]
    ode_steps: Option<String>,
    #[arg(long = "eps_start", alias = "eps-start")]
    eps_start: Option<String>,
    /// Comma-separated `name:value` pairs.
    #[arg(long)]
    tolerances: Option<String>,
    #[arg(long = "exclude_margin", alias = "exclude-margin")]
    exclude_margin: Option<String>,
    /// Comma-separated subset of dis, ode, surface.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long = "output_dir", alias = "output-dir")]
    output_dir: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let overrides = [
            ("interval1", &self.interval1),
            ("interval2", &self.interval2),
            ("weight1", &self.weight1),
            ("weight2", &self.weight2),
            ("grid_points", &self.grid_points),
            ("lattice_level", &self.lattice_level),
            ("snapshot_levels", &self.snapshot_levels),
            ("richardson", &self.richardson),
            ("ode_steps", &self.ode_steps),
            ("eps_start", &self.eps_start),
            ("tolerances", &self.tolerances),
            ("exclude_margin", &self.exclude_margin),
            ("methods", &self.methods),
            ("output_dir", &self.output_dir),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.apply(key, v)
                    .map_err(|e| CliError::Config(format!("--{key}: {e}")))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn label_for(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn plot(inputs: &[PathBuf], out: &Path) -> Result<(), CliError> {
    let mut curves = Vec::new();
    for p in inputs {
        let text = std::fs::read_to_string(p).map_err(|e| CliError::Csv {
            path: p.display().to_string(),
            msg: e.to_string(),
        })?;
        let method = label_for(p).parse().unwrap_or(Method::Surface);
        curves.push((
            label_for(p),
            csv::parse(&text, method, &p.display().to_string())?,
        ));
    }
    let series: Vec<Series<'_>> = curves
        .iter()
        .map(|(l, c)| Series {
            label: l.clone(),
            curve: c,
        })
        .collect();
    std::fs::write(out, svg::render(&series))?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn main_inner(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Compute(args) => {
            let cfg = args.resolve()?;
            let computed = run::compute(&cfg, &cfg.methods)?;
            for path in run::write_compute(&cfg, &computed)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate(args) => {
            let cfg = args.resolve()?;
            let (computed, validation) = run::validate(&cfg)?;
            let path = run::write_validation(&cfg, &computed, &validation)?;
            for c in &validation.checks {
                let tag = if c.pass { "ok  " } else { "FAIL" };
                eprintln!(
                    "{tag} {}: {:.3e} (tolerance {:.1e})",
                    c.name, c.value, c.tolerance
                );
            }
            eprintln!("wrote {}", path.display());
            let failed = validation.failed();
            if failed.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                let names: Vec<&str> = failed.iter().map(|c| c.name.as_str()).collect();
                eprintln!("failed checks: {}", names.join(", "));
                Ok(ExitCode::from(EXIT_VALIDATION))
            }
        }
        Command::Plot { inputs, out } => {
            plot(&inputs, &out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
