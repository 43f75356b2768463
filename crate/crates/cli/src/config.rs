//! Run configuration: `key = value` lines, `#` comments, comma-separated lists.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use angelesco_core::{AngelescoSystem, Interval, Method, WeightKind};
use serde::Serialize;

use crate::error::CliError;

/// Comparison and diagnostic thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub ode_surface: f64,
    pub dis_surface: f64,
    pub dis_ode: f64,
    pub identity: f64,
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode_surface: 1e-4,
            dis_surface: 2e-2,
            dis_ode: 2e-2,
            identity: 1e-8,
            residual: 1e-3,
        }
    }
}

impl Tolerances {
    fn set(&mut self, name: &str, v: f64) -> Result<(), CliError> {
        let slot = match name {
            "ode_surface" => &mut self.ode_surface,
            "dis_surface" => &mut self.dis_surface,
            "dis_ode" => &mut self.dis_ode,
            "identity" => &mut self.identity,
            "residual" => &mut self.residual,
            _ => return Err(CliError::Config(format!("unknown tolerance `{name}`"))),
        };
        *slot = v;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub interval1: (f64, f64),
    pub interval2: (f64, f64),
    pub weight1: WeightKind,
    pub weight2: WeightKind,
    pub grid_points: usize,
    pub lattice_level: usize,
    /// Defaults to `lattice_level / 2` when unset.
    pub snapshot_levels: Option<Vec<usize>>,
    pub richardson: bool,
    pub ode_steps: usize,
    pub eps_start: f64,
    pub tolerances: Tolerances,
    pub exclude_margin: f64,
    pub methods: Vec<Method>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            interval1: (-2.0, 0.0),
            interval2: (0.0, 1.0),
            weight1: WeightKind::Chebyshev2,
            weight2: WeightKind::Chebyshev2,
            grid_points: 181,
            lattice_level: 1500,
            snapshot_levels: None,
            richardson: false,
            ode_steps: 10_000,
            eps_start: 1e-6,
            tolerances: Tolerances::default(),
            exclude_margin: 0.05,
            methods: Method::ALL.to_vec(),
            output_dir: PathBuf::from("out"),
        }
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn real(key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: `{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::Config(format!("{key}: `{v}` is not finite")));
    }
    Ok(x)
}

fn count(key: &str, v: &str) -> Result<usize, CliError> {
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: `{v}` is not a count")))?;
    if n == 0 {
        return Err(CliError::Config(format!("{key} must be positive")));
    }
    Ok(n)
}

fn pair(key: &str, v: &str) -> Result<(f64, f64), CliError> {
    let xs: Vec<&str> = list(v).collect();
    if xs.len() != 2 {
        return Err(CliError::Config(format!(
            "{key}: expected `lo, hi`, got `{v}`"
        )));
    }
    Ok((real(key, xs[0])?, real(key, xs[1])?))
}

impl RunConfig {
    /// Applies one `key = value` assignment.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key {
            "interval1" => self.interval1 = pair(key, v)?,
            "interval2" => self.interval2 = pair(key, v)?,
            "weight1" => {
                self.weight1 = v
                    .parse()
                    .map_err(|e| CliError::Config(format!("{key}: {e}")))?
            }
            "weight2" => {
                self.weight2 = v
                    .parse()
                    .map_err(|e| CliError::Config(format!("{key}: {e}")))?
            }
            "grid_points" => self.grid_points = count(key, v)?,
            "lattice_level" => self.lattice_level = count(key, v)?,
            "snapshot_levels" => {
                self.snapshot_levels = Some(
                    list(v)
                        .map(|x| {
                            x.parse().map_err(|_| {
                                CliError::Config(format!("{key}: `{x}` is not a level"))
                            })
                        })
                        .collect::<Result<_, _>>()?,
                )
            }
            "richardson" => {
                self.richardson = match v {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    _ => return Err(CliError::Config(format!("{key}: `{v}` is not a boolean"))),
                }
            }
            "ode_steps" => self.ode_steps = count(key, v)?,
            "eps_start" => self.eps_start = real(key, v)?,
            "tolerances" => {
                for item in list(v) {
                    let (name, x) = item.split_once(':').ok_or_else(|| {
                        CliError::Config(format!("{key}: expected `name:value`, got `{item}`"))
                    })?;
                    self.tolerances.set(name.trim(), real(key, x)?)?;
                }
            }
            "exclude_margin" => self.exclude_margin = real(key, v)?,
            "methods" => {
                self.methods = list(v)
                    .map(|m| {
                        m.parse()
                            .map_err(|e| CliError::Config(format!("{key}: {e}")))
                    })
                    .collect::<Result<_, _>>()?;
            }
            "output_dir" => self.output_dir = PathBuf::from(v),
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        cfg.merge_str(text)?;
        Ok(cfg)
    }

    /// Applies every assignment in `text` on top of the current values.
    pub fn merge_str(&mut self, text: &str) -> Result<(), CliError> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`", no + 1))
            })?;
            self.apply(key.trim(), value)
                .map_err(|e| CliError::Config(format!("line {}: {e}", no + 1)))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    pub fn system(&self) -> Result<AngelescoSystem, CliError> {
        let i1 = Interval::new(self.interval1.0, self.interval1.1)?;
        let i2 = Interval::new(self.interval2.0, self.interval2.1)?;
        Ok(AngelescoSystem::new(i1, i2, self.weight1, self.weight2)?)
    }

    pub fn snapshots(&self) -> Vec<usize> {
        self.snapshot_levels
            .clone()
            .unwrap_or_else(|| vec![self.lattice_level / 2])
    }

    /// Cross-field checks that single assignments cannot catch.
    pub fn validate(&self) -> Result<(), CliError> {
        self.system()?;
        if self.grid_points < 2 {
            return Err(CliError::Config("grid_points must be at least 2".into()));
        }
        if self.lattice_level < 2 {
            return Err(CliError::Config("lattice_level must be at least 2".into()));
        }
        if let Some(&bad) = self.snapshots().iter().find(|&&l| l > self.lattice_level) {
            return Err(CliError::Config(format!(
                "snapshot level {bad} exceeds lattice_level"
            )));
        }
        if !(self.eps_start > 0.0 && self.eps_start <= 1e-4) {
            return Err(CliError::Config("eps_start must lie in (0, 1e-4]".into()));
        }
        if self.exclude_margin < 0.0 {
            return Err(CliError::Config(
                "exclude_margin must be nonnegative".into(),
            ));
        }
        if self.methods.is_empty() {
            return Err(CliError::Config("no methods selected".into()));
        }
        Ok(())
    }

    /// The configuration in file syntax.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let t = &self.tolerances;
        let snaps: Vec<String> = self.snapshots().iter().map(usize::to_string).collect();
        let methods: Vec<&str> = self.methods.iter().map(Method::name).collect();
        let _ = writeln!(
            out,
            "interval1 = {}, {}",
            self.interval1.0, self.interval1.1
        );
        let _ = writeln!(
            out,
            "interval2 = {}, {}",
            self.interval2.0, self.interval2.1
        );
        let _ = writeln!(out, "weight1 = {}", self.weight1);
        let _ = writeln!(out, "weight2 = {}", self.weight2);
        let _ = writeln!(out, "grid_points = {}", self.grid_points);
        let _ = writeln!(out, "lattice_level = {}", self.lattice_level);
        let _ = writeln!(out, "snapshot_levels = {}", snaps.join(", "));
        let _ = writeln!(out, "richardson = {}", self.richardson);
        let _ = writeln!(out, "ode_steps = {}", self.ode_steps);
        let _ = writeln!(out, "eps_start = {:e}", self.eps_start);
        let _ = writeln!(
            out,
            "tolerances = ode_surface:{:e}, dis_surface:{:e}, dis_ode:{:e}, identity:{:e}, residual:{:e}",
            t.ode_surface, t.dis_surface, t.dis_ode, t.identity, t.residual
        );
        let _ = writeln!(out, "exclude_margin = {}", self.exclude_margin);
        let _ = writeln!(out, "methods = {}", methods.join(", "));
        let _ = writeln!(out, "output_dir = {}", self.output_dir.display());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!(c.grid_points, 181);
        assert_eq!(c.lattice_level, 1500);
        assert_eq!(c.snapshots(), vec![750]);
        assert_eq!(c.ode_steps, 10_000);
        assert_eq!(c.eps_start, 1e-6);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn parses_file_syntax() {
        let text = "# gapped pair\ninterval1 = -2, 0\ninterval2 = 0.25, 1  # second\n\nweight1 = uniform\n\
                    methods = surface, ode\ntolerances = dis_ode: 1e-3, identity:1e-9\nsnapshot_levels = 10, 20\n";
        let c = RunConfig::parse_str(text).unwrap();
        assert_eq!(c.interval2, (0.25, 1.0));
        assert_eq!(c.weight1, WeightKind::Uniform);
        assert_eq!(c.weight2, WeightKind::Chebyshev2);
        assert_eq!(c.methods, vec![Method::Surface, Method::Ode]);
        assert_eq!(c.tolerances.dis_ode, 1e-3);
        assert_eq!(c.tolerances.identity, 1e-9);
        assert_eq!(c.tolerances.ode_surface, 1e-4);
        assert_eq!(c.snapshots(), vec![10, 20]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::parse_str("grid_points = 0").is_err());
        assert!(RunConfig::parse_str("interval1 = 1").is_err());
        assert!(RunConfig::parse_str("colour = blue").is_err());
        assert!(RunConfig::parse_str("just text").is_err());
        assert!(RunConfig::parse_str("tolerances = wobble:1").is_err());
        let c = RunConfig::parse_str("interval1 = -1, 0.5\ninterval2 = 0, 1").unwrap();
        assert!(c.validate().is_err());
        let c = RunConfig::parse_str("methods = ").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut c = RunConfig::default();
        c.apply("interval2", "0.25, 1").unwrap();
        c.apply("tolerances", "residual:2e-3").unwrap();
        let back = RunConfig::parse_str(&c.to_text()).unwrap();
        assert_eq!(back.interval2, c.interval2);
        assert_eq!(back.tolerances, c.tolerances);
        assert_eq!(back.snapshots(), c.snapshots());
    }
}
