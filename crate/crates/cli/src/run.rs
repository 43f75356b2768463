//! `compute` and `validate`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use angelesco_core::crossval::{
    compare, identity_checks, ode_residual_d2, ComparisonReport, Exclusion, FUNCTION_NAMES,
};
use angelesco_core::lattice::{consistency_residuals, curve_from_lattice, solve_lattice};
use angelesco_core::ode::{solve_curve, OdeSettings};
use angelesco_core::{uniform_grid, LimitCurve, Method, PlateauInfo, SurfaceSolver};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::csv;
use crate::error::CliError;

/// Spacing of the grid used for the finite-difference residual check.
const RESIDUAL_GRID: usize = 2001;
const RESIDUAL_STEP: f64 = 1e-3;

/// Curves of one run, keyed by method, with per-method diagnostics.
pub struct Computed {
    pub curves: BTreeMap<Method, LimitCurve>,
    pub plateau: PlateauInfo,
    pub plateau_user: [f64; 4],
    pub diagnostics: BTreeMap<String, Value>,
}

fn plateau_of(cfg: &RunConfig) -> Result<(SurfaceSolver, PlateauInfo), CliError> {
    let solver = SurfaceSolver::new(&cfg.system()?)?;
    let info = solver.plateau;
    Ok((solver, info))
}

fn run_method(
    cfg: &RunConfig,
    method: Method,
    solver: &SurfaceSolver,
    grid: &[f64],
) -> Result<(LimitCurve, Value), CliError> {
    let sys = cfg.system()?;
    let t0 = Instant::now();
    let (curve, extra) = match method {
        Method::Surface => (solver.curve(grid)?, json!({})),
        Method::Ode => {
            let settings = OdeSettings {
                steps_per_unit: cfg.ode_steps,
                eps: cfg.eps_start,
            };
            let (c1, c2) = (solver.plateau.c1, solver.plateau.c2);
            let (curve, fwd, bwd) = solve_curve(&sys, c1, c2, grid, &settings)?;
            (
                curve,
                json!({ "forward_nodes": fwd.states.len(), "backward_nodes": bwd.states.len() }),
            )
        }
        Method::Dis => {
            let mut snaps = cfg.snapshots();
            if cfg.richardson {
                snaps.push(cfg.lattice_level / 2);
            }
            let lat = solve_lattice(&sys, cfg.lattice_level, &snaps)?;
            let stats = consistency_residuals(&lat);
            let curve = curve_from_lattice(&lat, grid, cfg.richardson)?;
            let tail: Vec<_> = stats.per_level.iter().rev().take(5).rev().collect();
            (
                curve,
                json!({
                    "max_axis_residual": stats.max_axis_b,
                    "max_interior_residual": stats.max_interior,
                    "last_levels": tail,
                    "snapshots": lat.snapshots.keys().collect::<Vec<_>>(),
                }),
            )
        }
    };
    let ms = t0.elapsed().as_secs_f64() * 1e3;
    let diag = json!({
        "points": curve.len(),
        "meta": curve.meta,
        "details": extra,
        "elapsed_ms": ms,
    });
    Ok((curve, diag))
}

/// Runs `methods` over the configured grid. Methods run on separate threads;
/// results are collected in a fixed order.
pub fn compute(cfg: &RunConfig, methods: &[Method]) -> Result<Computed, CliError> {
    cfg.validate()?;
    if methods.is_empty() {
        return Err(CliError::Config("no methods selected".into()));
    }
    let grid = uniform_grid(cfg.grid_points)?;
    let (solver, plateau) = plateau_of(cfg)?;
    let results: Vec<Result<(Method, LimitCurve, Value), CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = methods
            .iter()
            .map(|&m| {
                let (solver, grid) = (&solver, &grid);
                scope.spawn(move || run_method(cfg, m, solver, grid).map(|(c, d)| (m, c, d)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("method thread panicked"))
            .collect()
    });
    let mut curves = BTreeMap::new();
    let mut diagnostics = BTreeMap::new();
    for r in results {
        let (m, c, d) = r?;
        curves.insert(m, c);
        diagnostics.insert(m.name().to_string(), d);
    }
    let plateau_user = solver.plateau_point()?.values();
    Ok(Computed {
        curves,
        plateau,
        plateau_user,
        diagnostics,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| {
        CliError::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn plateau_json(c: &Computed) -> Value {
    let p = &c.plateau;
    let names = FUNCTION_NAMES;
    let values: BTreeMap<&str, f64> = names.iter().copied().zip(c.plateau_user).collect();
    json!({
        "c1": p.c1,
        "c2": p.c2,
        "s_alpha_direct": p.s_alpha_direct,
        "s_alpha_reflected": p.s_alpha_reflected,
        "values": values,
    })
}

/// Writes one CSV per method and a `run.json` sidecar. Returns written paths.
pub fn write_compute(cfg: &RunConfig, c: &Computed) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(&cfg.output_dir)?;
    let mut written = Vec::new();
    for (m, curve) in &c.curves {
        let path = cfg.output_dir.join(format!("{}.csv", m.name()));
        write(&path, &csv::emit(curve))?;
        written.push(path);
    }
    let sidecar = json!({
        "config": cfg,
        "plateau": plateau_json(c),
        "methods": c.diagnostics,
    });
    let path = cfg.output_dir.join("run.json");
    write(&path, &serde_json::to_string_pretty(&sidecar)?)?;
    written.push(path);
    Ok(written)
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn pair_json(name: &str, r: &ComparisonReport, tol: f64) -> Value {
    let functions: BTreeMap<&str, Value> = FUNCTION_NAMES
        .iter()
        .zip(&r.functions)
        .map(|(n, f)| {
            (
                *n,
                json!({ "maxAbs": f.max_abs, "meanAbs": f.mean_abs, "argmax": f.argmax }),
            )
        })
        .collect();
    json!({
        "pair": name,
        "functions": functions,
        "maxAbs": r.max_abs(),
        "points": r.points,
        "excluded": r.excluded,
        "tolerance": tol,
        "pass": r.passes(tol),
    })
}

pub struct Validation {
    pub report: Value,
    pub checks: Vec<Check>,
}

impl Validation {
    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// Runs all three methods and every cross-check.
pub fn validate(cfg: &RunConfig) -> Result<(Computed, Validation), CliError> {
    let c = compute(cfg, &Method::ALL)?;
    let tol = cfg.tolerances;
    let (c1, c2) = (c.plateau.c1, c.plateau.c2);
    let exclusion = (c1 < c2 && cfg.exclude_margin > 0.0).then_some(Exclusion {
        c1,
        c2,
        margin: cfg.exclude_margin,
    });
    let mut checks = Vec::new();
    let mut pairs = Vec::new();
    for (a, b, t) in [
        (Method::Ode, Method::Surface, tol.ode_surface),
        (Method::Dis, Method::Surface, tol.dis_surface),
        (Method::Dis, Method::Ode, tol.dis_ode),
    ] {
        let name = format!("{}-{}", a.name(), b.name());
        let r = compare(&c.curves[&a], &c.curves[&b], exclusion)?;
        checks.push(Check {
            name: format!("compare {name}"),
            value: r.max_abs(),
            tolerance: t,
            pass: r.passes(t),
        });
        pairs.push(pair_json(&name, &r, t));
    }

    let solver = SurfaceSolver::new(&cfg.system()?)?;
    let surf = &c.curves[&Method::Surface];
    let id = identity_checks(surf, Some((c1, c2)), 0.0);
    checks.push(Check {
        name: "identity surface".into(),
        value: id.max_identity,
        tolerance: tol.identity,
        pass: id.passes(tol.identity),
    });

    let fine = solver.curve(&uniform_grid(RESIDUAL_GRID)?)?;
    let res = ode_residual_d2(&fine, RESIDUAL_STEP, Some((c1, c2)))?;
    checks.push(Check {
        name: "residual surface".into(),
        value: res.max(),
        tolerance: tol.residual,
        pass: res.max() <= tol.residual,
    });

    let junction = c.curves[&Method::Ode]
        .meta
        .get("junction_mismatch")
        .copied()
        .unwrap_or(0.0);
    let report = json!({
        "comparisons": pairs,
        "exclusion": exclusion,
        "identity": id,
        "residual": res,
        "ode_junction_mismatch": junction,
        "checks": checks,
        "pass": checks.iter().all(|c| c.pass),
    });
    Ok((c, Validation { report, checks }))
}

pub fn write_validation(
    cfg: &RunConfig,
    c: &Computed,
    v: &Validation,
) -> Result<PathBuf, CliError> {
    write_compute(cfg, c)?;
    let path = cfg.output_dir.join("validation.json");
    write(&path, &serde_json::to_string_pretty(&v.report)?)?;
    Ok(path)
}
