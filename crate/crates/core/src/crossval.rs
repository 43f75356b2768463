//! Diagnostics across methods: curve comparison, the four first-order
//! relations between the limit functions, the `(B2 - B1)^2` identity and
//! lattice convergence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{diagonal_value, solve_lattice};
use crate::normalize::{AngelescoSystem, LimitCurve, LimitPoint};
use crate::surface::SurfaceSolver;

/// Names of the four limit functions in [`LimitPoint::values`] order.
pub const FUNCTION_NAMES: [&str; 4] = ["A1", "A2", "B1", "B2"];

/// Radius of the neighborhoods of `{0, c1, c2, 1}` skipped by
/// [`ode_residual_d2`].
pub const SPLICE_RADIUS: f64 = 0.01;

/// Default distance from `[c1, c2]` below which comparisons are skipped.
pub const DEFAULT_EXCLUDE_MARGIN: f64 = 0.05;

/// Grid points with `c1 - margin < s < c2 + margin` are left out of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub c1: f64,
    pub c2: f64,
    pub margin: f64,
}

impl Exclusion {
    pub fn skips(&self, s: f64) -> bool {
        s > self.c1 - self.margin && s < self.c2 + self.margin
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionDiff {
    pub max_abs: f64,
    pub mean_abs: f64,
    /// `s` at which `max_abs` occurs.
    pub argmax: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Differences of A1, A2, B1, B2.
    pub functions: [FunctionDiff; 4],
    pub points: usize,
    pub excluded: usize,
    /// True when the second curve was linearly resampled onto the first grid.
    pub resampled: bool,
    pub exclusion: Option<Exclusion>,
}

impl ComparisonReport {
    pub fn max_abs(&self) -> f64 {
        self.functions.iter().map(|f| f.max_abs).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }
}

/// Absolute differences of `a` and `b` on the grid of `a`.
///
/// When the grids differ, `b` is interpolated linearly and points of `a`
/// outside the range of `b` are dropped.
pub fn compare(
    a: &LimitCurve,
    b: &LimitCurve,
    exclusion: Option<Exclusion>,
) -> Result<ComparisonReport> {
    let resampled = a.grid() != b.grid();
    let mut sums = [0.0; 4];
    let mut functions = [FunctionDiff {
        max_abs: 0.0,
        mean_abs: 0.0,
        argmax: f64::NAN,
    }; 4];
    let mut points = 0;
    let mut excluded = 0;
    for (i, p) in a.points.iter().enumerate() {
        if exclusion.is_some_and(|e| e.skips(p.s)) {
            excluded += 1;
            continue;
        }
        let q = if resampled {
            match b.interpolate(p.s) {
                Some(q) => q,
                None => continue,
            }
        } else {
            b.points[i]
        };
        let (va, vb) = (p.values(), q.values());
        for j in 0..4 {
            let d = (va[j] - vb[j]).abs();
            sums[j] += d;
            if d > functions[j].max_abs || functions[j].argmax.is_nan() {
                functions[j].max_abs = d;
                functions[j].argmax = p.s;
            }
        }
        points += 1;
    }
    if points == 0 {
        return Err(Error::invalid("curves have no grid points in common"));
    }
    for j in 0..4 {
        functions[j].mean_abs = sums[j] / points as f64;
    }
    Ok(ComparisonReport {
        functions,
        points,
        excluded,
        resampled,
        exclusion,
    })
}

/// Largest relative residual of each of the four relations
///
/// ```text
/// B1' s + B2' (1 - s)
/// B1 B1' s + B2 B2' (1 - s) + A1' + A2'
/// A1 (B1' - B2') (1 - s) + A1' (B1 - B2) s
/// A2 (B1' - B2') s + A2' (B1 - B2) (1 - s)
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub h: f64,
    pub max_relative: [f64; 4],
    /// `s` at which each maximum occurs.
    pub argmax: [f64; 4],
    pub points: usize,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.max_relative.iter().copied().fold(0.0, f64::max)
    }
}

/// Evaluates the relations with central differences of step `h` read off the
/// grid of `c`, which must be uniform with a spacing dividing `h`. Points
/// within [`SPLICE_RADIUS`] of `0`, `1` and the given plateau bounds are
/// skipped. Each residual is divided by `max(1, largest term)`.
pub fn ode_residual_d2(
    c: &LimitCurve,
    h: f64,
    plateau: Option<(f64, f64)>,
) -> Result<ResidualReport> {
    let pts = &c.points;
    if pts.len() < 3 || !(h > 0.0) {
        return Err(Error::invalid(
            "residual check needs h > 0 and at least three points",
        ));
    }
    let spacing = (pts[pts.len() - 1].s - pts[0].s) / (pts.len() - 1) as f64;
    let uniform = pts
        .windows(2)
        .all(|w| ((w[1].s - w[0].s) - spacing).abs() <= 1e-9 * spacing.max(1e-300));
    if !uniform {
        return Err(Error::invalid("residual check needs a uniform grid"));
    }
    let ratio = h / spacing;
    let stride = ratio.round() as usize;
    if stride == 0 || (ratio - stride as f64).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "grid too coarse: spacing {spacing} does not divide h = {h}"
        )));
    }
    let mut avoid = vec![0.0, 1.0];
    if let Some((c1, c2)) = plateau {
        avoid.push(c1);
        avoid.push(c2);
    }
    let mut report = ResidualReport {
        h,
        max_relative: [0.0; 4],
        argmax: [f64::NAN; 4],
        points: 0,
    };
    for i in stride..pts.len().saturating_sub(stride) {
        let p = pts[i];
        let s = p.s;
        if avoid.iter().any(|&x| (s - x).abs() < SPLICE_RADIUS) {
            continue;
        }
        if let Some((c1, c2)) = plateau {
            if s > c1 && s < c2 {
                continue;
            }
        }
        let (lo, hi) = (pts[i - stride].values(), pts[i + stride].values());
        let mut d = [0.0; 4];
        for j in 0..4 {
            d[j] = (hi[j] - lo[j]) / (2.0 * h);
        }
        let [da1, da2, db1, db2] = d;
        let t = 1.0 - s;
        let terms: [&[f64]; 4] = [
            &[db1 * s, db2 * t],
            &[p.b1 * db1 * s, p.b2 * db2 * t, da1, da2],
            &[p.a1 * (db1 - db2) * t, da1 * (p.b1 - p.b2) * s],
            &[p.a2 * (db1 - db2) * s, da2 * (p.b1 - p.b2) * t],
        ];
        for (r, group) in terms.iter().enumerate() {
            let sum: f64 = group.iter().sum();
            let scale = group.iter().map(|x| x.abs()).fold(1.0, f64::max);
            let rel = sum.abs() / scale;
            if rel > report.max_relative[r] || report.argmax[r].is_nan() {
                report.max_relative[r] = rel;
                report.argmax[r] = s;
            }
        }
        report.points += 1;
    }
    if report.points == 0 {
        return Err(Error::invalid("no grid points left after exclusions"));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// Largest `|(B2 - B1)^2 - A1/s^2 - A2/(1-s)^2| / max(1, (B2 - B1)^2)`
    /// over interior grid points outside the plateau.
    pub max_identity: f64,
    pub argmax: f64,
    /// Smallest `B2 - B1` over the grid.
    pub min_gap: f64,
    /// `|A1|` at `s = 0` and `|A2|` at `s = 1`, when sampled.
    pub a1_at0: Option<f64>,
    pub a2_at1: Option<f64>,
}

impl IdentityReport {
    pub fn passes(&self, tol: f64) -> bool {
        let edge = |v: Option<f64>| v.map_or(true, |x| x <= tol);
        self.max_identity <= tol && self.min_gap > 0.0 && edge(self.a1_at0) && edge(self.a2_at1)
    }
}

/// Checks the identity `(B2 - B1)^2 = A1/s^2 + A2/(1-s)^2` away from
/// `[c1, c2]` and skipping points closer than `edge` to `0` or `1`, plus
/// `B2 > B1` everywhere and the vanishing of `A1(0)`, `A2(1)`.
pub fn identity_checks(c: &LimitCurve, plateau: Option<(f64, f64)>, edge: f64) -> IdentityReport {
    let mut rep = IdentityReport {
        max_identity: 0.0,
        argmax: f64::NAN,
        min_gap: f64::INFINITY,
        a1_at0: None,
        a2_at1: None,
    };
    for p in &c.points {
        rep.min_gap = rep.min_gap.min(p.b2 - p.b1);
        if p.s == 0.0 {
            rep.a1_at0 = Some(p.a1.abs());
        }
        if p.s == 1.0 {
            rep.a2_at1 = Some(p.a2.abs());
        }
        if p.s < edge.max(f64::MIN_POSITIVE) || p.s > 1.0 - edge.max(f64::MIN_POSITIVE) {
            continue;
        }
        if plateau.is_some_and(|(c1, c2)| p.s >= c1 && p.s <= c2) {
            continue;
        }
        let g2 = (p.b2 - p.b1).powi(2);
        let rhs = p.a1 / (p.s * p.s) + p.a2 / ((1.0 - p.s) * (1.0 - p.s));
        let r = (g2 - rhs).abs() / g2.max(1.0);
        if r > rep.max_identity || rep.argmax.is_nan() {
            rep.max_identity = r;
            rep.argmax = p.s;
        }
    }
    rep
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub level: usize,
    /// Lattice values at the level, A1, A2, B1, B2.
    pub values: [f64; 4],
    /// `|values - reference|`.
    pub errors: [f64; 4],
    /// Richardson combination of levels `m` and `m / 2`, with its errors.
    pub richardson: [f64; 4],
    pub richardson_errors: [f64; 4],
}

impl ConvergenceRow {
    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_richardson_error(&self) -> f64 {
        self.richardson_errors.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub s: f64,
    pub reference: LimitPoint,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Whether the largest plain error decreases strictly with the level.
    pub fn monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].max_error() < w[0].max_error())
    }
}

/// Lattice values at `s` for each level in `levels`, against the surface
/// reference. One lattice run to the largest level serves all rows.
pub fn convergence_study(
    sys: &AngelescoSystem,
    s: f64,
    levels: &[usize],
) -> Result<ConvergenceTable> {
    if levels.is_empty() || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "levels must be nonempty and strictly increasing",
        ));
    }
    if levels[0] < 2 {
        return Err(Error::invalid("levels must be at least 2"));
    }
    let reference = SurfaceSolver::new(sys)?.limits_at(s)?;
    let top = *levels.last().unwrap();
    let mut snaps: Vec<usize> = levels.iter().flat_map(|&m| [m, m / 2]).collect();
    snaps.sort_unstable();
    snaps.dedup();
    let lat = solve_lattice(sys, top, &snaps)?;
    let target = reference.values();
    let err = |v: &[f64; 4]| {
        let mut e = [0.0; 4];
        for j in 0..4 {
            e[j] = (v[j] - target[j]).abs();
        }
        e
    };
    let rows = levels
        .iter()
        .map(|&m| {
            let values = diagonal_value(&lat.snapshots[&m], s);
            let half = diagonal_value(&lat.snapshots[&(m / 2)], s);
            let (mf, hf) = (m as f64, (m / 2) as f64);
            let mut richardson = [0.0; 4];
            for j in 0..4 {
                richardson[j] = (mf * values[j] - hf * half[j]) / (mf - hf);
            }
            ConvergenceRow {
                level: m,
                values,
                errors: err(&values),
                richardson,
                richardson_errors: err(&richardson),
            }
        })
        .collect();
    Ok(ConvergenceTable { s, reference, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::{uniform_grid, Method, WeightKind};

    fn line(grid: &[f64], f: impl Fn(f64) -> [f64; 4]) -> LimitCurve {
        let pts = grid
            .iter()
            .map(|&s| LimitPoint::from_values(s, f(s)))
            .collect();
        LimitCurve::new(pts, Method::Surface).unwrap()
    }

    #[test]
    fn compare_with_itself_is_zero() {
        let g = uniform_grid(11).unwrap();
        let c = line(&g, |s| [s, 1.0 - s, -1.0, 1.0 + s]);
        let r = compare(&c, &c, None).unwrap();
        assert_eq!(r.max_abs(), 0.0);
        assert!(!r.resampled);
        assert_eq!(r.points, 11);
    }

    #[test]
    fn compare_symmetric_and_resampled() {
        let g = uniform_grid(11).unwrap();
        let a = line(&g, |s| [s, 0.5 * (1.0 - s), -1.0, 1.0]);
        let b = line(&g, |s| [1.1 * s, 0.5 * (1.0 - s), -1.0, 1.0 + 0.01 * s]);
        let ab = compare(&a, &b, None).unwrap();
        let ba = compare(&b, &a, None).unwrap();
        assert_eq!(ab.max_abs(), ba.max_abs());
        assert!((ab.functions[0].max_abs - 0.1).abs() < 1e-15);
        assert_eq!(ab.functions[0].argmax, 1.0);
        let fine = line(&uniform_grid(101).unwrap(), |s| {
            [s, 0.5 * (1.0 - s), -1.0, 1.0]
        });
        let r = compare(&fine, &a, None).unwrap();
        assert!(r.resampled && r.max_abs() < 1e-15);
    }

    #[test]
    fn compare_exclusion_and_empty() {
        let g: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
        let a = line(&g, |_| [0.1, 0.1, -1.0, 1.0]);
        let b = line(&g, |s| {
            [if s > 0.41 && s < 0.59 { 5.0 } else { 0.1 }, 0.1, -1.0, 1.0]
        });
        let ex = Exclusion {
            c1: 0.46,
            c2: 0.54,
            margin: 0.05,
        };
        let r = compare(&a, &b, Some(ex)).unwrap();
        assert_eq!(r.max_abs(), 0.0);
        assert_eq!(r.excluded, 3);
        let far = line(&[2.0, 3.0].map(|x: f64| x / 4.0), |_| [0.1, 0.1, -1.0, 1.0]);
        let near = line(&[0.05, 0.1], |_| [0.1, 0.1, -1.0, 1.0]);
        assert!(compare(&far, &near, None).is_err());
    }

    #[test]
    fn residual_of_constant_curve_vanishes() {
        let g: Vec<f64> = (100..=900).map(|i| i as f64 / 1000.0).collect();
        let c = line(&g, |_| [0.3, 0.2, -1.0, 0.5]);
        let r = ode_residual_d2(&c, 1e-3, None).unwrap();
        assert_eq!(r.max(), 0.0);
        assert!(ode_residual_d2(&c, 1e-4, None).is_err());
        assert!(ode_residual_d2(&c, 1.5e-3, None).is_err());
    }

    #[test]
    fn residual_discriminates_noise() {
        let sys =
            AngelescoSystem::from_endpoints(-2.0, 0.0, 0.0, 1.0, WeightKind::Chebyshev2).unwrap();
        let solver = SurfaceSolver::new(&sys).unwrap();
        let g = uniform_grid(1001).unwrap();
        let c = solver.curve(&g).unwrap();
        let pl = Some((solver.plateau.c1, solver.plateau.c2));
        let clean = ode_residual_d2(&c, 1e-3, pl).unwrap();
        assert!(clean.max() < 1e-3, "{clean:?}");
        // deterministic pseudo-noise of amplitude 1e-2
        let mut state = 12345u64;
        let mut noisy = c.clone();
        for p in &mut noisy.points {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            p.a1 += 1e-2 * (2.0 * u - 1.0) * p.a1.min(1.0);
        }
        let bad = ode_residual_d2(&noisy, 1e-3, pl).unwrap();
        assert!(bad.max() > 1e-1, "{bad:?}");
    }

    #[test]
    fn identity_on_surface_curve() {
        let sys =
            AngelescoSystem::from_endpoints(-2.0, 0.0, 0.25, 1.0, WeightKind::Chebyshev2).unwrap();
        let solver = SurfaceSolver::new(&sys).unwrap();
        let c = solver.curve(&uniform_grid(101).unwrap()).unwrap();
        let rep = identity_checks(&c, Some((solver.plateau.c1, solver.plateau.c2)), 0.0);
        assert!(rep.max_identity < 1e-8, "{rep:?}");
        assert!(rep.min_gap > 0.0);
        assert_eq!(rep.a1_at0, Some(0.0));
        assert!(rep.passes(1e-8));
    }

    #[test]
    fn convergence_table_shape() {
        let sys =
            AngelescoSystem::from_endpoints(-2.0, 0.0, 0.0, 1.0, WeightKind::Chebyshev2).unwrap();
        let t = convergence_study(&sys, 0.5, &[20, 40, 80]).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(t.monotone(), "{t:?}");
        assert!(convergence_study(&sys, 0.5, &[40, 20]).is_err());
        // s = 1 reduces to the first measure's own coefficients
        let edge = convergence_study(&sys, 1.0, &[20]).unwrap();
        assert_eq!(edge.rows[0].values[0], 0.25);
    }
}
