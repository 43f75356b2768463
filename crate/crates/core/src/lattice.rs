//! Nearest-neighbor recurrence coefficients on the lattice `Z_+^2`, filled
//! diagonal by diagonal from the axis data through the compatibility
//! conditions, and their ray limits.
//!
//! Sites on the diagonal `|n| = L` are stored by their first index `k`, so the
//! site `(k, L - k)` sits at position `k`. Going from level `L` to `L + 1`:
//!
//! * a-phase: `a1(k,l) = a1(k,l-1) (b2-b1)(k,l-1) / (b2-b1)(k-1,l-1)` and
//!   `a2(k,l) = a2(k-1,l) (b2-b1)(k-1,l) / (b2-b1)(k-1,l-1)` in the interior,
//!   axis values on the boundary;
//! * b-phase: at every level-`L` site `n` the linear pair
//!   `b1(n+e2) - b1(n) = b2(n+e1) - b2(n)`,
//!   `b1(n+e2) b2(n) - b1(n) b2(n+e1) = S(n+e2) - S(n+e1)` (with `S = a1 + a2`)
//!   is solved in closed form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::{AngelescoSystem, LimitCurve, LimitPoint, Method};
use crate::scalar::{axis_data, Axis};

/// Smallest admissible `|b2 - b1|` before a division is refused.
pub const SEPARATION_GUARD: f64 = 1e-12;

/// Coefficients at one multi-index.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NnrrSite {
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl NnrrSite {
    fn gap(&self) -> f64 {
        self.b2 - self.b1
    }
}

/// Per-level consistency monitor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelResidual {
    pub level: usize,
    /// Largest difference between a propagated axis `b` and the axis data.
    pub axis_b: f64,
    /// Largest defect of the two `b` relations re-evaluated on stored values.
    pub interior: f64,
}

/// Summary of [`LevelResidual`]s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub max_axis_b: f64,
    pub max_interior: f64,
    pub per_level: Vec<LevelResidual>,
}

/// Solved lattice: the top two diagonals plus requested snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct NnrrLattice {
    pub max_level: usize,
    /// Diagonal `|n| = max_level`, `max_level + 1` sites.
    pub top: Vec<NnrrSite>,
    /// Diagonal `|n| = max_level - 1`.
    pub below: Vec<NnrrSite>,
    pub snapshots: BTreeMap<usize, Vec<NnrrSite>>,
    pub residuals: Vec<LevelResidual>,
}

/// Fills levels `0..=m` of the lattice for `sys`, keeping full copies of the
/// diagonals listed in `snapshot_levels`.
pub fn solve_lattice(
    sys: &AngelescoSystem,
    m: usize,
    snapshot_levels: &[usize],
) -> Result<NnrrLattice> {
    if m < 2 {
        return Err(Error::invalid("solve_lattice needs m >= 2"));
    }
    if let Some(&bad) = snapshot_levels.iter().find(|&&l| l > m) {
        return Err(Error::invalid(format!(
            "snapshot level {bad} exceeds m = {m}"
        )));
    }
    let ax1 = axis_data(sys, Axis::First, m + 1)?;
    let ax2 = axis_data(sys, Axis::Second, m + 1)?;
    let mut snapshots = BTreeMap::new();
    let mut residuals = Vec::with_capacity(m);

    let origin = NnrrSite {
        b1: ax1.own_b[0],
        b2: ax2.own_b[0],
        a1: 0.0,
        a2: 0.0,
    };
    let mut below: Vec<NnrrSite> = Vec::new();
    let mut cur = vec![origin];
    if snapshot_levels.contains(&0) {
        snapshots.insert(0, cur.clone());
    }

    for level in 0..m {
        let next_level = level + 1;
        let mut next = vec![NnrrSite::default(); next_level + 1];

        // a-phase
        next[next_level].a1 = ax1.own_a[next_level];
        next[0].a2 = ax2.own_a[next_level];
        for k in 1..=level {
            let same = cur[k].gap();
            let diag = below[k - 1].gap();
            let left = cur[k - 1].gap();
            if diag.abs() < SEPARATION_GUARD {
                return Err(Error::numerical(format!(
                    "b-separation collapsed at site ({}, {})",
                    k - 1,
                    level - k
                )));
            }
            let a1 = cur[k].a1 * same / diag;
            let a2 = cur[k - 1].a2 * left / diag;
            if !(a1 > 0.0 && a2 > 0.0) {
                return Err(Error::numerical(format!(
                    "nonpositive interior a at site ({k}, {})",
                    next_level - k
                )));
            }
            next[k].a1 = a1;
            next[k].a2 = a2;
        }

        // b-phase
        let mut axis_defect = 0.0f64;
        for k in 0..=level {
            let n = cur[k];
            let gap = n.gap();
            if gap.abs() < SEPARATION_GUARD {
                return Err(Error::numerical(format!(
                    "b-separation collapsed at site ({k}, {})",
                    level - k
                )));
            }
            let up = &next[k]; // n + e2
            let right = &next[k + 1]; // n + e1
            let ds = (up.a1 + up.a2) - (right.a1 + right.a2);
            let b2_right = (ds - n.b1 * n.b2 + n.b2 * n.b2) / gap;
            let b1_up = b2_right + n.b1 - n.b2;
            if k == level {
                axis_defect = axis_defect.max((b2_right - ax1.cross_b[next_level]).abs());
                next[k + 1].b2 = ax1.cross_b[next_level];
            } else {
                next[k + 1].b2 = b2_right;
            }
            if k == 0 {
                axis_defect = axis_defect.max((b1_up - ax2.cross_b[next_level]).abs());
                next[0].b1 = ax2.cross_b[next_level];
            } else {
                next[k].b1 = b1_up;
            }
        }
        next[next_level].b1 = ax1.own_b[next_level];
        next[0].b2 = ax2.own_b[next_level];

        // re-evaluate both b relations on the stored values
        let mut interior = 0.0f64;
        for k in 0..=level {
            let (n, up, right) = (&cur[k], &next[k], &next[k + 1]);
            let r1 = (up.b1 - n.b1) - (right.b2 - n.b2);
            let ds = (up.a1 + up.a2) - (right.a1 + right.a2);
            let r2 = up.b1 * n.b2 - n.b1 * right.b2 - ds;
            let onaxis = k == 0 || k == level;
            if !onaxis {
                interior = interior.max(r1.abs()).max(r2.abs());
            }
        }

        residuals.push(LevelResidual {
            level: next_level,
            axis_b: axis_defect,
            interior,
        });
        below = std::mem::replace(&mut cur, next);
        if snapshot_levels.contains(&next_level) {
            snapshots.insert(next_level, cur.clone());
        }
    }

    Ok(NnrrLattice {
        max_level: m,
        top: cur,
        below,
        snapshots,
        residuals,
    })
}

/// Linear interpolation on a diagonal of `level + 1` sites at ray parameter `s`.
pub(crate) fn diagonal_value(diag: &[NnrrSite], s: f64) -> [f64; 4] {
    let level = diag.len() - 1;
    let x = s * level as f64;
    let k0 = (x.floor() as usize).min(level);
    let frac = x - k0 as f64;
    let at = |k: usize| {
        let d = diag[k];
        [d.a1, d.a2, d.b1, d.b2]
    };
    let v0 = at(k0);
    if frac == 0.0 || k0 == level {
        return v0;
    }
    let v1 = at(k0 + 1);
    let mut out = [0.0; 4];
    for j in 0..4 {
        out[j] = v0[j] + frac * (v1[j] - v0[j]);
    }
    out
}

impl NnrrLattice {
    /// Level used for Richardson extrapolation.
    pub fn richardson_level(&self) -> usize {
        self.max_level / 2
    }

    pub fn site(&self, k: usize) -> Option<&NnrrSite> {
        self.top.get(k)
    }
}

/// Finite-level approximation of the limits at `s`. With `extrapolate`, the
/// leading `1/m` term is removed using the snapshot at level `m / 2`.
pub fn ray_limit(lat: &NnrrLattice, s: f64, extrapolate: bool) -> Result<LimitPoint> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::invalid(format!("ray parameter {s} outside [0, 1]")));
    }
    let top = diagonal_value(&lat.top, s);
    if !extrapolate {
        return Ok(LimitPoint::from_values(s, top));
    }
    let half = lat.richardson_level();
    let snap = lat
        .snapshots
        .get(&half)
        .ok_or(Error::MissingSnapshot(half))?;
    let low = diagonal_value(snap, s);
    let (m, h) = (lat.max_level as f64, half as f64);
    let mut out = [0.0; 4];
    for j in 0..4 {
        out[j] = (m * top[j] - h * low[j]) / (m - h);
    }
    Ok(LimitPoint::from_values(s, out))
}

/// Ray limits of a solved lattice over `grid`.
pub fn curve_from_lattice(
    lat: &NnrrLattice,
    grid: &[f64],
    extrapolate: bool,
) -> Result<LimitCurve> {
    let points = grid
        .iter()
        .map(|&s| ray_limit(lat, s, extrapolate))
        .collect::<Result<Vec<_>>>()?;
    let mut curve = LimitCurve::new(points, Method::Dis)?;
    let stats = consistency_residuals(lat);
    curve.meta.insert("level".into(), lat.max_level as f64);
    curve
        .meta
        .insert("extrapolated".into(), if extrapolate { 1.0 } else { 0.0 });
    curve
        .meta
        .insert("max_axis_residual".into(), stats.max_axis_b);
    curve
        .meta
        .insert("max_interior_residual".into(), stats.max_interior);
    Ok(curve)
}

pub fn consistency_residuals(lat: &NnrrLattice) -> ResidualStats {
    let max_axis_b = lat.residuals.iter().map(|r| r.axis_b).fold(0.0, f64::max);
    let max_interior = lat.residuals.iter().map(|r| r.interior).fold(0.0, f64::max);
    ResidualStats {
        max_axis_b,
        max_interior,
        per_level: lat.residuals.clone(),
    }
}
