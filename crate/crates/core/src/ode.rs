//! Ray limits from the ordinary differential system for
//! `C1 = A1 / s^2`, `C2 = A2 / (1 - s)^2`:
//!
//! ```text
//! (1+s) s C1' + 4 s C1 + (2-s)(1-s) C2' - 4 (1-s) C2 = 0
//! s^2 C1' / C1 = (1-s)^2 C2' / C2 - 2
//! ```
//!
//! with `B2 - B1 = sqrt(C1 + C2)`. Both endpoints are singular points of the
//! system; integration starts a small offset away using first-order Taylor
//! seeds and runs with fixed-step classical Runge–Kutta.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::{AngelescoSystem, LimitCurve, LimitPoint, Method};

/// Closed-form endpoint values of `C1, C2, B1, B2` and `B = B2 - B1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPack {
    pub c1_at0: f64,
    pub c2_at0: f64,
    pub c1_at1: f64,
    pub c2_at1: f64,
    pub b1_at0: f64,
    pub b1_at1: f64,
    pub b2_at0: f64,
    pub b2_at1: f64,
    pub b_at0: f64,
    pub b_at1: f64,
}

impl BoundaryPack {
    /// Limits at `s = 0`.
    pub fn point_at0(&self) -> LimitPoint {
        LimitPoint {
            s: 0.0,
            a1: 0.0,
            a2: self.c2_at0,
            b1: self.b1_at0,
            b2: self.b2_at0,
        }
    }

    /// Limits at `s = 1`.
    pub fn point_at1(&self) -> LimitPoint {
        LimitPoint {
            s: 1.0,
            a1: self.c1_at1,
            a2: 0.0,
            b1: self.b1_at1,
            b2: self.b2_at1,
        }
    }
}

/// Endpoint data of the system: scalar limits of each measure on its own axis
/// and the outer edges obtained from the surface residues.
pub fn boundary_values(sys: &AngelescoSystem) -> BoundaryPack {
    let (a1, b1) = (sys.i1.lo, sys.i1.hi);
    let (a2, b2) = (sys.i2.lo, sys.i2.hi);
    let root0 = ((a2 - a1) * (b2 - a1)).sqrt();
    let root1 = ((b2 - b1) * (b2 - a1)).sqrt();
    let b_at0 = 0.5 * (-a1 + 0.5 * (a2 + b2) + root0);
    let b_at1 = 0.5 * (b2 - 0.5 * (a1 + b1) + root1);
    let c2_at0 = ((b2 - a2) / 4.0).powi(2);
    let c1_at1 = ((b1 - a1) / 4.0).powi(2);
    BoundaryPack {
        c1_at0: b_at0 * b_at0 - c2_at0,
        c2_at0,
        c1_at1,
        c2_at1: b_at1 * b_at1 - c1_at1,
        b1_at0: 0.5 * (a1 + 0.5 * (a2 + b2) - root0),
        b1_at1: 0.5 * (a1 + b1),
        b2_at0: 0.5 * (a2 + b2),
        b2_at1: 0.5 * (b2 + 0.5 * (a1 + b1) + root1),
        b_at0,
        b_at1,
    }
}

/// Derivatives `(C1', C2')` from the linear 2×2 system at interior `s`.
pub fn rhs(s: f64, c1: f64, c2: f64) -> Result<(f64, f64)> {
    let t = 1.0 - s;
    let (m11, m12, r1) = ((1.0 + s) * s, (2.0 - s) * t, -4.0 * s * c1 + 4.0 * t * c2);
    let (m21, m22, r2) = (s * s / c1, -t * t / c2, -2.0);
    let det = m11 * m22 - m12 * m21;
    if det == 0.0 || !det.is_finite() {
        return Err(Error::numerical(format!(
            "singular derivative system at s = {s}"
        )));
    }
    Ok(((r1 * m22 - m12 * r2) / det, (m11 * r2 - m21 * r1) / det))
}

/// `(B1', B2')` in the forms that stay regular at both endpoints.
fn b_derivatives(s: f64, c1: f64, c2: f64, d1: f64, d2: f64) -> (f64, f64) {
    let b = (c1 + c2).sqrt();
    let db1 = (2.0 * c1 + s * d1) / b * (1.0 + c2 / c1);
    let db2 = (2.0 * c2 - (1.0 - s) * d2) / b * (1.0 + c1 / c2);
    (db1, db2)
}

/// Which endpoint a branch starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Zero,
    One,
}

/// Integration state. `b2` is always `b1 + sqrt(c1 + c2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeState {
    pub s: f64,
    pub c1: f64,
    pub c2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl OdeState {
    pub fn limits(&self) -> LimitPoint {
        let t = 1.0 - self.s;
        LimitPoint {
            s: self.s,
            a1: self.s * self.s * self.c1,
            a2: t * t * self.c2,
            b1: self.b1,
            b2: self.b2,
        }
    }
}

/// Endpoint derivatives `(C1', C2', B1', B2')` of the regular solution.
fn seeds(side: Side, pack: &BoundaryPack) -> [f64; 4] {
    match side {
        Side::Zero => {
            let (c1, c2) = (pack.c1_at0, pack.c2_at0);
            let d1 = -4.0 * c1 - 6.0 * c2;
            let d2 = 2.0 * c2;
            let (db1, db2) = b_derivatives(0.0, c1, c2, d1, d2);
            [d1, d2, db1, db2]
        }
        Side::One => {
            let (c1, c2) = (pack.c1_at1, pack.c2_at1);
            let d1 = -2.0 * c1;
            let d2 = 4.0 * c2 + 6.0 * c1;
            let (db1, db2) = b_derivatives(1.0, c1, c2, d1, d2);
            [d1, d2, db1, db2]
        }
    }
}

fn endpoint_state(side: Side, pack: &BoundaryPack) -> [f64; 4] {
    match side {
        Side::Zero => [pack.c1_at0, pack.c2_at0, pack.b1_at0, pack.b2_at0],
        Side::One => [pack.c1_at1, pack.c2_at1, pack.b1_at1, pack.b2_at1],
    }
}

/// State at `s = eps` (side zero) or `s = 1 - eps` (side one) from the
/// first-order Taylor expansion at the endpoint.
pub fn startup(side: Side, pack: &BoundaryPack, eps: f64) -> Result<OdeState> {
    if !(eps > 0.0 && eps <= 1e-4) {
        return Err(Error::invalid(format!(
            "start offset {eps} outside (0, 1e-4]"
        )));
    }
    let y0 = endpoint_state(side, pack);
    let d = seeds(side, pack);
    let (s, h) = match side {
        Side::Zero => (eps, eps),
        Side::One => (1.0 - eps, -eps),
    };
    let c1 = y0[0] + h * d[0];
    let c2 = y0[1] + h * d[1];
    let b1 = y0[2] + h * d[2];
    Ok(OdeState {
        s,
        c1,
        c2,
        b1,
        b2: b1 + (c1 + c2).sqrt(),
    })
}

/// Step-count and start-offset knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeSettings {
    /// RK4 steps per unit length of `s`.
    pub steps_per_unit: usize,
    /// Offset from the singular endpoint where integration starts.
    pub eps: f64,
}

impl Default for OdeSettings {
    fn default() -> Self {
        OdeSettings {
            steps_per_unit: 10_000,
            eps: 1e-6,
        }
    }
}

/// Full derivative of the augmented state `(C1, C2, B1, B2)`.
fn field(s: f64, y: &[f64; 4]) -> Result<[f64; 4]> {
    let (d1, d2) = rhs(s, y[0], y[1])?;
    let (db1, db2) = b_derivatives(s, y[0], y[1], d1, d2);
    Ok([d1, d2, db1, db2])
}

fn axpy(y: &[f64; 4], h: f64, k: &[f64; 4]) -> [f64; 4] {
    [
        y[0] + h * k[0],
        y[1] + h * k[1],
        y[2] + h * k[2],
        y[3] + h * k[3],
    ]
}

/// One integrated branch, with nodes and derivatives for Hermite interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub side: Side,
    /// Nodes ordered by increasing `s`; the first (side zero) or last (side one)
    /// node is the exact endpoint.
    pub states: Vec<OdeState>,
    derivs: Vec<[f64; 4]>,
    /// Largest `|B2_direct - B1 - sqrt(C1 + C2)|` along the branch, where
    /// `B2_direct` is integrated from its own derivative.
    pub max_b_drift: f64,
}

/// Integrates from the `side` endpoint to `stop`.
pub fn integrate_branch(
    pack: &BoundaryPack,
    side: Side,
    stop: f64,
    settings: &OdeSettings,
) -> Result<Branch> {
    let start = startup(side, pack, settings.eps)?;
    let valid = match side {
        Side::Zero => stop > start.s && stop < 1.0,
        Side::One => stop < start.s && stop > 0.0,
    };
    if !valid {
        return Err(Error::invalid(format!(
            "stop {stop} not reachable from side {side:?}"
        )));
    }
    if settings.steps_per_unit == 0 {
        return Err(Error::invalid("steps_per_unit must be positive"));
    }
    let span = stop - start.s;
    let nsteps = ((span.abs() * settings.steps_per_unit as f64).ceil() as usize).max(1);
    let h = span / nsteps as f64;

    let mut states = Vec::with_capacity(nsteps + 2);
    let mut derivs = Vec::with_capacity(nsteps + 2);
    let end = endpoint_state(side, pack);
    let end_s = if side == Side::Zero { 0.0 } else { 1.0 };
    states.push(OdeState {
        s: end_s,
        c1: end[0],
        c2: end[1],
        b1: end[2],
        b2: end[3],
    });
    derivs.push(seeds(side, pack));

    let mut y = [
        start.c1,
        start.c2,
        start.b1,
        end[3] + (start.s - end_s) * seeds(side, pack)[3],
    ];
    let mut s = start.s;
    let mut drift = (y[3] - start.b2).abs();
    let mut k1 = field(s, &y)?;
    let push = |states: &mut Vec<OdeState>,
                derivs: &mut Vec<[f64; 4]>,
                s: f64,
                y: &[f64; 4],
                k: &[f64; 4]| {
        let b2 = y[2] + (y[0] + y[1]).sqrt();
        states.push(OdeState {
            s,
            c1: y[0],
            c2: y[1],
            b1: y[2],
            b2,
        });
        // the reported B2 follows B1 + B; so does its derivative
        let db = 0.5 * (k[0] + k[1]) / (y[0] + y[1]).sqrt();
        derivs.push([k[0], k[1], k[2], k[2] + db]);
    };
    push(&mut states, &mut derivs, s, &y, &k1);

    for i in 0..nsteps {
        let k2 = field(s + 0.5 * h, &axpy(&y, 0.5 * h, &k1))?;
        let k3 = field(s + 0.5 * h, &axpy(&y, 0.5 * h, &k2))?;
        let k4 = field(s + h, &axpy(&y, h, &k3))?;
        let mut next = y;
        for j in 0..4 {
            next[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let s_next = if i + 1 == nsteps {
            stop
        } else {
            start.s + (i + 1) as f64 * h
        };
        if !(next[0] > 0.0 && next[1] > 0.0 && next.iter().all(|v| v.is_finite())) {
            return Err(Error::numerical(format!(
                "branch left the region C1, C2 > 0 after s = {s}"
            )));
        }
        y = next;
        s = s_next;
        k1 = field(s, &y)?;
        drift = drift.max((y[3] - y[2] - (y[0] + y[1]).sqrt()).abs());
        push(&mut states, &mut derivs, s, &y, &k1);
    }

    if side == Side::One {
        states.reverse();
        derivs.reverse();
    }
    Ok(Branch {
        side,
        states,
        derivs,
        max_b_drift: drift,
    })
}

impl Branch {
    /// Covered range `[lo, hi]` of `s`.
    pub fn range(&self) -> (f64, f64) {
        (self.states[0].s, self.states[self.states.len() - 1].s)
    }

    /// Cubic Hermite interpolation of `(C1, C2, B1, B2)` at `s`.
    pub fn eval(&self, s: f64) -> Result<OdeState> {
        let (lo, hi) = self.range();
        if !(s >= lo && s <= hi) {
            return Err(Error::invalid(format!(
                "s = {s} outside branch range [{lo}, {hi}]"
            )));
        }
        let idx = self.states.partition_point(|st| st.s < s);
        if idx < self.states.len() && self.states[idx].s == s {
            return Ok(self.states[idx]);
        }
        let (i0, i1) = (idx - 1, idx);
        let (p, q) = (&self.states[i0], &self.states[i1]);
        let (dp, dq) = (&self.derivs[i0], &self.derivs[i1]);
        let h = q.s - p.s;
        let t = (s - p.s) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let vp = [p.c1, p.c2, p.b1, p.b2];
        let vq = [q.c1, q.c2, q.b1, q.b2];
        let mut v = [0.0; 4];
        for j in 0..4 {
            v[j] = h00 * vp[j] + h10 * h * dp[j] + h01 * vq[j] + h11 * h * dq[j];
        }
        Ok(OdeState {
            s,
            c1: v[0],
            c2: v[1],
            b1: v[2],
            b2: v[3],
        })
    }

    /// Limits on the grid points covered by the branch.
    pub fn curve(&self, grid: &[f64]) -> Result<LimitCurve> {
        let (lo, hi) = self.range();
        let points = grid
            .iter()
            .filter(|&&s| s >= lo && s <= hi)
            .map(|&s| self.eval(s).map(|st| st.limits()))
            .collect::<Result<Vec<_>>>()?;
        let mut curve = LimitCurve::new(points, Method::Ode)?;
        curve.meta.insert("max_b_drift".into(), self.max_b_drift);
        Ok(curve)
    }
}

/// Continuity tolerance at the junctions; larger mismatches are flagged in the
/// curve metadata.
pub const JUNCTION_TOLERANCE: f64 = 1e-4;

/// Splices the forward branch on `[0, c1]`, constants on `[c1, c2]` and the
/// backward branch on `[c2, 1]`.
pub fn assemble_curve(
    forward: &Branch,
    backward: &Branch,
    c1: f64,
    c2: f64,
    grid: &[f64],
) -> Result<LimitCurve> {
    if !(0.0 < c1 && c1 <= c2 && c2 < 1.0) {
        return Err(Error::invalid(format!(
            "plateau bounds [{c1}, {c2}] invalid"
        )));
    }
    let left = forward.eval(c1)?.limits().values();
    let right = backward.eval(c2)?.limits().values();
    let mismatch = left
        .iter()
        .zip(&right)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mut plateau = [0.0; 4];
    for j in 0..4 {
        plateau[j] = 0.5 * (left[j] + right[j]);
    }
    let points = grid
        .iter()
        .map(|&s| {
            if s <= c1 {
                forward.eval(s).map(|st| st.limits())
            } else if s >= c2 {
                backward.eval(s).map(|st| st.limits())
            } else {
                Ok(LimitPoint::from_values(s, plateau))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut curve = LimitCurve::new(points, Method::Ode)?;
    curve.meta.insert("c1".into(), c1);
    curve.meta.insert("c2".into(), c2);
    curve.meta.insert("junction_mismatch".into(), mismatch);
    curve.meta.insert(
        "junction_flagged".into(),
        if mismatch > JUNCTION_TOLERANCE {
            1.0
        } else {
            0.0
        },
    );
    curve.meta.insert(
        "max_b_drift".into(),
        forward.max_b_drift.max(backward.max_b_drift),
    );
    Ok(curve)
}

/// Both branches of `sys` up to the plateau bounds, spliced over `grid`.
pub fn solve_curve(
    sys: &AngelescoSystem,
    c1: f64,
    c2: f64,
    grid: &[f64],
    settings: &OdeSettings,
) -> Result<(LimitCurve, Branch, Branch)> {
    let pack = boundary_values(sys);
    let forward = integrate_branch(&pack, Side::Zero, c1, settings)?;
    let backward = integrate_branch(&pack, Side::One, c2, settings)?;
    let curve = assemble_curve(&forward, &backward, c1, c2, grid)?;
    Ok((curve, forward, backward))
}
