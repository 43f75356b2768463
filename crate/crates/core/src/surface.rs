//! Ray limits from the genus-zero three-sheeted surface.
//!
//! For supports `[-alpha, 0], [beta, 1]` the surface is the image of the
//! sphere under
//!
//! ```text
//! z(w) = -alpha w^2 (w - gamma) / ((w - tau0)(w - tau1)(w - tau2)),  gamma = 2 - u,
//! ```
//!
//! where `u` solves `U(u) = beta (1 + alpha) / (alpha + beta)`, `tau0 > 1`
//! solves `R_u(tau0) = 1 + alpha`, and `tau1 < tau2` are the remaining poles.
//! The limits are read off the expansion of the normalized functions with a
//! pole at one infinity and a zero at the other.
//!
//! Supports of the extremal measure depend on `s`; the ray map `Theta(u, tau)`
//! locates them. Between the plateau bounds `c1 <= c2` neither support is
//! pushed and all limits are constant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::{
    pushforward_limits, star_normalize, AffineMap, AngelescoSystem, LimitCurve, LimitPoint, Method,
    StarConfig,
};
use crate::ode::boundary_values;
use crate::roots::{bisect, count_sign_changes};

const XTOL: f64 = 1e-15;
/// Samples used to check that a bracketed root is the only one.
const SCAN_SAMPLES: usize = 64;

/// `U(u) = u (2 - u)^3 / (2u - 1)^3`, strictly decreasing from 1 to 0 on `[1, 2]`.
pub fn cal_u(u: f64) -> f64 {
    u * (2.0 - u).powi(3) / (2.0 * u - 1.0).powi(3)
}

/// `R_u(tau) = tau^2 (tau + u - 2) / ((2u - 1) tau - u)`.
pub fn cal_r(u: f64, tau: f64) -> f64 {
    tau * tau * (tau + u - 2.0) / ((2.0 * u - 1.0) * tau - u)
}

/// Unique `u` in `[1, 2]` with `U(u) = beta (1 + alpha) / (alpha + beta)`.
/// Touching supports (`beta = 0`) give `u = 2`.
pub fn solve_u(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(0.0..1.0).contains(&beta) {
        return Err(Error::invalid(format!(
            "solve_u: bad star ({alpha}, {beta})"
        )));
    }
    if beta == 0.0 {
        return Ok(2.0);
    }
    let target = beta * (1.0 + alpha) / (alpha + beta);
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::invalid(format!(
            "solve_u: target {target} outside (0, 1)"
        )));
    }
    bisect(|u| Ok(cal_u(u) - target), 1.0, 2.0, XTOL)
}

/// Root `tau0 > 1` of `R_u(tau) = 1 + alpha`.
///
/// The bracket is grown until a sign change appears; a sample scan then
/// refuses brackets holding more than one root.
pub fn solve_tau(u: f64, alpha: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&u) || !(alpha > 0.0) {
        return Err(Error::invalid(format!(
            "solve_tau: bad input u = {u}, alpha = {alpha}"
        )));
    }
    let target = 1.0 + alpha;
    if u == 1.0 {
        // R_1(tau) = tau^2, and the 0/0 at tau = 1 would poison the scan
        return Ok(target.sqrt());
    }
    let g = |t: f64| Ok(cal_r(u, t) - target);
    let mut hi = 2.0;
    let mut tries = 0;
    while cal_r(u, hi) <= target {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::numerical(format!(
                "solve_tau: no bracket for alpha = {alpha}"
            )));
        }
    }
    let changes = count_sign_changes(g, 1.0, hi, SCAN_SAMPLES)?;
    if changes > 1 {
        return Err(Error::numerical(format!(
            "solve_tau: {changes} roots on (1, {hi}] for u = {u}, alpha = {alpha}"
        )));
    }
    bisect(g, 1.0, hi, XTOL)
}

/// The other two poles `(tau1, tau2)` of the projection, `tau1 < tau2`.
pub fn tau_roots(u: f64, tau0: f64) -> Result<(f64, f64)> {
    let sum = -(u + tau0 - 2.0);
    let product = -u * tau0 * (u + tau0 - 2.0) / (2.0 * u * tau0 - u - tau0);
    let disc = sum * sum - 4.0 * product;
    if !(disc >= 0.0) {
        return Err(Error::numerical(format!(
            "tau_roots: negative discriminant {disc}"
        )));
    }
    // sum < 0, so the large-magnitude root comes from the minus branch
    let q = 0.5 * (sum - disc.sqrt());
    let other = product / q;
    let (t1, t2) = if q < other { (q, other) } else { (other, q) };
    Ok((t1, t2))
}

/// Parameters of one surface realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceParams {
    pub alpha: f64,
    pub beta: f64,
    pub u: f64,
    pub tau0: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub gamma: f64,
}

impl SurfaceParams {
    /// Parameters for the supports `[-alpha, 0], [beta, 1]`.
    pub fn from_star(alpha: f64, beta: f64) -> Result<Self> {
        let u = solve_u(alpha, beta)?;
        let tau0 = solve_tau(u, alpha)?;
        Self::from_u_tau(alpha, u, tau0)
    }

    /// Parameters from a point `(u, tau0)` of the half-strip.
    pub fn from_u_tau(alpha: f64, u: f64, tau0: f64) -> Result<Self> {
        let (tau1, tau2) = tau_roots(u, tau0)?;
        let p = SurfaceParams {
            alpha,
            beta: map_b(u, tau0),
            u,
            tau0,
            tau1,
            tau2,
            gamma: 2.0 - u,
        };
        if !(p.tau1 < 0.0 && 0.0 < p.tau2 && p.tau2 < p.tau0) {
            return Err(Error::numerical(format!("pole ordering violated: {p:?}")));
        }
        Ok(p)
    }
}

/// Coefficients `(C, A, B)` of one expansion; the other index follows from
/// swapping `t1` and `t2`.
fn expansion(p: &SurfaceParams, t1: f64, t2: f64) -> Result<(f64, f64, f64)> {
    let (t0, g, al) = (p.tau0, p.gamma, p.alpha);
    let d01 = t0 - t1;
    let d02 = t0 - t2;
    let d12 = t1 - t2;
    if d01 == 0.0 || d02 == 0.0 || d12 == 0.0 {
        return Err(Error::numerical("coincident poles in residue formula"));
    }
    let c = -al * t1 * t1 * (t1 - g) / (d01 * d01 * d12);
    let a = -al * t0 * t0 * c * (t0 - g) / (d01 * d01 * d02);
    let d = t0 * t0 * t2 + 2.0 * t0 * t0 * t1 - 3.0 * t0 * t1 * t2 - g * t0 * t0 - g * t1 * t0
        + 2.0 * g * t1 * t2;
    let b = al * t0 * d / (d01 * d01 * d02 * d02);
    Ok((c, a, b))
}

/// Star-frame limits `(A1, B1, A2, B2)` from the two-term expansions at the
/// zero-sheet infinity.
pub fn residue_limits(p: &SurfaceParams) -> Result<[f64; 4]> {
    let (_, a1, b1) = expansion(p, p.tau1, p.tau2)?;
    let (_, a2, b2) = expansion(p, p.tau2, p.tau1)?;
    Ok([a1, b1, a2, b2])
}

/// Left edge `alpha` of the support pair parametrized by `(u, tau)`.
pub fn map_a(u: f64, tau: f64) -> f64 {
    cal_r(u, tau) - 1.0
}

/// Gap `beta` of the support pair parametrized by `(u, tau)`.
pub fn map_b(u: f64, tau: f64) -> f64 {
    let a = map_a(u, tau);
    let cu = cal_u(u);
    a * cu / (1.0 + a - cu)
}

/// Ray map `theta = 2s - 1` of the point `(u, tau)`.
pub fn theta(u: f64, tau: f64) -> Result<f64> {
    let inner = 2.0 * u * tau - u - tau;
    let rad = (2.0 + inner) / (inner * (u + tau) * (u + tau - 2.0));
    if !(rad >= 0.0) || !rad.is_finite() {
        return Err(Error::numerical(format!(
            "theta: radicand {rad} at (u, tau) = ({u}, {tau})"
        )));
    }
    Ok((tau - u) * rad.sqrt())
}

/// Threshold ray `s_alpha` at which both supports of `[-alpha, 0], [0, 1]` are
/// full. Returns `(theta_alpha, s_alpha)`.
pub fn solve_s_alpha(alpha: f64) -> Result<(f64, f64)> {
    let tau = solve_tau(2.0, alpha)?;
    let th = theta(2.0, tau)?;
    Ok((th, 0.5 * (1.0 + th)))
}

/// For `s` in `(s_alpha, 1)`: the pushed edge `beta_s` of the second support
/// for the touching pair `[-alpha, 0], [0, 1]`, with the surface point `(u, tau)`.
pub fn solve_beta_s(alpha: f64, s: f64) -> Result<(f64, f64, f64)> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::invalid(format!(
            "solve_beta_s: s = {s} outside (0, 1)"
        )));
    }
    let th = 2.0 * s - 1.0;
    let outer = |u: f64| -> Result<f64> { Ok(theta(u, solve_tau(u, alpha)?)? - th) };
    // Theta(1, tau(1)) = 1 > th; Theta(2, tau(2)) = theta_alpha
    let at_two = outer(2.0)?;
    let u = if at_two >= 0.0 {
        if at_two > 1e-12 {
            return Err(Error::numerical(format!(
                "solve_beta_s: s = {s} lies below the threshold s_alpha"
            )));
        }
        2.0
    } else {
        bisect(outer, 1.0, 2.0, XTOL)?
    };
    let tau = solve_tau(u, alpha)?;
    Ok((map_b(u, tau), u, tau))
}

/// Plateau bounds and the constant limits between them (star frame).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateauInfo {
    pub c1: f64,
    pub c2: f64,
    /// Constant star-frame limits on `[c1, c2]`; `s` is the plateau midpoint.
    pub plateau: LimitPoint,
    /// Threshold of the touching pair `[-alpha, 0], [0, 1]`.
    pub s_alpha_direct: f64,
    /// Threshold of the mirrored touching pair, in the original orientation.
    pub s_alpha_reflected: f64,
}

/// `s` at which the pushed edge of the touching pair reaches `beta`.
fn edge_ray(sc: &StarConfig) -> Result<f64> {
    let u = solve_u(sc.alpha, sc.beta)?;
    let tau = solve_tau(u, sc.alpha)?;
    Ok(0.5 * (1.0 + theta(u, tau)?))
}

pub fn plateau_bounds(sc: &StarConfig) -> Result<PlateauInfo> {
    let sc = StarConfig::new(sc.alpha, sc.beta)?;
    let (_, s_direct) = solve_s_alpha(sc.alpha)?;
    let (hat, _) = sc.reflected();
    let (_, s_hat) = solve_s_alpha(hat.alpha)?;
    let (c1, c2) = if sc.is_touching() {
        (s_direct, s_direct)
    } else {
        (1.0 - edge_ray(&hat)?, edge_ray(&sc)?)
    };
    if !(0.0 < c1 && c1 <= c2 && c2 < 1.0) {
        return Err(Error::numerical(format!(
            "plateau bounds out of order: [{c1}, {c2}]"
        )));
    }
    let params = SurfaceParams::from_star(sc.alpha, sc.beta)?;
    let [a1, b1, a2, b2] = residue_limits(&params)?;
    Ok(PlateauInfo {
        c1,
        c2,
        plateau: LimitPoint {
            s: 0.5 * (c1 + c2),
            a1,
            a2,
            b1,
            b2,
        },
        s_alpha_direct: s_direct,
        s_alpha_reflected: 1.0 - s_hat,
    })
}

/// Star-frame limits for `s` above the plateau: the first support is full, the
/// second is `[beta_s, 1]`.
fn pushed_limits(alpha: f64, s: f64) -> Result<LimitPoint> {
    let (_, u, tau) = solve_beta_s(alpha, s)?;
    let params = SurfaceParams::from_u_tau(alpha, u, tau)?;
    let [a1, b1, a2, b2] = residue_limits(&params)?;
    Ok(LimitPoint { s, a1, a2, b1, b2 })
}

/// Evaluator for one system with its plateau computed once.
#[derive(Debug, Clone)]
pub struct SurfaceSolver {
    pub system: AngelescoSystem,
    pub star: StarConfig,
    pub map: AffineMap,
    pub plateau: PlateauInfo,
    hat: StarConfig,
    hat_to_user: AffineMap,
}

impl SurfaceSolver {
    pub fn new(sys: &AngelescoSystem) -> Result<Self> {
        let sys = AngelescoSystem::new(sys.i1, sys.i2, sys.w1, sys.w2)?;
        let (star, map) = star_normalize(&sys);
        let star = StarConfig::new(star.alpha, star.beta)?;
        let plateau = plateau_bounds(&star)?;
        let (hat, hat_to_star) = star.reflected();
        Ok(SurfaceSolver {
            system: sys,
            star,
            map,
            plateau,
            hat,
            hat_to_user: hat_to_star.then(&map),
        })
    }

    /// Plateau bounds and constants in user coordinates.
    pub fn plateau_point(&self) -> Result<LimitPoint> {
        pushforward_limits(&self.plateau.plateau, &self.map, false)
    }

    pub fn limits_at(&self, s: f64) -> Result<LimitPoint> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::invalid(format!("ray parameter {s} outside [0, 1]")));
        }
        if s == 0.0 {
            return Ok(boundary_values(&self.system).point_at0());
        }
        if s == 1.0 {
            return Ok(boundary_values(&self.system).point_at1());
        }
        let PlateauInfo {
            c1, c2, plateau, ..
        } = self.plateau;
        if s > c2 {
            let p = pushed_limits(self.star.alpha, s)?;
            pushforward_limits(&p, &self.map, false)
        } else if s < c1 {
            let p = pushed_limits(self.hat.alpha, 1.0 - s)?;
            let mut out = pushforward_limits(&p, &self.hat_to_user, true)?;
            out.s = s;
            Ok(out)
        } else {
            let mut p = pushforward_limits(&plateau, &self.map, false)?;
            p.s = s;
            Ok(p)
        }
    }

    pub fn curve(&self, grid: &[f64]) -> Result<LimitCurve> {
        let points = grid
            .iter()
            .map(|&s| self.limits_at(s))
            .collect::<Result<Vec<_>>>()?;
        let mut curve = LimitCurve::new(points, Method::Surface)?;
        curve.meta.insert("c1".into(), self.plateau.c1);
        curve.meta.insert("c2".into(), self.plateau.c2);
        curve
            .meta
            .insert("s_alpha".into(), self.plateau.s_alpha_direct);
        Ok(curve)
    }
}

/// Limits of `sys` along the ray `s`.
pub fn limits_at(sys: &AngelescoSystem, s: f64) -> Result<LimitPoint> {
    SurfaceSolver::new(sys)?.limits_at(s)
}

/// Limits of `sys` over `grid`, sharing one plateau computation.
pub fn curve(sys: &AngelescoSystem, grid: &[f64]) -> Result<LimitCurve> {
    SurfaceSolver::new(sys)?.curve(grid)
}
