//! Interval-pair systems, the normalized star frame and affine push-forward of
//! coefficient limits.
//!
//! Every two-interval system `[a1, b1], [a2, b2]` with `b1 <= a2` is mapped by
//! `y = (x - b1) / (b2 - b1)` onto the star frame `[-alpha, 0], [beta, 1]`.
//! Limits computed in the star frame are carried back with [`pushforward_limits`]:
//! under `x = scale * y + shift` the `a`-limits scale by `scale^2` and the
//! `b`-limits transform like points.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed real interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::invalid(format!(
                "interval [{lo}, {hi}] is not finite"
            )));
        }
        if lo >= hi {
            return Err(Error::invalid(format!("interval [{lo}, {hi}] is empty")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Weight class of a measure. Only the lattice method depends on it; the ray
/// limits are the same for all three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    /// `(1 - t^2)^(-1/2)` on the reference interval.
    Chebyshev1,
    /// `(1 - t^2)^(1/2)` on the reference interval.
    #[default]
    Chebyshev2,
    /// Lebesgue measure (Legendre polynomials).
    Uniform,
}

impl WeightKind {
    pub const ALL: [WeightKind; 3] = [
        WeightKind::Chebyshev1,
        WeightKind::Chebyshev2,
        WeightKind::Uniform,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            WeightKind::Chebyshev1 => "chebyshev1",
            WeightKind::Chebyshev2 => "chebyshev2",
            WeightKind::Uniform => "uniform",
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "chebyshev1" => Ok(WeightKind::Chebyshev1),
            "chebyshev2" => Ok(WeightKind::Chebyshev2),
            "uniform" | "legendre" => Ok(WeightKind::Uniform),
            other => Err(Error::invalid(format!("unknown weight kind `{other}`"))),
        }
    }
}

/// Two measures on ordered, non-overlapping intervals (touching allowed).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngelescoSystem {
    pub i1: Interval,
    pub i2: Interval,
    pub w1: WeightKind,
    pub w2: WeightKind,
}

impl AngelescoSystem {
    pub fn new(i1: Interval, i2: Interval, w1: WeightKind, w2: WeightKind) -> Result<Self> {
        // re-validate in case the intervals were built by struct literal
        let i1 = Interval::new(i1.lo, i1.hi)?;
        let i2 = Interval::new(i2.lo, i2.hi)?;
        if i1.hi > i2.lo {
            return Err(Error::invalid(format!(
                "supports {i1} and {i2} overlap; the first interval must lie to the left"
            )));
        }
        Ok(AngelescoSystem { i1, i2, w1, w2 })
    }

    /// Shorthand for a system with the same weight kind on both intervals.
    pub fn from_endpoints(a1: f64, b1: f64, a2: f64, b2: f64, weight: WeightKind) -> Result<Self> {
        Self::new(
            Interval::new(a1, b1)?,
            Interval::new(a2, b2)?,
            weight,
            weight,
        )
    }

    pub fn is_touching(&self) -> bool {
        self.i1.hi == self.i2.lo
    }

    /// The same system under `x -> scale * x + shift` (`scale > 0`).
    pub fn transformed(&self, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::invalid(
                "transformed() needs a positive scale; use reflect()",
            ));
        }
        let map = |iv: Interval| Interval::new(scale * iv.lo + shift, scale * iv.hi + shift);
        Self::new(map(self.i1)?, map(self.i2)?, self.w1, self.w2)
    }
}

/// Normalized pair `[-alpha, 0], [beta, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarConfig {
    pub alpha: f64,
    pub beta: f64,
}

impl StarConfig {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!(
                "star alpha must be positive, got {alpha}"
            )));
        }
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::invalid(format!(
                "star beta must lie in [0, 1), got {beta}"
            )));
        }
        Ok(StarConfig { alpha, beta })
    }

    pub fn is_touching(&self) -> bool {
        self.beta == 0.0
    }

    /// The star configuration of the mirrored system, together with the map
    /// that carries its frame back into this one (negative scale, indices swapped).
    pub fn reflected(&self) -> (StarConfig, AffineMap) {
        // [-alpha, 0], [beta, 1] mirrored is [-1, -beta], [0, alpha]
        let width = self.alpha + self.beta;
        let hat = StarConfig {
            alpha: (1.0 - self.beta) / width,
            beta: self.beta / width,
        };
        (
            hat,
            AffineMap {
                scale: -width,
                shift: self.beta,
            },
        )
    }

    pub fn to_system(&self, weight: WeightKind) -> Result<AngelescoSystem> {
        AngelescoSystem::from_endpoints(-self.alpha, 0.0, self.beta, 1.0, weight)
    }
}

/// `x_user = scale * y_star + shift`; a negative scale encodes a reflection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub scale: f64,
    pub shift: f64,
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap {
        scale: 1.0,
        shift: 0.0,
    };

    pub fn apply(&self, y: f64) -> f64 {
        self.scale * y + self.shift
    }

    /// `outer ∘ self`: first `self`, then `outer`.
    pub fn then(&self, outer: &AffineMap) -> AffineMap {
        AffineMap {
            scale: outer.scale * self.scale,
            shift: outer.scale * self.shift + outer.shift,
        }
    }
}

/// Limits `(A1, A2, B1, B2)` of the recurrence coefficients along the ray with
/// parameter `s` (fraction of conditions on the first measure).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitPoint {
    pub s: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl LimitPoint {
    pub fn values(&self) -> [f64; 4] {
        [self.a1, self.a2, self.b1, self.b2]
    }

    pub fn from_values(s: f64, v: [f64; 4]) -> Self {
        LimitPoint {
            s,
            a1: v[0],
            a2: v[1],
            b1: v[2],
            b2: v[3],
        }
    }

    /// Checks the structural invariants: `s` in `[0, 1]`, nonnegative `A`,
    /// vanishing `A1` at `s = 0` and `A2` at `s = 1`, and `B2 > B1`.
    pub fn check(&self) -> Result<()> {
        let v = self.values();
        if !(self.s.is_finite() && v.iter().all(|x| x.is_finite())) {
            return Err(Error::numerical(format!("non-finite limit point {self:?}")));
        }
        if !(0.0..=1.0).contains(&self.s) {
            return Err(Error::invalid(format!(
                "ray parameter {} outside [0, 1]",
                self.s
            )));
        }
        if self.a1 < 0.0 || self.a2 < 0.0 {
            return Err(Error::numerical(format!(
                "negative A-limit at s = {}",
                self.s
            )));
        }
        if (self.s == 0.0 && self.a1 != 0.0) || (self.s == 1.0 && self.a2 != 0.0) {
            return Err(Error::numerical(format!(
                "marginal condition violated at s = {}",
                self.s
            )));
        }
        if self.b2 <= self.b1 {
            return Err(Error::numerical(format!("B2 <= B1 at s = {}", self.s)));
        }
        Ok(())
    }
}

/// Which of the three independent methods produced a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Lattice of nearest-neighbor coefficients at finite level.
    Dis,
    /// Boundary-value branches of the ordinary differential system.
    Ode,
    /// Genus-zero surface parametrization and residues at infinity.
    Surface,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Dis, Method::Ode, Method::Surface];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Dis => "dis",
            Method::Ode => "ode",
            Method::Surface => "surface",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dis" | "lattice" => Ok(Method::Dis),
            "ode" => Ok(Method::Ode),
            "surface" => Ok(Method::Surface),
            other => Err(Error::invalid(format!("unknown method `{other}`"))),
        }
    }
}

/// Sampled limit functions with strictly increasing `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCurve {
    pub points: Vec<LimitPoint>,
    pub method: Method,
    /// Numeric diagnostics attached by the producing method.
    pub meta: BTreeMap<String, f64>,
}

impl LimitCurve {
    pub fn new(points: Vec<LimitPoint>, method: Method) -> Result<Self> {
        for w in points.windows(2) {
            if !(w[1].s > w[0].s) {
                return Err(Error::invalid(format!(
                    "curve grid is not strictly increasing at s = {}",
                    w[1].s
                )));
            }
        }
        for p in &points {
            p.check()?;
        }
        Ok(LimitCurve {
            points,
            method,
            meta: BTreeMap::new(),
        })
    }

    pub fn grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.s).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Piecewise-linear value at `s`; `None` outside the sampled range.
    pub fn interpolate(&self, s: f64) -> Option<LimitPoint> {
        let pts = &self.points;
        let first = pts.first()?;
        let last = pts.last()?;
        if s < first.s || s > last.s {
            return None;
        }
        let idx = pts.partition_point(|p| p.s < s);
        if idx < pts.len() && pts[idx].s == s {
            return Some(pts[idx]);
        }
        let (lo, hi) = (&pts[idx - 1], &pts[idx]);
        let t = (s - lo.s) / (hi.s - lo.s);
        let (va, vb) = (lo.values(), hi.values());
        let mut v = [0.0; 4];
        for j in 0..4 {
            v[j] = va[j] + t * (vb[j] - va[j]);
        }
        Some(LimitPoint::from_values(s, v))
    }
}

/// Uniform grid of `n >= 2` points on `[0, 1]`.
pub fn uniform_grid(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::invalid("a grid on [0, 1] needs at least two points"));
    }
    let last = (n - 1) as f64;
    Ok((0..n).map(|i| i as f64 / last).collect())
}

/// Maps a system onto its star frame. Returns the star configuration and the
/// affine map from star coordinates back to user coordinates.
pub fn star_normalize(sys: &AngelescoSystem) -> (StarConfig, AffineMap) {
    let scale = sys.i2.hi - sys.i1.hi;
    let shift = sys.i1.hi;
    let alpha = (sys.i1.hi - sys.i1.lo) / scale;
    let beta = (sys.i2.lo - sys.i1.hi) / scale;
    (StarConfig { alpha, beta }, AffineMap { scale, shift })
}

/// Mirror image `x -> -x` of a system. The first returned interval is the image
/// of the second input interval, so measure labels swap and `s -> 1 - s`; the
/// flag records that swap.
pub fn reflect(sys: &AngelescoSystem) -> (AngelescoSystem, bool) {
    let i1 = Interval {
        lo: -sys.i2.hi,
        hi: -sys.i2.lo,
    };
    let i2 = Interval {
        lo: -sys.i1.hi,
        hi: -sys.i1.lo,
    };
    (
        AngelescoSystem {
            i1,
            i2,
            w1: sys.w2,
            w2: sys.w1,
        },
        true,
    )
}

/// Carries a limit point through an optional label swap (`1 <-> 2`, `s -> 1 - s`)
/// followed by `x -> scale * x + shift`.
pub fn pushforward_limits(p: &LimitPoint, map: &AffineMap, swapped: bool) -> Result<LimitPoint> {
    if map.scale == 0.0 || !map.scale.is_finite() || !map.shift.is_finite() {
        return Err(Error::invalid(format!("degenerate affine map {map:?}")));
    }
    let q = if swapped {
        LimitPoint {
            s: 1.0 - p.s,
            a1: p.a2,
            a2: p.a1,
            b1: p.b2,
            b2: p.b1,
        }
    } else {
        *p
    };
    let k = map.scale;
    let out = LimitPoint {
        s: q.s,
        a1: k * k * q.a1,
        a2: k * k * q.a2,
        b1: map.apply(q.b1),
        b2: map.apply(q.b2),
    };
    if out.b2 <= out.b1 {
        return Err(Error::invalid(
            "push-forward would reverse the interval order; a negative scale needs the label swap",
        ));
    }
    Ok(out)
}
