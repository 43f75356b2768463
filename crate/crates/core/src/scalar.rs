//! Scalar three-term recurrences, quadrature rules and the axis data that seed
//! the nearest-neighbor lattice.
//!
//! Convention: the monic orthogonal polynomials satisfy
//! `x p_k = p_{k+1} + b[k] p_k + a[k-1] p_{k-1}`, so `a[k] = h_{k+1} / h_k`
//! with `h_k` the squared norm of `p_k`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::{AngelescoSystem, Interval, WeightKind};

/// Recurrence coefficients of one measure, `a[k] > 0` and `b[k]` for `k < n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarRecurrence {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub interval: Interval,
    pub weight: WeightKind,
}

impl ScalarRecurrence {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// Probability-normalized quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// First `n` recurrence coefficients of the monic orthogonal polynomials of a
/// classical weight on `iv`.
pub fn scalar_recurrence(weight: WeightKind, iv: Interval, n: usize) -> Result<ScalarRecurrence> {
    if n == 0 {
        return Err(Error::invalid("scalar_recurrence needs n >= 1"));
    }
    let half = 0.5 * iv.len();
    let r2 = 0.25 * half * half;
    let a = (0..n)
        .map(|k| match weight {
            WeightKind::Chebyshev1 if k == 0 => 2.0 * r2,
            WeightKind::Chebyshev1 | WeightKind::Chebyshev2 => r2,
            WeightKind::Uniform => {
                let j = (k + 1) as f64;
                half * half * j * j / (4.0 * j * j - 1.0)
            }
        })
        .collect();
    Ok(ScalarRecurrence {
        a,
        b: vec![iv.mid(); n],
        interval: iv,
        weight,
    })
}

/// `n`-point rule for the normalized weight on `iv`: Gauss–Chebyshev for the
/// Chebyshev kinds (exact to degree `2n - 1`), Clenshaw–Curtis for the uniform
/// weight (exact to degree `n - 1`). Nodes are returned in increasing order.
pub fn gauss_nodes(weight: WeightKind, iv: Interval, n: usize) -> QuadratureRule {
    let n = n.max(1);
    let (mid, half) = (iv.mid(), 0.5 * iv.len());
    let (t, w): (Vec<f64>, Vec<f64>) = match weight {
        WeightKind::Chebyshev1 => (1..=n)
            .map(|i| {
                let th = (2 * i - 1) as f64 * PI / (2 * n) as f64;
                (-th.cos(), 1.0 / n as f64)
            })
            .unzip(),
        WeightKind::Chebyshev2 => (1..=n)
            .map(|i| {
                let th = i as f64 * PI / (n + 1) as f64;
                (-th.cos(), 2.0 / (n + 1) as f64 * th.sin().powi(2))
            })
            .unzip(),
        WeightKind::Uniform => clenshaw_curtis(n),
    };
    QuadratureRule {
        nodes: t.into_iter().map(|t| mid + half * t).collect(),
        weights: w,
    }
}

/// Clenshaw–Curtis points and weights on `[-1, 1]`, weights summing to one.
fn clenshaw_curtis(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (vec![0.0], vec![1.0]);
    }
    let deg = n - 1;
    let degf = deg as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for j in 0..n {
        let th = j as f64 * PI / degf;
        let mut acc = 1.0;
        for k in 1..=deg / 2 {
            let bk = if 2 * k == deg { 1.0 } else { 2.0 };
            let kf = k as f64;
            acc -= bk / (4.0 * kf * kf - 1.0) * (2.0 * kf * th).cos();
        }
        let cj = if j == 0 || j == deg { 1.0 } else { 2.0 };
        // total mass 2 on [-1, 1]; halve for a probability rule
        weights.push(0.5 * cj / degf * acc);
        nodes.push(-th.cos());
    }
    (nodes, weights)
}

/// Number of nodes for which [`gauss_nodes`] integrates polynomials of degree
/// `deg` exactly.
pub fn exact_node_count(weight: WeightKind, deg: usize) -> usize {
    match weight {
        WeightKind::Chebyshev1 | WeightKind::Chebyshev2 => deg / 2 + 1,
        WeightKind::Uniform => deg + 1,
    }
}

/// Ratios `r_k = h_{k+1} / h_k`, `k = 0..=m`, of the integrals
/// `h_k = ∫ p_k dμ_dst` of the monic orthogonal polynomials of `src` against
/// the normalized `dst_weight` on `dst_iv`.
///
/// The polynomial values at the quadrature nodes are renormalized at every
/// step; the shared scale is carried as a logarithm, so no overflow occurs.
pub fn mixed_ratios(
    src: &ScalarRecurrence,
    dst_weight: WeightKind,
    dst_iv: Interval,
    m: usize,
) -> Result<Vec<f64>> {
    let overlap = dst_iv.lo < src.interval.hi && src.interval.lo < dst_iv.hi;
    if overlap {
        return Err(Error::invalid(format!(
            "mixed ratios need disjoint supports, got {} and {dst_iv}",
            src.interval
        )));
    }
    if src.len() < m + 1 {
        return Err(Error::invalid(format!(
            "source recurrence has {} terms, {} needed",
            src.len(),
            m + 1
        )));
    }
    mixed_ratios_with_nodes(
        src,
        &gauss_nodes(dst_weight, dst_iv, exact_node_count(dst_weight, m + 1)),
        m,
    )
}

pub(crate) fn mixed_ratios_with_nodes(
    src: &ScalarRecurrence,
    rule: &QuadratureRule,
    m: usize,
) -> Result<Vec<f64>> {
    let n = rule.nodes.len();
    let mut prev = vec![0.0; n];
    let mut cur = vec![1.0; n];
    let mut log_scale = 0.0;
    let dot = |v: &[f64]| -> f64 { v.iter().zip(&rule.weights).map(|(p, w)| p * w).sum() };
    let mut h_prev = (dot(&cur), log_scale);
    let mut ratios = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let ak = if k > 0 { src.a[k - 1] } else { 0.0 };
        let bk = src.b[k];
        let mut peak = 0.0f64;
        for i in 0..n {
            let next = (rule.nodes[i] - bk) * cur[i] - ak * prev[i];
            prev[i] = cur[i];
            cur[i] = next;
            peak = peak.max(next.abs());
        }
        if !(peak > 0.0 && peak.is_finite()) {
            return Err(Error::numerical(format!(
                "polynomial values degenerate at degree {}",
                k + 1
            )));
        }
        for i in 0..n {
            prev[i] /= peak;
            cur[i] /= peak;
        }
        log_scale += peak.ln();
        let h = (dot(&cur), log_scale);
        if h.0 == 0.0 || h_prev.0 == 0.0 {
            return Err(Error::numerical(format!(
                "vanishing mixed moment at degree {k}"
            )));
        }
        let r = h.0 / h_prev.0 * (h.1 - h_prev.1).exp();
        if !r.is_finite() {
            return Err(Error::numerical(format!(
                "non-finite mixed ratio at degree {k}"
            )));
        }
        ratios.push(r);
        h_prev = h;
    }
    Ok(ratios)
}

/// Boundary data along one coordinate axis of the lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisData {
    /// `b` of the axis measure at axis site `k`.
    pub own_b: Vec<f64>,
    /// `a` of the axis measure at axis site `k`; zero at `k = 0`.
    pub own_a: Vec<f64>,
    /// `b` in the other direction at axis site `k`.
    pub cross_b: Vec<f64>,
}

/// Which axis of the lattice: `First` is the row `(k, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    First,
    Second,
}

/// Axis data for sites `k = 0..=m` along `axis`.
pub fn axis_data(sys: &AngelescoSystem, axis: Axis, m: usize) -> Result<AxisData> {
    if m == 0 {
        return Err(Error::invalid("axis_data needs m >= 1"));
    }
    let (own_iv, own_w, other_iv, other_w) = match axis {
        Axis::First => (sys.i1, sys.w1, sys.i2, sys.w2),
        Axis::Second => (sys.i2, sys.w2, sys.i1, sys.w1),
    };
    let rec = scalar_recurrence(own_w, own_iv, m + 1)?;
    let ratios = mixed_ratios(&rec, other_w, other_iv, m)?;
    let own_a = std::iter::once(0.0)
        .chain(rec.a[..m].iter().copied())
        .collect();
    let cross_b = rec.b[..=m]
        .iter()
        .zip(&ratios)
        .map(|(b, r)| b + r)
        .collect();
    Ok(AxisData {
        own_b: rec.b[..=m].to_vec(),
        own_a,
        cross_b,
    })
}
