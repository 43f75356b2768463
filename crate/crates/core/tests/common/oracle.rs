//! Exact rational recurrence coefficients from moments.
//!
//! The type II polynomial `P_n` (monic, degree `n1 + n2`) is found by solving
//! the orthogonality conditions over the rationals. Then
//! `b_{n,j} = c_n - c_{n+e_j}` with `c_n` the subleading coefficient, and
//! `a_{n,1} = <P_n, x^{n1}>_1 / <P_{n-e1}, x^{n1-1}>_1` (likewise for `a_{n,2}`).

use std::collections::HashMap;

use angelesco_core::{AngelescoSystem, Interval, WeightKind};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Q = BigRational;

fn q(v: f64) -> Q {
    Q::from_float(v).expect("finite endpoint")
}

fn int(v: u64) -> Q {
    Q::from_integer(BigInt::from(v))
}

fn binom(n: u64, k: u64) -> Q {
    let mut r = Q::one();
    for i in 0..k {
        r = r * int(n - i) / int(i + 1);
    }
    r
}

/// Moments `E[t^j]`, `j < count`, of the normalized weight on `[-1, 1]`.
fn reference_moments(w: WeightKind, count: usize) -> Vec<Q> {
    (0..count as u64)
        .map(|j| {
            if j % 2 == 1 {
                return Q::zero();
            }
            let k = j / 2;
            let four_k = Q::from_integer(BigInt::from(4u64).pow(k as u32));
            match w {
                WeightKind::Chebyshev1 => binom(2 * k, k) / four_k,
                WeightKind::Chebyshev2 => binom(2 * k, k) / int(k + 1) / four_k,
                WeightKind::Uniform => Q::one() / int(2 * k + 1),
            }
        })
        .collect()
}

/// Moments `E[x^j]` of the weight transported to `iv`.
pub fn moments(w: WeightKind, iv: Interval, count: usize) -> Vec<Q> {
    let t = reference_moments(w, count);
    let two = int(2);
    let mid = (q(iv.lo) + q(iv.hi)) / &two;
    let half = (q(iv.hi) - q(iv.lo)) / &two;
    (0..count)
        .map(|j| {
            t[..=j]
                .iter()
                .enumerate()
                .map(|(i, ti)| binom(j as u64, i as u64) * pow(&mid, j - i) * pow(&half, i) * ti)
                .sum()
        })
        .collect()
}

fn pow(x: &Q, e: usize) -> Q {
    let mut r = Q::one();
    for _ in 0..e {
        r *= x;
    }
    r
}

/// Solves `m x = rhs` by Gaussian elimination with nonzero pivoting.
#[allow(clippy::needless_range_loop)]
fn solve(mut m: Vec<Vec<Q>>, mut rhs: Vec<Q>) -> Vec<Q> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .expect("singular moment system");
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &m[col][col];
            for c in col..n {
                let v = &f * &m[col][c];
                m[r][c] -= v;
            }
            let v = &f * &rhs[col];
            rhs[r] -= v;
        }
    }
    (0..n).map(|i| &rhs[i] / &m[i][i]).collect()
}

/// Exact sites of the lattice for one system.
pub struct Oracle {
    mom: [Vec<Q>; 2],
    cache: HashMap<(usize, usize), Vec<Q>>,
}

/// Exact coefficients at one multi-index.
#[derive(Debug, Clone)]
pub struct ExactSite {
    pub b1: Q,
    pub b2: Q,
    pub a1: Q,
    pub a2: Q,
}

impl ExactSite {
    pub fn to_f64(&self) -> [f64; 4] {
        let f = |x: &Q| x.to_f64().expect("representable");
        [f(&self.a1), f(&self.a2), f(&self.b1), f(&self.b2)]
    }
}

impl Oracle {
    /// Oracle able to serve sites with `|n| <= max_level`.
    pub fn new(sys: &AngelescoSystem, max_level: usize) -> Self {
        let count = 2 * max_level + 4;
        Oracle {
            mom: [
                moments(sys.w1, sys.i1, count),
                moments(sys.w2, sys.i2, count),
            ],
            cache: HashMap::new(),
        }
    }

    /// Coefficients `p_0..p_{N-1}, 1` of the monic `P_n`, lowest degree first.
    pub fn poly(&mut self, n1: usize, n2: usize) -> Vec<Q> {
        if let Some(p) = self.cache.get(&(n1, n2)) {
            return p.clone();
        }
        let big_n = n1 + n2;
        let mut rows = Vec::with_capacity(big_n);
        let mut rhs = Vec::with_capacity(big_n);
        for (k, nk) in [n1, n2].into_iter().enumerate() {
            for j in 0..nk {
                rows.push((0..big_n).map(|i| self.mom[k][i + j].clone()).collect());
                rhs.push(-self.mom[k][big_n + j].clone());
            }
        }
        let mut p = if big_n == 0 {
            Vec::new()
        } else {
            solve(rows, rhs)
        };
        p.push(Q::one());
        self.cache.insert((n1, n2), p.clone());
        p
    }

    /// `<P_n, x^j>` against measure `k` (0 or 1).
    fn pairing(&mut self, n1: usize, n2: usize, k: usize, j: usize) -> Q {
        let p = self.poly(n1, n2);
        p.iter()
            .enumerate()
            .map(|(i, c)| c * &self.mom[k][i + j])
            .sum()
    }

    fn subleading(&mut self, n1: usize, n2: usize) -> Q {
        let p = self.poly(n1, n2);
        if p.len() < 2 {
            Q::zero()
        } else {
            p[p.len() - 2].clone()
        }
    }

    pub fn site(&mut self, n1: usize, n2: usize) -> ExactSite {
        let c = self.subleading(n1, n2);
        let b1 = &c - self.subleading(n1 + 1, n2);
        let b2 = &c - self.subleading(n1, n2 + 1);
        let a1 = if n1 == 0 {
            Q::zero()
        } else {
            self.pairing(n1, n2, 0, n1) / self.pairing(n1 - 1, n2, 0, n1 - 1)
        };
        let a2 = if n2 == 0 {
            Q::zero()
        } else {
            self.pairing(n1, n2, 1, n2) / self.pairing(n1, n2 - 1, 1, n2 - 1)
        };
        ExactSite { b1, b2, a1, a2 }
    }
}

/// Relative distance `|x - y| / max(1, |y|)` against an exact value.
pub fn rel_err(x: f64, y: &Q) -> f64 {
    let yf = y.to_f64().expect("representable");
    let scale = yf.abs().max(1.0);
    (x - yf).abs() / scale
}
