//! Bracketed bisection used by every one-dimensional solve in the crate.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]` until the bracket width drops below `xtol` or stops
/// shrinking in floating point.
///
/// The endpoint values must have opposite signs (or one of them must vanish).
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa0 = f(a)?;
    let fb0 = f(b)?;
    if fa0 == 0.0 {
        return Ok(a);
    }
    if fb0 == 0.0 {
        return Ok(b);
    }
    if !(fa0.is_finite() && fb0.is_finite()) || fa0.signum() == fb0.signum() {
        return Err(Error::numerical(format!(
            "no sign change on [{a}, {b}] (f = {fa0:e}, {fb0:e})"
        )));
    }
    let mut fa = fa0;
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        if b - a <= xtol || mid <= a || mid >= b {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if !fm.is_finite() {
            return Err(Error::numerical(format!("non-finite value at {mid}")));
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Counts sign changes of `f` on `n` equal subintervals of `[lo, hi]`.
pub(crate) fn count_sign_changes<F>(mut f: F, lo: f64, hi: f64, n: usize) -> Result<usize>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut changes = 0;
    let mut prev = f(lo)?;
    for i in 1..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let v = f(x)?;
        if v != 0.0 && prev != 0.0 && v.signum() != prev.signum() {
            changes += 1;
        }
        if v != 0.0 {
            prev = v;
        }
    }
    Ok(changes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-15).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_missing_sign_change() {
        assert!(matches!(
            bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn counts_changes() {
        let n = count_sign_changes(|x| Ok((x - 0.25) * (x - 0.75)), 0.0, 1.0, 100).unwrap();
        assert_eq!(n, 2);
    }
}
