//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Absolute tolerance `rel * max(1, |x|)` used throughout for roots.
#[inline]
pub fn scaled_tolerance(rel: f64, x: f64) -> f64 {
    rel * x.abs().max(1.0)
}

/// Bisection on `[lo, hi]` driven only by the sign of `f`.
///
/// `positive_at_hi` tells which end carries the positive sign so that the
/// endpoints need never be evaluated (they may be singular). Stops when the
/// bracket is narrower than `tol(mid)`.
pub fn bisect_by_sign<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    positive_at_hi: bool,
    tol: impl Fn(f64) -> f64,
    max_iter: usize,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Err(Error::numeric("bisect", format!("empty bracket [{lo}, {hi}]")));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol(mid) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let v = f(mid)?;
        if v.is_nan() {
            return Err(Error::numeric("bisect", format!("NaN at {mid}")));
        }
        if v == 0.0 {
            return Ok(mid);
        }
        if (v > 0.0) == positive_at_hi {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection on a bracket with evaluated endpoints of opposite sign.
pub fn bisect<F>(f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::numeric(
            "bisect",
            format!("no sign change on [{lo}, {hi}]: f = {flo}, {fhi}"),
        ));
    }
    bisect_by_sign(|x| Ok(f(x)), lo, hi, fhi > 0.0, |_| tol, max_iter)
}
