//! Real roots of monic cubics by the trigonometric / Cardano formulas,
//! polished by bisection.

use std::f64::consts::PI;

/// `x³ + a x² + b x + c` by Horner's rule.
#[inline]
pub fn eval_monic(a: f64, b: f64, c: f64, x: f64) -> f64 {
    ((x + a) * x + b) * x + c
}

/// All real roots of `x³ + a x² + b x + c`, ascending, each polished to an
/// absolute width of `1e-12 · max(1, |x|)` where a sign change brackets it.
pub fn real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let scale = 1.0 + a.abs() + b.abs().sqrt() + c.abs().cbrt();
    let mut roots: Vec<f64> = if p.abs() <= 1e-15 * scale * scale {
        vec![(-q).cbrt() - shift]
    } else {
        let disc = q * q / 4.0 + p * p * p / 27.0;
        if disc > 0.0 {
            // one real root; pick the non-cancelling branch
            let s = disc.sqrt();
            let u = if q > 0.0 { -(q / 2.0 + s) } else { -q / 2.0 + s };
            let u = u.cbrt();
            let t = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
            vec![t - shift]
        } else {
            let m = 2.0 * (-p / 3.0).sqrt();
            let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
            let theta = arg.acos() / 3.0;
            (0..3)
                .map(|j| m * (theta - 2.0 * PI * j as f64 / 3.0).cos() - shift)
                .collect()
        }
    };
    roots.sort_by(|x, y| x.total_cmp(y));
    let polished: Vec<f64> = (0..roots.len())
        .map(|i| {
            let lo_gap = if i > 0 { roots[i] - roots[i - 1] } else { f64::INFINITY };
            let hi_gap = if i + 1 < roots.len() { roots[i + 1] - roots[i] } else { f64::INFINITY };
            polish(a, b, c, roots[i], 0.5 * lo_gap.min(hi_gap))
        })
        .collect();
    let mut out: Vec<f64> = Vec::with_capacity(3);
    for r in polished {
        if out.last().map_or(true, |&l: &f64| (r - l).abs() > 1e-12 * r.abs().max(1.0)) {
            out.push(r);
        }
    }
    out
}

/// Bisection inside the widest sign-change bracket around `x0` that stays
/// within `max_radius` of it; returns `x0` unchanged when none is found.
fn polish(a: f64, b: f64, c: f64, x0: f64, max_radius: f64) -> f64 {
    let f = |x| eval_monic(a, b, c, x);
    let f0 = f(x0);
    if f0 == 0.0 {
        return x0;
    }
    let tol = 1e-12 * x0.abs().max(1.0);
    let mut r = 1e-14 * x0.abs().max(1.0);
    while r < max_radius {
        let (lo, hi) = (x0 - r, x0 + r);
        let (flo, fhi) = (f(lo), f(hi));
        if flo.signum() != fhi.signum() {
            let (mut lo, mut hi, up) = (lo, hi, fhi > 0.0);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 {
                    return mid;
                }
                if (fm > 0.0) == up {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        r *= 4.0;
    }
    x0
}
