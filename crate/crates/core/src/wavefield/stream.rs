//! Stream function, velocity and pressure recovered from a height field.
//!
//! Along a vertical ray `x = const` the stream function solves
//! `ψ_y = −1/h_p(x, −ψ)`, `ψ(x, η(x)) = 0`. We integrate `p = −ψ` with RK4
//! in `y`, layer by layer, with the interface streamlines `y = h(x, p_i) − d`
//! as forced nodes so that `h_p` is always taken from one layer's formula.

use super::{check_pbc, WaveField};
use crate::error::{Error, Result};
use crate::integrate::rk4_integrate;
use crate::model::PhysicalConstants;

/// `ψ` sampled along one vertical ray, ordered by increasing `y`.
///
/// Samples `j·steps ..= (j+1)·steps` lie in layer `j`; interface samples are
/// shared by the two layers.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamSample {
    pub x: f64,
    pub y: Vec<f64>,
    pub psi: Vec<f64>,
    pub steps_per_layer: usize,
}

impl StreamSample {
    pub fn layer_range(&self, j: usize) -> std::ops::RangeInclusive<usize> {
        j * self.steps_per_layer..=(j + 1) * self.steps_per_layer
    }
}

fn require_pbc(field: &WaveField) -> Result<()> {
    let r = check_pbc(field);
    if r.holds {
        Ok(())
    } else {
        Err(Error::PbcViolated { min_h_p: r.min_h_p })
    }
}

/// `y` of the streamline `p = p_i` (breakpoint `i`) above `x`.
fn interface_y(field: &WaveField, x: f64, i: usize) -> f64 {
    let layers = field.profile().layers();
    let (j, p) = if i == 0 {
        (0, layers[0].lo)
    } else {
        (i - 1, layers[i - 1].hi)
    };
    field.eval_in_layer(j, x, p).h - field.depth()
}

/// Integrates `p` across layer `j` from `y0` (where `p = p_start`) to `y1`.
fn integrate_segment(
    field: &WaveField,
    j: usize,
    x: f64,
    y0: f64,
    y1: f64,
    p_start: f64,
    steps: usize,
    mut observe: impl FnMut(f64, f64),
) -> Result<f64> {
    let mut failed = None;
    let rhs = |_y: f64, s: &[f64; 1]| {
        let h_p = field.eval_in_layer(j, x, s[0]).h_p;
        [1.0 / h_p]
    };
    let end = rk4_integrate(&rhs, y0, y1, [p_start], steps, |y, s| {
        if !s[0].is_finite() && failed.is_none() {
            failed = Some(y);
        }
        observe(y, s[0]);
    });
    if failed.is_some() || !end[0].is_finite() || field.eval_in_layer(j, x, end[0]).h_p <= 0.0 {
        let min_h_p = field.eval_in_layer(j, x, end[0]).h_p;
        return Err(Error::PbcViolated { min_h_p });
    }
    Ok(end[0])
}

fn check_steps(steps: usize) -> Result<()> {
    if steps < 2 {
        return Err(Error::param("steps", "need at least 2 steps per layer"));
    }
    Ok(())
}

/// Integrates `ψ` from the surface down to the bed along `x`.
pub fn stream_function(field: &WaveField, x: f64, steps: usize) -> Result<StreamSample> {
    check_steps(steps)?;
    require_pbc(field)?;
    ray(field, x, steps)
}

fn ray(field: &WaveField, x: f64, steps: usize) -> Result<StreamSample> {
    let n = field.profile().n_layers();
    let mut y = Vec::with_capacity(n * steps + 1);
    let mut psi = Vec::with_capacity(n * steps + 1);
    let mut p = 0.0;
    for j in (0..n).rev() {
        let y_top = interface_y(field, x, j + 1);
        let y_bot = interface_y(field, x, j);
        let first = j + 1 == n;
        p = integrate_segment(field, j, x, y_top, y_bot, p, steps, |yy, pp| {
            if first || yy != y_top {
                y.push(yy);
                psi.push(-pp);
            }
        })?;
    }
    y.reverse();
    psi.reverse();
    Ok(StreamSample {
        x,
        y,
        psi,
        steps_per_layer: steps,
    })
}

/// `ψ(x, y)` and the layer containing `(x, y)`.
///
/// Points slightly above the surface are reached by continuing the top
/// layer's equation, which is what centred differences across neighbouring
/// rays need near the surface.
fn stream_value_in_layer(field: &WaveField, x: f64, y: f64, steps: usize) -> Result<(f64, usize)> {
    let n = field.profile().n_layers();
    let bed = -field.depth();
    if !(y >= bed - 1e-12 * field.depth().max(1.0)) {
        return Err(Error::domain("y", y, format!("[{bed}, eta(x)]")));
    }
    let mut p = 0.0;
    let mut y_top = interface_y(field, x, n);
    for j in (0..n).rev() {
        let y_bot = interface_y(field, x, j);
        if y >= y_bot || j == 0 {
            let p_end = integrate_segment(field, j, x, y_top, y, p, steps, |_, _| {})?;
            return Ok((-p_end, j));
        }
        p = integrate_segment(field, j, x, y_top, y_bot, p, steps, |_, _| {})?;
        y_top = y_bot;
    }
    unreachable!("the bottom layer always returns")
}

/// `ψ(x, y)` by integration from the surface with `steps` RK4 steps per layer.
pub fn stream_value(field: &WaveField, x: f64, y: f64, steps: usize) -> Result<f64> {
    check_steps(steps)?;
    require_pbc(field)?;
    Ok(stream_value_in_layer(field, x, y, steps)?.0)
}

/// Velocity and pressure along one ray.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalRay {
    pub x: f64,
    pub y: Vec<f64>,
    pub psi: Vec<f64>,
    /// `u − c = ψ_y = −1/h_p`.
    pub u_minus_c: Vec<f64>,
    /// `v = −ψ_x` by centred differences across the rays `x ± dx`.
    pub v: Vec<f64>,
    /// Bernoulli pressure with atmospheric pressure 0.
    pub pressure: Vec<f64>,
    pub bernoulli_constant: f64,
}

/// Crest position: `q = 0` when `s v(0) ≥ 0`, otherwise half a period.
fn crest(field: &WaveField) -> f64 {
    if field.eta(0.0) >= field.eta(0.5 * field.period()) {
        0.0
    } else {
        0.5 * field.period()
    }
}

/// `−σ η''/(1 + η'²)^{3/2}` at `x`.
fn capillary_pressure(field: &WaveField, constants: &PhysicalConstants, x: f64) -> f64 {
    let top = field.profile().n_layers() - 1;
    let d = field.eval_in_layer(top, x, 0.0);
    -constants.surface_tension * d.h_qq / (1.0 + d.h_q * d.h_q).powf(1.5)
}

/// The constant in `((u−c)² + v²)/2 + g y + P + Γ(−ψ) = C`, fixed by the
/// dynamic condition at the crest where `v = 0`.
fn bernoulli_constant(field: &WaveField, constants: &PhysicalConstants) -> f64 {
    let xc = crest(field);
    let top = field.profile().n_layers() - 1;
    let u = -1.0 / field.eval_in_layer(top, xc, 0.0).h_p;
    capillary_pressure(field, constants, xc) + 0.5 * u * u + constants.gravity * field.eta(xc)
}

pub fn physical_fields(
    field: &WaveField,
    constants: &PhysicalConstants,
    x: f64,
    dx: f64,
    steps: usize,
) -> Result<PhysicalRay> {
    if !(dx > 0.0) {
        return Err(Error::param("dx", "must be > 0"));
    }
    let central = stream_function(field, x, steps)?;
    let c = bernoulli_constant(field, constants);
    let n = field.profile().n_layers();
    let mut u_minus_c = Vec::with_capacity(central.y.len());
    let mut v = Vec::with_capacity(central.y.len());
    let mut pressure = Vec::with_capacity(central.y.len());
    for (i, (&y, &psi)) in central.y.iter().zip(&central.psi).enumerate() {
        let j = (i / steps).min(n - 1);
        let p = -psi;
        let u = -1.0 / field.eval_in_layer(j, x, p).h_p;
        let plus = stream_value_in_layer(field, x + dx, y, steps)?.0;
        let minus = stream_value_in_layer(field, x - dx, y, steps)?.0;
        let vv = -(plus - minus) / (2.0 * dx);
        let big_gamma = field.profile().layers()[j].big_gamma(p);
        u_minus_c.push(u);
        v.push(vv);
        pressure.push(c - 0.5 * (u * u + vv * vv) - constants.gravity * y - big_gamma);
    }
    Ok(PhysicalRay {
        x,
        y: central.y,
        psi: central.psi,
        u_minus_c,
        v,
        pressure,
        bernoulli_constant: c,
    })
}

/// Largest deviation of the surface pressure from `−σ κ` over `xs`, using
/// the kinematic condition `v = (u − c) η'` at the surface.
pub fn surface_pressure_residual(
    field: &WaveField,
    constants: &PhysicalConstants,
    xs: &[f64],
) -> Result<f64> {
    require_pbc(field)?;
    let c = bernoulli_constant(field, constants);
    let top = field.profile().n_layers() - 1;
    Ok(xs
        .iter()
        .map(|&x| {
            let d = field.eval_in_layer(top, x, 0.0);
            let u = -1.0 / d.h_p;
            let v = u * d.h_q;
            let p = c - 0.5 * (u * u + v * v) - constants.gravity * field.eta(x);
            (p - capillary_pressure(field, constants, x)).abs()
        })
        .fold(0.0, f64::max))
}

/// `u_y − v_x` recovered by centred differences.
///
/// `gamma` is the prescribed `γ(−ψ)`. `implied` is the vorticity of the
/// sampled height function itself,
/// `((1 + h_q²) h_pp − 2 h_p h_q h_pq + h_p² h_qq)/h_p³`, which equals `γ`
/// only when `h` solves the interior equation exactly; for a first-order
/// field the two differ by `O(s²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VorticityCheck {
    pub y: Vec<f64>,
    pub omega: Vec<f64>,
    pub gamma: Vec<f64>,
    pub implied: Vec<f64>,
    /// `max |ω − γ|`.
    pub max_error: f64,
    /// `max |ω − implied|`: the finite-difference error alone.
    pub max_discretisation_error: f64,
}

/// Differences `ψ` along the ray (`u_y = ψ_yy`) and across the rays `x ± dx`
/// (`v_x = −ψ_xx`). Nodes on an interface, or whose neighbours across rays
/// fall in another layer, are skipped.
pub fn vorticity_check(field: &WaveField, x: f64, dx: f64, steps: usize) -> Result<VorticityCheck> {
    if !(dx > 0.0) {
        return Err(Error::param("dx", "must be > 0"));
    }
    let central = stream_function(field, x, steps)?;
    let n = field.profile().n_layers();
    let mut out = VorticityCheck {
        y: Vec::new(),
        omega: Vec::new(),
        gamma: Vec::new(),
        implied: Vec::new(),
        max_error: 0.0,
        max_discretisation_error: 0.0,
    };
    for j in 0..n {
        let range = central.layer_range(j);
        let (lo, hi) = (*range.start(), *range.end());
        for i in lo + 1..hi {
            let y = central.y[i];
            let (plus, jp) = stream_value_in_layer(field, x + dx, y, steps)?;
            let (minus, jm) = stream_value_in_layer(field, x - dx, y, steps)?;
            if jp != j || jm != j {
                continue;
            }
            let dy_lo = y - central.y[i - 1];
            let dy_hi = central.y[i + 1] - y;
            let psi = &central.psi;
            let psi_yy = 2.0
                * (dy_lo * psi[i + 1] - (dy_lo + dy_hi) * psi[i] + dy_hi * psi[i - 1])
                / (dy_lo * dy_hi * (dy_lo + dy_hi));
            let psi_xx = (plus - 2.0 * psi[i] + minus) / (dx * dx);
            let omega = psi_yy + psi_xx;
            let gamma = field.profile().layers()[j].gamma;
            let d = field.eval_in_layer(j, x, -psi[i]);
            let implied = ((1.0 + d.h_q * d.h_q) * d.h_pp - 2.0 * d.h_p * d.h_q * d.h_pq
                + d.h_p * d.h_p * d.h_qq)
                / (d.h_p * d.h_p * d.h_p);
            out.max_error = out.max_error.max((omega - gamma).abs());
            out.max_discretisation_error =
                out.max_discretisation_error.max((omega - implied).abs());
            out.y.push(y);
            out.omega.push(omega);
            out.gamma.push(gamma);
            out.implied.push(implied);
        }
    }
    Ok(out)
}
