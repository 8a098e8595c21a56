//! First-order bifurcating waves `h = H(p) + s v(p) cos(m q)` on a `(q, p)`
//! grid, their residuals in the height-function formulation, and recovery of
//! the stream function, velocity and pressure.

mod residual;
mod stream;

pub use residual::{
    bump_family, pb_residual, weak_residual, PbNorms, PbResidual, TestFunction, WeakResidual,
};
pub use stream::{
    physical_fields, stream_function, stream_value, surface_pressure_residual, vorticity_check,
    PhysicalRay, StreamSample, VorticityCheck,
};

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laminar::{layer_b, layer_inv_b_integral, LaminarFlow};
use crate::model::{Layer, VorticityProfile};
use crate::sturm::BifurcationPoint;

/// Grid resolution: `nq` columns per period and `np` intervals per layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub nq: usize,
    pub np: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { nq: 128, np: 100 }
    }
}

impl GridSpec {
    /// Both residual evaluations halve the grid, so `nq` must be a multiple
    /// of 4 with at least 8 columns and `np` even with at least 4 intervals.
    pub fn validate(&self) -> Result<()> {
        if self.nq < 8 || self.nq % 4 != 0 {
            return Err(Error::param("nq", format!("must be a multiple of 4, >= 8; got {}", self.nq)));
        }
        if self.np < 4 || self.np % 2 != 0 {
            return Err(Error::param("np", format!("must be even and >= 4; got {}", self.np)));
        }
        Ok(())
    }
}

/// `v`, `v'` and `v''` of an eigenfunction, interpolated between the
/// shooting nodes by cubic Hermite polynomials in `(v, v')` and `(v', v'')`.
#[derive(Debug, Clone)]
pub(crate) struct ModeShape {
    layers: Vec<Layer>,
    lambda: f64,
    mu: f64,
    steps: usize,
    v: Vec<f64>,
    dv: Vec<f64>,
}

impl ModeShape {
    fn new(profile: &VorticityProfile, point: &BifurcationPoint) -> Result<Self> {
        let ef = &point.eigenfunction;
        let steps = ef.steps_per_layer;
        let layers = profile.layers().to_vec();
        if ef.p.len() != layers.len() * steps + 1 {
            return Err(Error::param(
                "eigenfunction",
                "sample count does not match the profile",
            ));
        }
        Ok(ModeShape {
            layers,
            lambda: point.lambda,
            mu: point.mu,
            steps,
            v: ef.v.clone(),
            dv: ef.dv.clone(),
        })
    }

    /// `v''` at node `i` from the equation of layer `j` (it jumps at interfaces).
    fn second(&self, j: usize, i: usize) -> f64 {
        let layer = &self.layers[j];
        let lo = layer.lo;
        let p = lo + layer.width() * (i - j * self.steps) as f64 / self.steps as f64;
        let b = layer_b(layer, self.lambda, p);
        (self.mu * self.v[i] + 3.0 * layer.gamma * self.dv[i]) / (b * b)
    }

    /// `(v, v', v'')` at `p`, using layer `j`'s coefficients.
    pub(crate) fn eval(&self, j: usize, p: f64) -> (f64, f64, f64) {
        let layer = &self.layers[j];
        let h = layer.width() / self.steps as f64;
        let t_all = (p - layer.lo) / h;
        let cell = (t_all.floor().max(0.0) as usize).min(self.steps - 1);
        let t = t_all - cell as f64;
        let i0 = j * self.steps + cell;
        let i1 = i0 + 1;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let dd0 = self.second(j, i0);
        let dd1 = self.second(j, i1);
        let v = h00 * self.v[i0] + h10 * h * self.dv[i0] + h01 * self.v[i1] + h11 * h * self.dv[i1];
        let dv = h00 * self.dv[i0] + h10 * h * dd0 + h01 * self.dv[i1] + h11 * h * dd1;
        let b = layer_b(layer, self.lambda, p);
        let d2v = (self.mu * v + 3.0 * layer.gamma * dv) / (b * b);
        (v, dv, d2v)
    }

    /// Largest `b |v'|` over the shooting nodes.
    fn max_b_dv(&self) -> f64 {
        let mut m = 0.0f64;
        for (j, layer) in self.layers.iter().enumerate() {
            for i in j * self.steps..=(j + 1) * self.steps {
                let p = layer.lo + layer.width() * (i - j * self.steps) as f64 / self.steps as f64;
                m = m.max(layer_b(layer, self.lambda, p) * self.dv[i].abs());
            }
        }
        m
    }
}

/// Height and its derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightDerivatives {
    pub h: f64,
    pub h_q: f64,
    pub h_p: f64,
    pub h_qq: f64,
    pub h_pp: f64,
    pub h_pq: f64,
}

/// A first-order wave (or the laminar flow when `s = 0`) sampled on a grid.
#[derive(Debug, Clone)]
pub struct WaveField {
    flow: LaminarFlow,
    mode: Option<ModeShape>,
    k: u32,
    n: u32,
    wavenumber: f64,
    amplitude: f64,
    grid: GridSpec,
    q: Vec<f64>,
    p: Vec<f64>,
    /// Row-major: `h[row * nq + col]`.
    h: Vec<f64>,
}

/// `0.5 · min_p 1/(b |v'|)`: amplitudes below this keep `h_p ≥ 1/(2b) > 0`.
pub fn amplitude_bound(profile: &VorticityProfile, point: &BifurcationPoint) -> Result<f64> {
    let mode = ModeShape::new(profile, point)?;
    let m = mode.max_b_dv();
    Ok(if m > 0.0 { 0.5 / m } else { f64::INFINITY })
}

/// `h(q, p) = H(p; λ_k) + s v(p) cos(kn q)`, refusing amplitudes above
/// [`amplitude_bound`].
pub fn first_order_height(
    profile: &VorticityProfile,
    point: &BifurcationPoint,
    s: f64,
    grid: GridSpec,
) -> Result<WaveField> {
    let bound = amplitude_bound(profile, point)?;
    if !(s.abs() <= bound) {
        return Err(Error::Amplitude { s: s.abs(), bound });
    }
    first_order_height_unchecked(profile, point, s, grid)
}

/// As [`first_order_height`] without the amplitude bound.
pub fn first_order_height_unchecked(
    profile: &VorticityProfile,
    point: &BifurcationPoint,
    s: f64,
    grid: GridSpec,
) -> Result<WaveField> {
    if !s.is_finite() {
        return Err(Error::param("amplitude", "must be finite"));
    }
    let flow = LaminarFlow::new(profile.clone(), point.lambda)?;
    let mode = ModeShape::new(profile, point)?;
    WaveField::assemble(flow, Some(mode), point.k, point.n, point.wavenumber, s, grid)
}

impl WaveField {
    /// The laminar flow on a grid of one period `2π/wavenumber`.
    pub fn laminar(flow: LaminarFlow, wavenumber: f64, grid: GridSpec) -> Result<Self> {
        WaveField::assemble(flow, None, 0, 0, wavenumber, 0.0, grid)
    }

    fn assemble(
        flow: LaminarFlow,
        mode: Option<ModeShape>,
        k: u32,
        n: u32,
        wavenumber: f64,
        amplitude: f64,
        grid: GridSpec,
    ) -> Result<Self> {
        grid.validate()?;
        if !(wavenumber > 0.0 && wavenumber.is_finite()) {
            return Err(Error::param("wavenumber", format!("must be > 0, got {wavenumber}")));
        }
        let period = 2.0 * PI / wavenumber;
        let dq = period / grid.nq as f64;
        let half = grid.nq as i64 / 2;
        let q: Vec<f64> = (0..grid.nq as i64).map(|j| (j - half) as f64 * dq).collect();
        let layers = flow.profile().layers();
        let mut p = Vec::with_capacity(layers.len() * grid.np + 1);
        for (j, layer) in layers.iter().enumerate() {
            for i in 0..grid.np {
                if i == 0 && j > 0 {
                    continue;
                }
                p.push(layer.lo + layer.width() * i as f64 / grid.np as f64);
            }
            p.push(layer.hi);
        }
        let mut field = WaveField {
            flow,
            mode,
            k,
            n,
            wavenumber,
            amplitude,
            grid,
            q,
            p,
            h: Vec::new(),
        };
        let rows = field.p.len();
        let nq = grid.nq;
        let columns: Vec<Vec<f64>> = (0..nq)
            .into_par_iter()
            .map(|c| {
                (0..rows)
                    .map(|r| field.eval_in_layer(field.layer_of_row(r), field.q[c], field.p[r]).h)
                    .collect()
            })
            .collect();
        let mut h = vec![0.0; rows * nq];
        for (c, col) in columns.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                h[r * nq + c] = *v;
            }
        }
        field.h = h;
        Ok(field)
    }

    pub fn profile(&self) -> &VorticityProfile {
        self.flow.profile()
    }

    pub fn laminar_flow(&self) -> &LaminarFlow {
        &self.flow
    }

    pub fn lambda(&self) -> f64 {
        self.flow.lambda()
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn mode_index(&self) -> (u32, u32) {
        (self.k, self.n)
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.wavenumber
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn nq(&self) -> usize {
        self.grid.nq
    }

    pub fn rows(&self) -> usize {
        self.p.len()
    }

    /// `h` at grid node `(row, col)`.
    pub fn h(&self, row: usize, col: usize) -> f64 {
        self.h[row * self.grid.nq + col]
    }

    /// Mean depth `d = H(0)`.
    pub fn depth(&self) -> f64 {
        self.flow.depth()
    }

    /// Layer of a grid row; an interface row is assigned to the layer above.
    pub fn layer_of_row(&self, row: usize) -> usize {
        (row / self.grid.np).min(self.profile().n_layers() - 1)
    }

    /// Row index of breakpoint `i` (`0` is the bed).
    pub fn breakpoint_row(&self, i: usize) -> usize {
        i * self.grid.np
    }

    /// Analytic `h` and derivatives at `(q, p)` using layer `j`'s formulas
    /// (which continue smoothly slightly outside the layer).
    pub fn eval_in_layer(&self, j: usize, q: f64, p: f64) -> HeightDerivatives {
        let layer = &self.profile().layers()[j];
        let lam = self.lambda();
        let b = layer_b(layer, lam, p);
        let big_h = self.flow.breakpoint_heights()[j] + layer_inv_b_integral(layer, lam, p);
        let mut d = HeightDerivatives {
            h: big_h,
            h_q: 0.0,
            h_p: 1.0 / b,
            h_qq: 0.0,
            h_pp: layer.gamma / (b * b * b),
            h_pq: 0.0,
        };
        if let Some(mode) = &self.mode {
            if self.amplitude != 0.0 {
                let (v, dv, d2v) = mode.eval(j, p);
                let m = self.wavenumber;
                let (sn, cs) = (m * q).sin_cos();
                let s = self.amplitude;
                d.h += s * v * cs;
                d.h_p += s * dv * cs;
                d.h_pp += s * d2v * cs;
                d.h_q = -s * m * v * sn;
                d.h_qq = -s * m * m * v * cs;
                d.h_pq = -s * m * dv * sn;
            }
        }
        d
    }

    /// Analytic derivatives at `(q, p)`; at a breakpoint the layer above is used.
    pub fn eval(&self, q: f64, p: f64) -> Result<HeightDerivatives> {
        let j = self.profile().layer_index(p)?;
        Ok(self.eval_in_layer(j, q, p))
    }

    /// Surface elevation `η(q) = h(q, 0) − d`.
    pub fn eta(&self, q: f64) -> f64 {
        let top = self.profile().n_layers() - 1;
        self.eval_in_layer(top, q, 0.0).h - self.depth()
    }

    /// `h_p` at every node by centred differences inside layers and
    /// second-order one-sided differences at layer edges; interface rows
    /// contribute one value from each side.
    pub fn h_p_samples(&self) -> Vec<f64> {
        let nq = self.grid.nq;
        let np = self.grid.np;
        let mut out = Vec::with_capacity(self.h.len() + nq * self.profile().n_layers());
        for (j, layer) in self.profile().layers().iter().enumerate() {
            let dp = layer.width() / np as f64;
            let base = j * np;
            for i in 0..=np {
                let r = base + i;
                for c in 0..nq {
                    let v = if i == 0 {
                        (-3.0 * self.h(r, c) + 4.0 * self.h(r + 1, c) - self.h(r + 2, c)) / (2.0 * dp)
                    } else if i == np {
                        (3.0 * self.h(r, c) - 4.0 * self.h(r - 1, c) + self.h(r - 2, c)) / (2.0 * dp)
                    } else {
                        (self.h(r + 1, c) - self.h(r - 1, c)) / (2.0 * dp)
                    };
                    out.push(v);
                }
            }
        }
        out
    }
}

/// Result of the no-stagnation check `min h_p > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbcReport {
    pub min_h_p: f64,
    pub holds: bool,
}

pub fn check_pbc(field: &WaveField) -> PbcReport {
    let min_h_p = field
        .h_p_samples()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    PbcReport {
        min_h_p,
        holds: min_h_p > 0.0,
    }
}
