//! Residuals of a sampled field in the height-function formulation.
//!
//! Strong form, on each open layer, at `p = 0` and at `p = p0`:
//!
//! ```text
//! (1 + h_q²) h_pp − 2 h_p h_q h_pq + h_p² h_qq − γ h_p³ = 0
//! 1 + h_q² + (2gh − Q) h_p² − 2σ h_p² h_qq / (1 + h_q²)^{3/2} = 0
//! h = 0
//! ```
//!
//! Weak form, for test functions `φ` compactly supported in the fluid:
//!
//! ```text
//! ∫ h_q/h_p φ_q − (Γ + (1 + h_q²)/(2 h_p²)) φ_p = 0
//! ```
//!
//! Every quantity is evaluated twice, on the grid and on the grid with every
//! other node dropped, and combined into the Richardson value
//! `(4 R_h − R_2h)/3` which removes the `O(Δ²)` discretisation error.

use super::WaveField;
use crate::model::PhysicalConstants;

/// Sup-norms of the strong-form residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct PbNorms {
    /// Interior residual per layer, over rows strictly inside the layer.
    pub interior: Vec<f64>,
    pub surface: f64,
    pub bottom: f64,
}

impl PbNorms {
    pub fn max_interior(&self) -> f64 {
        self.interior.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PbResidual {
    /// Centred differences on the full grid.
    pub fine: PbNorms,
    /// Same stencils with doubled steps, on every other node.
    pub coarse: PbNorms,
    /// Pointwise Richardson combination on the common nodes.
    pub extrapolated: PbNorms,
}

struct Stencil<'a> {
    field: &'a WaveField,
    stride: usize,
}

impl Stencil<'_> {
    fn col(&self, c: usize, offset: isize) -> usize {
        let nq = self.field.nq() as isize;
        (c as isize + offset * self.stride as isize).rem_euclid(nq) as usize
    }

    fn at(&self, r: usize, dr: isize, c: usize, dc: isize) -> f64 {
        let row = (r as isize + dr * self.stride as isize) as usize;
        self.field.h(row, self.col(c, dc))
    }

    fn dq(&self) -> f64 {
        self.stride as f64 * self.field.period() / self.field.nq() as f64
    }

    fn dp(&self, layer: usize) -> f64 {
        self.stride as f64 * self.field.profile().layers()[layer].width() / self.field.grid().np as f64
    }

    fn q_derivs(&self, r: usize, c: usize) -> (f64, f64) {
        let dq = self.dq();
        let (m, z, p) = (self.at(r, 0, c, -1), self.at(r, 0, c, 0), self.at(r, 0, c, 1));
        ((p - m) / (2.0 * dq), (p - 2.0 * z + m) / (dq * dq))
    }

    /// Interior residual at a row strictly inside `layer`.
    fn interior(&self, layer: usize, r: usize, c: usize) -> f64 {
        let gamma = self.field.profile().layers()[layer].gamma;
        let dp = self.dp(layer);
        let dq = self.dq();
        let h = self.at(r, 0, c, 0);
        let (up, down) = (self.at(r, 1, c, 0), self.at(r, -1, c, 0));
        let h_p = (up - down) / (2.0 * dp);
        let h_pp = (up - 2.0 * h + down) / (dp * dp);
        let (h_q, h_qq) = self.q_derivs(r, c);
        let h_pq = (self.at(r, 1, c, 1) - self.at(r, 1, c, -1) - self.at(r, -1, c, 1)
            + self.at(r, -1, c, -1))
            / (4.0 * dp * dq);
        (1.0 + h_q * h_q) * h_pp - 2.0 * h_p * h_q * h_pq + h_p * h_p * h_qq
            - gamma * h_p * h_p * h_p
    }

    fn surface(&self, constants: &PhysicalConstants, total_head: f64, c: usize) -> f64 {
        let top = self.field.rows() - 1;
        let layer = self.field.profile().n_layers() - 1;
        let dp = self.dp(layer);
        let h = self.at(top, 0, c, 0);
        let h_p = (3.0 * h - 4.0 * self.at(top, -1, c, 0) + self.at(top, -2, c, 0)) / (2.0 * dp);
        let (h_q, h_qq) = self.q_derivs(top, c);
        let slope = 1.0 + h_q * h_q;
        slope + (2.0 * constants.gravity * h - total_head) * h_p * h_p
            - 2.0 * constants.surface_tension * h_p * h_p * h_qq / slope.powf(1.5)
    }
}

/// Strong-form residual norms of `field` for total head `total_head`.
pub fn pb_residual(field: &WaveField, constants: &PhysicalConstants, total_head: f64) -> PbResidual {
    let nq = field.nq();
    let np = field.grid().np;
    let n_layers = field.profile().n_layers();
    let fine = Stencil { field, stride: 1 };
    let coarse = Stencil { field, stride: 2 };
    let mut out = PbResidual {
        fine: PbNorms { interior: vec![0.0; n_layers], surface: 0.0, bottom: 0.0 },
        coarse: PbNorms { interior: vec![0.0; n_layers], surface: 0.0, bottom: 0.0 },
        extrapolated: PbNorms { interior: vec![0.0; n_layers], surface: 0.0, bottom: 0.0 },
    };
    for j in 0..n_layers {
        for i in 1..np {
            let r = j * np + i;
            for c in 0..nq {
                let rf = fine.interior(j, r, c);
                out.fine.interior[j] = out.fine.interior[j].max(rf.abs());
                if i % 2 == 0 && c % 2 == 0 {
                    let rc = coarse.interior(j, r, c);
                    out.coarse.interior[j] = out.coarse.interior[j].max(rc.abs());
                    let ext = (4.0 * rf - rc) / 3.0;
                    out.extrapolated.interior[j] = out.extrapolated.interior[j].max(ext.abs());
                }
            }
        }
    }
    for c in 0..nq {
        let sf = fine.surface(constants, total_head, c);
        out.fine.surface = out.fine.surface.max(sf.abs());
        let bottom = field.h(0, c).abs();
        out.fine.bottom = out.fine.bottom.max(bottom);
        if c % 2 == 0 {
            let sc = coarse.surface(constants, total_head, c);
            out.coarse.surface = out.coarse.surface.max(sc.abs());
            out.extrapolated.surface = out.extrapolated.surface.max(((4.0 * sf - sc) / 3.0).abs());
            out.coarse.bottom = out.coarse.bottom.max(bottom);
            out.extrapolated.bottom = out.extrapolated.bottom.max(bottom);
        }
    }
    out
}

/// Tensor bump `B((q − qc)/rq) B((p − pc)/rp)` with `B(x) = (1 − x²)⁴`,
/// periodic in `q`.
///
/// A polynomial bump rather than `exp(−1/(1 − x²))`: the latter is so steep
/// that the midpoint rule across a breakpoint, where the step in `p` jumps,
/// is still far from its `O(Δp²)` regime at a hundred rows per layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub qc: f64,
    pub pc: f64,
    pub rq: f64,
    pub rp: f64,
}

fn bump(x: f64) -> (f64, f64) {
    if x.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let d = 1.0 - x * x;
    let d3 = d * d * d;
    (d3 * d, -8.0 * x * d3)
}

impl TestFunction {
    /// `(φ, φ_q, φ_p)` at `(q, p)` for a field of period `period`.
    pub fn eval(&self, q: f64, p: f64, period: f64) -> (f64, f64, f64) {
        let mut dq = (q - self.qc).rem_euclid(period);
        if dq > 0.5 * period {
            dq -= period;
        }
        let (bq, dbq) = bump(dq / self.rq);
        let (bp, dbp) = bump((p - self.pc) / self.rp);
        (bq * bp, dbq / self.rq * bp, bq * dbp / self.rp)
    }
}

/// Bumps centred at a few grid columns and at every layer midpoint and
/// interior breakpoint, with supports inside `(p0, 0)`. Each radius in `p` is
/// 0.45 of the narrowest layer the bump touches.
pub fn bump_family(field: &WaveField) -> Vec<TestFunction> {
    let period = field.period();
    let layers = field.profile().layers();
    let rq = 0.3 * period;
    let mut centres_p: Vec<(f64, f64)> = layers
        .iter()
        .map(|l| (0.5 * (l.lo + l.hi), 0.45 * l.width()))
        .collect();
    centres_p.extend(
        layers
            .windows(2)
            .map(|w| (w[1].lo, 0.45 * w[0].width().min(w[1].width()))),
    );
    let centres_q = [0.0, 0.25 * period, -0.375 * period];
    let mut out = Vec::new();
    for &(pc, rp) in &centres_p {
        for &qc in &centres_q {
            out.push(TestFunction { qc, pc, rq, rp });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakResidual {
    pub fine: Vec<f64>,
    pub coarse: Vec<f64>,
    pub extrapolated: Vec<f64>,
}

impl WeakResidual {
    pub fn max_extrapolated(&self) -> f64 {
        self.extrapolated.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Midpoint-rule integral of the weak form over cells of `stride` nodes.
fn weak_integral(field: &WaveField, phi: &TestFunction, stride: usize) -> f64 {
    let nq = field.nq();
    let np = field.grid().np;
    let period = field.period();
    let dq = stride as f64 * period / nq as f64;
    let mut total = 0.0;
    for (j, layer) in field.profile().layers().iter().enumerate() {
        let dp = stride as f64 * layer.width() / np as f64;
        for i in (0..np).step_by(stride) {
            let r0 = j * np + i;
            let r1 = r0 + stride;
            let pm = 0.5 * (field.p()[r0] + field.p()[r1]);
            if (pm - phi.pc).abs() >= phi.rp + dp {
                continue;
            }
            let big_gamma = layer.big_gamma(pm);
            for c in (0..nq).step_by(stride) {
                let c1 = (c + stride) % nq;
                let qm = field.q()[c] + 0.5 * dq;
                let (_, phi_q, phi_p) = phi.eval(qm, pm, period);
                if phi_q == 0.0 && phi_p == 0.0 {
                    continue;
                }
                let (a, b, cc, d) = (field.h(r0, c), field.h(r0, c1), field.h(r1, c), field.h(r1, c1));
                let h_p = (cc + d - a - b) / (2.0 * dp);
                let h_q = (b + d - a - cc) / (2.0 * dq);
                let flux = big_gamma + (1.0 + h_q * h_q) / (2.0 * h_p * h_p);
                total += (h_q / h_p * phi_q - flux * phi_p) * dq * dp;
            }
        }
    }
    total
}

/// Weak-form values for each test function.
pub fn weak_residual(field: &WaveField, tests: &[TestFunction]) -> WeakResidual {
    let fine: Vec<f64> = tests.iter().map(|t| weak_integral(field, t, 1)).collect();
    let coarse: Vec<f64> = tests.iter().map(|t| weak_integral(field, t, 2)).collect();
    let extrapolated = fine
        .iter()
        .zip(&coarse)
        .map(|(f, c)| (4.0 * f - c) / 3.0)
        .collect();
    WeakResidual {
        fine,
        coarse,
        extrapolated,
    }
}
