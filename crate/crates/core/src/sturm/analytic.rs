//! Closed-form solutions of `(b³ z')' − μ b z = 0` on a layer of constant
//! vorticity `γ ≠ 0`.
//!
//! With `b' = −γ/b` the substitution `z = u/b` turns the equation into
//! `γ² u_bb = μ u`, so
//!
//! ```text
//! z = (2γ/b) (β e^{−κ(b−b_a)/γ} + δ e^{κ(b−b_a)/γ}),   κ = √μ
//! ```
//!
//! The exponents are shifted by `b_a = b(p_a)` at the anchor point, which only
//! rescales `β, δ` and keeps the 2×2 fit well conditioned.

use crate::error::{Error, Result};
use crate::laminar::layer_b;
use crate::model::Layer;

/// Value and slope prescribed at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData {
    pub p: f64,
    pub z: f64,
    pub dz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticLayerSolution {
    layer: Layer,
    lambda: f64,
    kappa: f64,
    b_anchor: f64,
    pub beta: f64,
    pub delta: f64,
}

impl AnalyticLayerSolution {
    /// Solution with explicit coefficients anchored at `p_anchor`.
    pub fn with_coefficients(
        layer: Layer,
        lambda: f64,
        mu: f64,
        p_anchor: f64,
        beta: f64,
        delta: f64,
    ) -> Result<Self> {
        if layer.gamma.abs() < 1e-12 {
            return Err(Error::param("gamma", "the analytic layer solution needs γ ≠ 0"));
        }
        if !(mu >= 0.0) {
            return Err(Error::domain("mu", mu, "[0, inf)"));
        }
        let b_anchor = layer_b(&layer, lambda, p_anchor);
        if !(b_anchor > 0.0) {
            return Err(Error::domain("lambda", lambda, "b > 0 on the layer"));
        }
        Ok(AnalyticLayerSolution {
            layer,
            lambda,
            kappa: mu.sqrt(),
            b_anchor,
            beta,
            delta,
        })
    }

    /// Fits `β, δ` to the value and slope at `data.p`.
    pub fn fit(layer: Layer, lambda: f64, mu: f64, data: BoundaryData) -> Result<Self> {
        let mut sol = Self::with_coefficients(layer, lambda, mu, data.p, 0.0, 0.0)?;
        let g = layer.gamma;
        let b = sol.b_anchor;
        let k = sol.kappa;
        // rows: z = a11 β + a12 δ,  z' = a21 β + a22 δ  (E± = 1 at the anchor)
        let a11 = 2.0 * g / b;
        let a12 = a11;
        let a21 = 2.0 * g * g / b.powi(3) + 2.0 * g * k / (b * b);
        let a22 = 2.0 * g * g / b.powi(3) - 2.0 * g * k / (b * b);
        let det = a11 * a22 - a12 * a21;
        let scale = (a11.abs() + a12.abs()) * (a21.abs() + a22.abs());
        if det.abs() <= 1e-14 * scale {
            return Err(Error::Singular {
                what: "layer fit",
                detail: format!("determinant {det:e} (μ = {}, γ = {g})", k * k),
            });
        }
        sol.beta = (data.z * a22 - a12 * data.dz) / det;
        sol.delta = (a11 * data.dz - a21 * data.z) / det;
        Ok(sol)
    }

    /// `(z(p), z'(p))`.
    pub fn eval(&self, p: f64) -> (f64, f64) {
        let g = self.layer.gamma;
        let b = layer_b(&self.layer, self.lambda, p);
        let e = self.kappa * (b - self.b_anchor) / g;
        let em = self.beta * (-e).exp();
        let ep = self.delta * e.exp();
        let s = em + ep;
        let d = ep - em;
        let z = 2.0 * g / b * s;
        let dz = 2.0 * g * g / b.powi(3) * s - 2.0 * g * self.kappa / (b * b) * d;
        (z, dz)
    }

    /// `(p, z, z')` at `n + 1` evenly spaced points of the layer.
    pub fn sample(&self, n: usize) -> Vec<(f64, f64, f64)> {
        let n = n.max(1);
        (0..=n)
            .map(|i| {
                let p = if i == n {
                    self.layer.hi
                } else {
                    self.layer.lo + self.layer.width() * i as f64 / n as f64
                };
                let (z, dz) = self.eval(p);
                (p, z, dz)
            })
            .collect()
    }
}

/// Fits the closed-form solution on `layer` to `data` and samples it.
pub fn analytic_layer_solution(
    layer: Layer,
    lambda: f64,
    mu: f64,
    data: BoundaryData,
    samples: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    Ok(AnalyticLayerSolution::fit(layer, lambda, mu, data)?.sample(samples))
}
