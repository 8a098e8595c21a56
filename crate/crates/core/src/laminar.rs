//! Laminar (parallel streamline) flows.
//!
//! For a squared surface speed `λ > 2 max Γ` the laminar height function is
//! `H(p) = ∫_{p0}^p 1/b(s) ds` with `b(p) = √(λ − 2Γ(p))`. Because `Γ` is
//! linear on each layer, `b' = −γ_i/b` there and every integral of a power
//! of `b` has a closed form. We use the rationalised forms
//!
//! ```text
//! ∫_lo^p  1/b  = 2 (p − lo) / (b(lo) + b(p))
//! ∫_lo^hi 1/b³ = 2 (hi − lo) / (b(lo) b(hi) (b(lo) + b(hi)))
//! ```
//!
//! which are exact for every `γ_i`, including zero, and free of cancellation.

use crate::error::{Error, Result};
use crate::model::{Layer, VorticityProfile};

/// `b` on one layer, using that layer's formula for `Γ`.
#[inline]
pub(crate) fn layer_b(layer: &Layer, lambda: f64, p: f64) -> f64 {
    (lambda - 2.0 * layer.big_gamma(p)).sqrt()
}

/// `∫_lo^p 1/b` on a single layer.
#[inline]
pub(crate) fn layer_inv_b_integral(layer: &Layer, lambda: f64, p: f64) -> f64 {
    let b_lo = layer_b(layer, lambda, layer.lo);
    let b_p = layer_b(layer, lambda, p);
    2.0 * (p - layer.lo) / (b_lo + b_p)
}

/// `∫_lo^p 1/b³` on a single layer.
#[inline]
pub(crate) fn layer_inv_b3_integral(layer: &Layer, lambda: f64, p: f64) -> f64 {
    let b_lo = layer_b(layer, lambda, layer.lo);
    let b_p = layer_b(layer, lambda, p);
    2.0 * (p - layer.lo) / (b_lo * b_p * (b_lo + b_p))
}

/// `∫_{p0}^0 b^{-3}(p; λ) dp` for a profile, closed form.
pub fn inv_b3_integral(profile: &VorticityProfile, lambda: f64) -> f64 {
    profile
        .layers()
        .iter()
        .map(|l| layer_inv_b3_integral(l, lambda, l.hi))
        .sum()
}

/// A vorticity profile paired with the squared surface speed `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaminarFlow {
    profile: VorticityProfile,
    lambda: f64,
    /// `H` at each breakpoint, bottom to top.
    heights: Vec<f64>,
}

impl LaminarFlow {
    pub fn new(profile: VorticityProfile, lambda: f64) -> Result<Self> {
        let floor = 2.0 * profile.gamma_sup();
        if !(lambda > floor) || !lambda.is_finite() {
            return Err(Error::domain("lambda", lambda, format!("({floor}, inf)")));
        }
        let mut heights = Vec::with_capacity(profile.n_layers() + 1);
        let mut acc = 0.0;
        heights.push(0.0);
        for l in profile.layers() {
            acc += layer_inv_b_integral(l, lambda, l.hi);
            heights.push(acc);
        }
        Ok(LaminarFlow {
            profile,
            lambda,
            heights,
        })
    }

    pub fn profile(&self) -> &VorticityProfile {
        &self.profile
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `b(p) = √(λ − 2Γ(p))`.
    pub fn coefficient_b(&self, p: f64) -> Result<f64> {
        let i = self.profile.layer_index(p)?;
        Ok(layer_b(&self.profile.layers()[i], self.lambda, p))
    }

    /// Laminar height `H(p)`, with `H(p0) = 0`.
    pub fn laminar_height(&self, p: f64) -> Result<f64> {
        let i = self.profile.layer_index(p)?;
        Ok(self.heights[i] + layer_inv_b_integral(&self.profile.layers()[i], self.lambda, p))
    }

    /// `H'(p) = 1/b(p)`.
    pub fn height_slope(&self, p: f64) -> Result<f64> {
        Ok(1.0 / self.coefficient_b(p)?)
    }

    /// Mean depth `d = H(0)`.
    pub fn depth(&self) -> f64 {
        *self.heights.last().expect("at least one layer")
    }

    /// Thicknesses `d_i = H(p_i) − H(p_{i−1})`, bottom to top.
    pub fn layer_thicknesses(&self) -> Vec<f64> {
        self.profile
            .layers()
            .iter()
            .map(|l| layer_inv_b_integral(l, self.lambda, l.hi))
            .collect()
    }

    /// `H` at every breakpoint, bottom to top.
    pub fn breakpoint_heights(&self) -> &[f64] {
        &self.heights
    }

    /// Total head `Q(λ) = λ + 2 g d`.
    pub fn total_head(&self, gravity: f64) -> f64 {
        self.lambda + 2.0 * gravity * self.depth()
    }

    /// Relative speed at the surface, `√λ = b(0)`.
    pub fn surface_speed(&self) -> f64 {
        self.lambda.sqrt()
    }

    /// `1 + (2 g H(0) − Q) H'(0)²`, which vanishes for `Q = Q(λ)`.
    pub fn surface_condition(&self, gravity: f64, total_head: f64) -> f64 {
        let hp = 1.0 / self.surface_speed();
        1.0 + (2.0 * gravity * self.depth() - total_head) * hp * hp
    }

    /// Evenly spaced samples `(p, b, H, γ, Γ)` on `[p0, 0]`.
    pub fn samples(&self, n: usize) -> Result<Vec<LaminarSample>> {
        if n < 2 {
            return Err(Error::param("samples", "need at least 2 samples"));
        }
        let p0 = self.profile.p0();
        (0..n)
            .map(|j| {
                let p = if j + 1 == n {
                    0.0
                } else {
                    p0 - p0 * (j as f64) / ((n - 1) as f64)
                };
                Ok(LaminarSample {
                    p,
                    b: self.coefficient_b(p)?,
                    height: self.laminar_height(p)?,
                    gamma: self.profile.gamma_at(p)?,
                    big_gamma: self.profile.big_gamma(p)?,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaminarSample {
    pub p: f64,
    pub b: f64,
    pub height: f64,
    pub gamma: f64,
    pub big_gamma: f64,
}
