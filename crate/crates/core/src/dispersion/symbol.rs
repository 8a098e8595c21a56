//! The Fourier multiplier `λ_k` of the two-layer interface trace map.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laminar::LaminarFlow;

/// `coth x` for `x > 0`, with a series branch near zero.
pub fn coth(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 / x + x / 3.0 - x * x * x / 45.0
    } else {
        1.0 + 2.0 / (2.0 * x).exp_m1()
    }
}

/// `k coth(θ k)`, continued to `1/θ` at `k = 0`.
pub fn k_coth(theta: f64, k: f64) -> f64 {
    let x = theta * k;
    if x == 0.0 {
        1.0 / theta
    } else if x.abs() < 1e-4 {
        (1.0 + x * x / 3.0 - x.powi(4) / 45.0) / theta
    } else {
        k * coth(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplierSymbolInput {
    /// `b(p1)`, the laminar speed at the interface.
    pub a_p1: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub theta1: f64,
    pub theta2: f64,
}

impl MultiplierSymbolInput {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a_p1", self.a_p1), ("theta1", self.theta1), ("theta2", self.theta2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param("symbol input", format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.gamma1.is_finite() && self.gamma2.is_finite()) {
            return Err(Error::param("symbol input", "vorticities must be finite"));
        }
        Ok(())
    }

    /// Symbol data of a two-layer laminar flow: `a = b(p1)`, `Θ_i = d_i`.
    pub fn from_laminar(flow: &LaminarFlow) -> Result<Self> {
        let profile = flow.profile();
        if profile.n_layers() != 2 {
            return Err(Error::param(
                "profile",
                format!("the symbol needs two layers, got {}", profile.n_layers()),
            ));
        }
        let p1 = profile.breakpoints()[1];
        let d = flow.layer_thicknesses();
        Ok(MultiplierSymbolInput {
            a_p1: flow.coefficient_b(p1)?,
            gamma1: profile.vorticities()[0],
            gamma2: profile.vorticities()[1],
            theta1: d[0],
            theta2: d[1],
        })
    }
}

/// `λ_k = a² / (γ1 − γ2 + a [coth(Θ1|k|) + coth(Θ2|k|)] |k|)`.
pub fn multiplier_symbol(input: &MultiplierSymbolInput, k: i64) -> Result<f64> {
    input.validate()?;
    let a = input.a_p1;
    let kk = k.unsigned_abs() as f64;
    let jump = input.gamma1 - input.gamma2;
    let coupling = a * (k_coth(input.theta1, kk) + k_coth(input.theta2, kk));
    let denom = jump + coupling;
    if denom.abs() < 1e-12 * (jump.abs() + coupling.abs()).max(1.0) {
        return Err(Error::Singular {
            what: "multiplier symbol",
            detail: format!("denominator {denom:e} at k = {k}"),
        });
    }
    Ok(a * a / denom)
}

/// Decay of the symbol up to `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolDecay {
    /// `max_{1≤k≤K} |k λ_k|`.
    pub max_k_lambda: f64,
    /// `max_{1≤k≤K} |k² (λ_{k+1} − λ_k)|`.
    pub max_k2_diff: f64,
}

pub fn symbol_decay_check(input: &MultiplierSymbolInput, k_max: u32) -> Result<SymbolDecay> {
    if k_max < 2 {
        return Err(Error::param("k_max", format!("must be >= 2, got {k_max}")));
    }
    let mut max_k_lambda = 0.0f64;
    let mut max_k2_diff = 0.0f64;
    let mut current = multiplier_symbol(input, 1)?;
    for k in 1..=k_max as i64 {
        let next = multiplier_symbol(input, k + 1)?;
        let kf = k as f64;
        max_k_lambda = max_k_lambda.max((kf * current).abs());
        max_k2_diff = max_k2_diff.max((kf * kf * (next - current)).abs());
        current = next;
    }
    Ok(SymbolDecay {
        max_k_lambda,
        max_k2_diff,
    })
}
