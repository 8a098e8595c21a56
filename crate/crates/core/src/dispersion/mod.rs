//! Two-layer dispersion relation, its reductions, and the multiplier symbol.
//!
//! With `x = √λ = c − u(0)`, `G = g + σk²`, `t_i = tanh(k d_i)` the relation
//!
//! ```text
//! (γ2 − γ1)/(x + γ2 d2) · (G − γ2 x − k x² coth(k d2))
//!     = k (coth(k d1) + coth(k d2)) · (G − γ2 x − k x² coth(k d))
//! ```
//!
//! is equivalent, after multiplying by `x + γ2 d2`, to the monic cubic
//!
//! ```text
//! x³ + C2 x² + C1 x + C0 = 0
//! C2 = γ2 d2 + (γ2 t2 + γ1 t1) / (k (1 + t1 t2))
//! C1 = tanh(kd) [(γ2² d2 − G)/k + γ2 (γ1 − γ2) t1 t2 / (k² (t1 + t2))]
//! C0 = G tanh(kd)/k² [(γ2 − γ1) t1 t2 / (t1 + t2) − γ2 d2 k]
//! ```
//!
//! written with `tanh` only so that nothing overflows for large `k d`.

mod cubic;
mod symbol;

pub use cubic::{eval_monic, real_roots};
pub use symbol::{
    coth, k_coth, multiplier_symbol, symbol_decay_check, MultiplierSymbolInput, SymbolDecay,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laminar::LaminarFlow;
use crate::model::{PhysicalConstants, VorticityProfile};
use crate::sturm::{SolverConfig, SturmProblem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionInput {
    pub d1: f64,
    pub d2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub g: f64,
    pub sigma: f64,
    pub k: u32,
}

impl DispersionInput {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, why: String| Err(Error::param(name, why));
        if !(self.d1 > 0.0 && self.d1.is_finite()) {
            return bad("d1", format!("must be > 0, got {}", self.d1));
        }
        if !(self.d2 > 0.0 && self.d2.is_finite()) {
            return bad("d2", format!("must be > 0, got {}", self.d2));
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return bad("g", format!("must be > 0, got {}", self.g));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad("sigma", format!("must be >= 0, got {}", self.sigma));
        }
        if self.k == 0 {
            return bad("k", "must be >= 1".into());
        }
        if !(self.gamma1.is_finite() && self.gamma2.is_finite()) {
            return bad("gamma", "vorticities must be finite".into());
        }
        Ok(())
    }

    /// Thicknesses and vorticities of a two-layer laminar flow.
    pub fn from_laminar(flow: &LaminarFlow, constants: &PhysicalConstants, k: u32) -> Result<Self> {
        let profile = flow.profile();
        if profile.n_layers() != 2 {
            return Err(Error::param(
                "profile",
                format!("the dispersion relation needs two layers, got {}", profile.n_layers()),
            ));
        }
        let d = flow.layer_thicknesses();
        Ok(DispersionInput {
            d1: d[0],
            d2: d[1],
            gamma1: profile.vorticities()[0],
            gamma2: profile.vorticities()[1],
            g: constants.gravity,
            sigma: constants.surface_tension,
            k,
        })
    }

    fn load(&self) -> f64 {
        let k = self.k as f64;
        self.g + self.sigma * k * k
    }

    /// `(C2, C1, C0)` of the monic cubic in `x = √λ`.
    pub fn cubic_coefficients(&self) -> (f64, f64, f64) {
        let k = self.k as f64;
        let (g1, g2, d2) = (self.gamma1, self.gamma2, self.d2);
        let t1 = (k * self.d1).tanh();
        let t2 = (k * d2).tanh();
        let td = (t1 + t2) / (1.0 + t1 * t2);
        let ss = t1 * t2 / (t1 + t2);
        let big_g = self.load();
        let c2 = g2 * d2 + (g2 * t2 + g1 * t1) / (k * (1.0 + t1 * t2));
        let c1 = td * ((g2 * g2 * d2 - big_g) / k + g2 * (g1 - g2) * ss / (k * k));
        let c0 = big_g * td / (k * k) * ((g2 - g1) * ss - g2 * d2 * k);
        (c2, c1, c0)
    }
}

/// The relation evaluated at a candidate `x = √λ` in both forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionResidual {
    /// `x³ + C2 x² + C1 x + C0`.
    pub cubic: f64,
    /// Left minus right side of the fractional form.
    pub fractional: f64,
    /// Sum of the magnitudes of the terms of the fractional form.
    pub fractional_scale: f64,
    /// The fractional form with denominators cleared; equals `cubic` exactly
    /// in exact arithmetic.
    pub cleared: f64,
}

impl DispersionResidual {
    /// Relative disagreement between `cubic` and `cleared`.
    pub fn form_mismatch(&self, x: f64) -> f64 {
        let scale = 1.0 + x.abs().powi(3);
        (self.cubic - self.cleared).abs() / scale.max(self.cubic.abs())
    }
}

pub fn dispersion_residual(x: f64, input: &DispersionInput) -> Result<DispersionResidual> {
    input.validate()?;
    let k = input.k as f64;
    let (g1, g2) = (input.gamma1, input.gamma2);
    let big_g = input.load();
    let c1 = coth(k * input.d1);
    let c2 = coth(k * input.d2);
    let cd = coth(k * (input.d1 + input.d2));
    let a = x + g2 * input.d2;
    let inner2 = big_g - g2 * x - k * x * x * c2;
    let inner_d = big_g - g2 * x - k * x * x * cd;
    let lhs = (g2 - g1) / a * inner2;
    let rhs = k * (c1 + c2) * inner_d;
    let fractional = lhs - rhs;
    let fractional_scale = ((g2 - g1) / a).abs() * (big_g.abs() + (g2 * x).abs() + k * x * x * c2)
        + k * (c1 + c2) * (big_g.abs() + (g2 * x).abs() + k * x * x * cd);
    // multiply by a and divide by the leading coefficient −k² coth(kd) (c1 + c2)
    let cleared = (a * rhs - (g2 - g1) * inner2) / (-k * k * cd * (c1 + c2));
    let (b2, b1, b0) = input.cubic_coefficients();
    Ok(DispersionResidual {
        cubic: eval_monic(b2, b1, b0, x),
        fractional,
        fractional_scale,
        cleared,
    })
}

/// Positive roots `x = √λ` of the relation, ascending.
///
/// Roots of the cubic are kept when `x > 0` and `x + γ2 d2 > 0`; the latter
/// is `b(p1) > 0` and removes the root `x = −γ2 d2` that clearing the
/// denominator introduces when `γ1 = γ2`. Both are tested with a margin of
/// `1e-9` times the largest root so that a rounded copy of that spurious
/// root is dropped.
pub fn solve_dispersion(input: &DispersionInput) -> Result<Vec<f64>> {
    input.validate()?;
    let (c2, c1, c0) = input.cubic_coefficients();
    let roots = real_roots(c2, c1, c0);
    let shift = input.gamma2 * input.d2;
    let size = roots.iter().fold(shift.abs(), |m, r| m.max(r.abs()));
    let margin = 1e-9 * size;
    Ok(roots
        .into_iter()
        .filter(|&x| x > margin && x + shift > margin)
        .collect())
}

/// `c − u(0)` on a single linearly sheared current of vorticity `γ`:
/// `−(γ/2) T + √(γ² T²/4 + (g + σk²) T)` with `T = tanh(kd)/k`.
pub fn special_case_equal_vorticity(gamma: f64, d: f64, k: u32, g: f64, sigma: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::param("d", format!("must be > 0, got {d}")));
    }
    if k == 0 {
        return Err(Error::param("k", "must be >= 1"));
    }
    let kf = k as f64;
    let t = (kf * d).tanh() / kf;
    let big_g = g + sigma * kf * kf;
    let half = 0.5 * gamma * t;
    let root = (half * half + big_g * t).sqrt();
    if half >= 0.0 {
        Ok(big_g * t / (half + root))
    } else {
        Ok(root - half)
    }
}

/// One `Ξ(·, k²)` root checked against the closed-form relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingDispersionPair {
    pub k: u32,
    pub lambda: f64,
    /// `Ξ(λ*, k²)` relative to the terms it cancels.
    pub xi: f64,
    pub d1: f64,
    pub d2: f64,
    pub residual: DispersionResidual,
    /// Cubic root closest to `√λ*`, if any.
    pub nearest_cubic_root: Option<f64>,
}

impl ShootingDispersionPair {
    /// `|x_cubic − √λ*| / √λ*`.
    pub fn root_mismatch(&self) -> Option<f64> {
        let x = self.lambda.sqrt();
        self.nearest_cubic_root.map(|r| (r - x).abs() / x)
    }
}

/// Finds every `λ*` with `Ξ(λ*, k²) = 0` for a two-layer profile and
/// evaluates the dispersion relation with `d_i(λ*)`.
///
/// The search covers `(2 max Γ, λ₀]` by a geometric scan, where the gravity
/// branch lives, and adds the bifurcation root above `λ₀` when `σ > 0` and
/// `k² ≥ μ(λ₀)`.
pub fn dispersion_vs_shooting(
    profile: &VorticityProfile,
    constants: &PhysicalConstants,
    k: u32,
    config: &SolverConfig,
) -> Result<Vec<ShootingDispersionPair>> {
    if profile.n_layers() != 2 {
        return Err(Error::param(
            "profile",
            format!("needs two layers, got {}", profile.n_layers()),
        ));
    }
    if k == 0 {
        return Err(Error::param("k", "must be >= 1"));
    }
    let problem = SturmProblem::new(profile.clone(), *constants, *config)?;
    let mu = (k as f64) * (k as f64);
    let floor = 2.0 * profile.gamma_sup();
    let l0 = problem.lambda0();
    let lo = floor + 1e-3 * (l0 - floor).max(1.0).min(l0 - floor);
    let mut roots = if lo < l0 {
        problem.xi_roots_in_lambda(mu, lo, l0, 400)?
    } else {
        Vec::new()
    };
    // without surface tension Ξ need not turn negative in μ above λ₀, so
    // the zero curve is only searched when σ > 0
    let mu0 = if constants.surface_tension > 0.0 {
        Some(problem.mu0()?)
    } else {
        None
    };
    if mu0.is_some_and(|m0| mu >= m0) {
        let bp = problem.bifurcation(k, 1)?;
        let tol = config.tolerance(bp.lambda) * 10.0;
        if roots.iter().all(|r| (r - bp.lambda).abs() > tol) {
            roots.push(bp.lambda);
        }
    }
    if roots.is_empty() {
        return Err(Error::NotFound(format!(
            "no root of Xi(., {mu}) in ({lo}, {l0}] or above lambda0"
        )));
    }
    roots
        .into_iter()
        .map(|lambda| {
            let flow = LaminarFlow::new(profile.clone(), lambda)?;
            let input = DispersionInput::from_laminar(&flow, constants, k)?;
            let x = lambda.sqrt();
            let residual = dispersion_residual(x, &input)?;
            let nearest_cubic_root = solve_dispersion(&input)?
                .into_iter()
                .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()));
            Ok(ShootingDispersionPair {
                k,
                lambda,
                xi: problem.xi_relative(lambda, mu)?,
                d1: input.d1,
                d2: input.d2,
                residual,
                nearest_cubic_root,
            })
        })
        .collect()
}
