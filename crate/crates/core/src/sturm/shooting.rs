//! Shooting for the reduced Sturm–Liouville problem
//!
//! ```text
//! (b³ z')' − μ b z = 0  on (p0, 0)
//! ```
//!
//! in the flux variables `(z, w = b³ z')`. The left shot starts from
//! `z(p0) = 0, z'(p0) = 1`; the right shot from `v(0) = λ^{3/2}`,
//! `v'(0) = g + σμ`. Each layer is integrated separately so breakpoints are
//! always nodes; `w` is continuous across them.
//!
//! The left shot optionally carries the variational states for `∂/∂μ` and
//! `∂/∂λ` and an energy integral used by the second `Ξ_λ` channel:
//!
//! ```text
//! z_μ' = w_μ / b³              w_μ' = μ b z_μ + b z
//! z_λ' = (w_λ − 3w/(2b²)) / b³  w_λ' = μ b z_λ + μ z / (2b)
//! E'   = (3b/2) z'² + μ z² / (2b)
//! ```
//!
//! where `w_λ = ∂w/∂λ = b³ z_λ' + (3b/2) z'`.

use crate::error::{Error, Result};
use crate::integrate::{rk4_integrate, rk4_step};
use crate::laminar::layer_b;
use crate::model::{Layer, PhysicalConstants, VorticityProfile};
use crate::sturm::SolverConfig;

/// Which end the shot starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotDirection {
    /// From `p0` upwards, `z(p0) = 0, z'(p0) = 1`.
    Left,
    /// From `0` downwards, `v(0) = λ^{3/2}, v'(0) = g + σμ`.
    Right,
}

/// Variational trajectories of the left shot.
#[derive(Debug, Clone, PartialEq)]
pub struct Variational {
    pub z_mu: Vec<f64>,
    pub w_mu: Vec<f64>,
    pub z_lambda: Vec<f64>,
    pub w_lambda: Vec<f64>,
    /// Running `∫_{p0}^p (3b/2 z'² + μ z²/(2b))`.
    pub energy: Vec<f64>,
}

/// Sampled trajectory of one shot, ordered by increasing `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShootingResult {
    pub direction: ShotDirection,
    pub lambda: f64,
    pub mu: f64,
    pub p: Vec<f64>,
    pub b: Vec<f64>,
    pub z: Vec<f64>,
    /// Flux `w = b³ z'`.
    pub w: Vec<f64>,
    pub variational: Option<Variational>,
    /// `Ξ(λ, μ)` for a left shot; `b³(p0) v(p0) / λ^{3/2}` for a right shot.
    pub xi: f64,
}

impl ShootingResult {
    /// `z'` at sample `i`.
    pub fn z_prime(&self, i: usize) -> f64 {
        self.w[i] / self.b[i].powi(3)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

pub(crate) fn check_arguments(profile: &VorticityProfile, lambda: f64, mu: f64) -> Result<()> {
    let floor = 2.0 * profile.gamma_sup();
    if !(lambda > floor) || !lambda.is_finite() {
        return Err(Error::domain("lambda", lambda, format!("({floor}, inf)")));
    }
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::domain("mu", mu, "[0, inf)"));
    }
    Ok(())
}

fn base_rhs(layer: &Layer, lambda: f64, mu: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
    move |p, y| {
        let b = layer_b(layer, lambda, p);
        [y[1] / (b * b * b), mu * b * y[0]]
    }
}

fn full_rhs(layer: &Layer, lambda: f64, mu: f64) -> impl Fn(f64, &[f64; 7]) -> [f64; 7] + '_ {
    move |p, y| {
        let b = layer_b(layer, lambda, p);
        let b3 = b * b * b;
        let [z, w, z_mu, w_mu, z_l, w_l, _] = *y;
        let zp = w / b3;
        [
            zp,
            mu * b * z,
            w_mu / b3,
            mu * b * z_mu + b * z,
            (w_l - 1.5 * w / (b * b)) / b3,
            mu * b * z_l + mu * z / (2.0 * b),
            1.5 * b * zp * zp + mu * z * z / (2.0 * b),
        ]
    }
}

fn ensure_finite(op: &'static str, lambda: f64, mu: f64, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::numeric(
            op,
            format!("non-finite state at lambda={lambda}, mu={mu}: {values:?}"),
        ))
    }
}

/// Left shot without sampling; returns `(z(0), w(0))`.
pub(crate) fn left_endpoint(
    profile: &VorticityProfile,
    lambda: f64,
    mu: f64,
    steps: usize,
) -> [f64; 2] {
    let layers = profile.layers();
    let b0 = layer_b(&layers[0], lambda, layers[0].lo);
    let mut y = [0.0, b0 * b0 * b0];
    for layer in layers {
        y = rk4_integrate(&base_rhs(layer, lambda, mu), layer.lo, layer.hi, y, steps, |_, _| {});
    }
    y
}

/// Steps needed in `layer` so that `h √μ / b ≤ 1/4`, never fewer than `steps`.
///
/// Large `μ` or small `b` make the shot stiff: solutions grow like
/// `exp(√μ ∫ 1/b)` and a fixed step count stops resolving them.
pub(crate) fn resolved_steps(layer: &Layer, lambda: f64, mu: f64, steps: usize) -> usize {
    const MAX_STEPS: f64 = 4e6;
    let b_min = layer_b(layer, lambda, layer.lo).min(layer_b(layer, lambda, layer.hi));
    let need = (4.0 * mu.sqrt() * layer.width() / b_min).ceil();
    if need.is_finite() {
        steps.max(need.min(MAX_STEPS) as usize)
    } else {
        steps.max(MAX_STEPS as usize)
    }
}

/// As [`left_endpoint`], but with [`resolved_steps`] per layer and the
/// state divided by a power of two whenever it grows past `2^512`, so large
/// `μ` can neither overflow nor outrun the step size. Division by powers of
/// two is exact, so when no extra steps are needed the result is the plain
/// endpoint times `2^-shift` bit for bit; signs and ratios are unaffected.
pub(crate) fn left_endpoint_rescaled(
    profile: &VorticityProfile,
    lambda: f64,
    mu: f64,
    steps: usize,
) -> ([f64; 2], i32) {
    const LIMIT: f64 = 1.3407807929942597e154; // 2^512
    let layers = profile.layers();
    let b0 = layer_b(&layers[0], lambda, layers[0].lo);
    let mut y = [0.0, b0 * b0 * b0];
    let mut shift = 0;
    for layer in layers {
        let f = base_rhs(layer, lambda, mu);
        let n = resolved_steps(layer, lambda, mu, steps.max(1));
        let h = (layer.hi - layer.lo) / n as f64;
        for i in 0..n {
            let t = layer.lo + h * i as f64;
            y = rk4_step(&f, t, &y, h);
            if y[0].abs().max(y[1].abs()) > LIMIT {
                y = [y[0] / LIMIT, y[1] / LIMIT];
                shift += 512;
            }
        }
    }
    (y, shift)
}

/// `Ξ(λ, μ)` from the left shot alone, used inside root finders.
pub(crate) fn xi_fast(
    profile: &VorticityProfile,
    constants: &PhysicalConstants,
    lambda: f64,
    mu: f64,
    steps: usize,
) -> Result<f64> {
    check_arguments(profile, lambda, mu)?;
    let [z0, w0] = left_endpoint(profile, lambda, mu, steps);
    let xi = w0 - (constants.gravity + constants.surface_tension * mu) * z0;
    ensure_finite("xi", lambda, mu, &[xi])?;
    Ok(xi)
}

/// Integrates the left shot with variational states and full sampling.
pub fn shoot_left(
    profile: &VorticityProfile,
    constants: &PhysicalConstants,
    lambda: f64,
    mu: f64,
    config: &SolverConfig,
) -> Result<ShootingResult> {
    check_arguments(profile, lambda, mu)?;
    let steps = config.steps_per_layer;
    let layers = profile.layers();
    let cap = layers.len() * steps + 1;
    let mut p = Vec::with_capacity(cap);
    let mut b = Vec::with_capacity(cap);
    let mut states: Vec<[f64; 7]> = Vec::with_capacity(cap);

    let b_bed = layer_b(&layers[0], lambda, layers[0].lo);
    let mut y = [0.0, b_bed.powi(3), 0.0, 0.0, 0.0, 1.5 * b_bed, 0.0];
    for (i, layer) in layers.iter().enumerate() {
        y = rk4_integrate(
            &full_rhs(layer, lambda, mu),
            layer.lo,
            layer.hi,
            y,
            steps,
            |t, s| {
                // the first node of an upper layer repeats the last one below
                if i == 0 || t != layer.lo {
                    p.push(t);
                    b.push(layer_b(layer, lambda, t));
                    states.push(*s);
                }
            },
        );
    }
    ensure_finite("shoot_left", lambda, mu, &y)?;

    let xi = y[1] - (constants.gravity + constants.surface_tension * mu) * y[0];
    let col = |k: usize| states.iter().map(|s| s[k]).collect::<Vec<_>>();
    Ok(ShootingResult {
        direction: ShotDirection::Left,
        lambda,
        mu,
        p,
        b,
        z: col(0),
        w: col(1),
        variational: Some(Variational {
            z_mu: col(2),
            w_mu: col(3),
            z_lambda: col(4),
            w_lambda: col(5),
            energy: col(6),
        }),
        xi,
    })
}

/// Integrates the right shot from the surface down to the bed.
pub fn shoot_right(
    profile: &VorticityProfile,
    constants: &PhysicalConstants,
    lambda: f64,
    mu: f64,
    config: &SolverConfig,
) -> Result<ShootingResult> {
    check_arguments(profile, lambda, mu)?;
    let steps = config.steps_per_layer;
    let layers = profile.layers();
    let top = layers.len() - 1;
    let mut p = Vec::new();
    let mut b = Vec::new();
    let mut z = Vec::new();
    let mut w = Vec::new();

    let lam32 = lambda.powf(1.5);
    let mut y = [
        lam32,
        lam32 * (constants.gravity + constants.surface_tension * mu),
    ];
    for (i, layer) in layers.iter().enumerate().rev() {
        y = rk4_integrate(
            &base_rhs(layer, lambda, mu),
            layer.hi,
            layer.lo,
            y,
            steps,
            |t, s| {
                if i == top || t != layer.hi {
                    p.push(t);
                    b.push(layer_b(layer, lambda, t));
                    z.push(s[0]);
                    w.push(s[1]);
                }
            },
        );
    }
    ensure_finite("shoot_right", lambda, mu, &y)?;
    p.reverse();
    b.reverse();
    z.reverse();
    w.reverse();
    // b³(p0) v(p0) = λ^{3/2} Ξ by constancy of the Wronskian b³(v z' − z v')
    let xi = b[0].powi(3) * z[0] / lam32;
    Ok(ShootingResult {
        direction: ShotDirection::Right,
        lambda,
        mu,
        p,
        b,
        z,
        w,
        variational: None,
        xi,
    })
}

/// `Ξ` from the left shot and its right-shot cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiValue {
    pub xi: f64,
    /// `b³(p0) v(p0) / λ^{3/2}` from the right shot.
    pub right_shot: f64,
}

pub fn xi(
    profile: &VorticityProfile,
    constants: &PhysicalConstants,
    lambda: f64,
    mu: f64,
    config: &SolverConfig,
) -> Result<XiValue> {
    let xi = xi_fast(profile, constants, lambda, mu, config.steps_per_layer)?;
    let right = shoot_right(profile, constants, lambda, mu, config)?;
    Ok(XiValue {
        xi,
        right_shot: right.xi,
    })
}

/// The two evaluations of `∂Ξ/∂λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiLambda {
    /// From the variational ODE.
    pub ode: f64,
    /// From `z(0) Ξ_λ = ∫(3b/2 z'² + μ z²/(2b)) + z_λ(0) Ξ`; `None` when `z(0) = 0`.
    pub integral: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiDerivatives {
    pub xi: f64,
    pub xi_mu: f64,
    pub xi_lambda: XiLambda,
}

/// `Ξ`, `Ξ_μ` and both `Ξ_λ` channels from one augmented left shot.
pub fn xi_derivatives(
    profile: &VorticityProfile,
    constants: &PhysicalConstants,
    lambda: f64,
    mu: f64,
    config: &SolverConfig,
) -> Result<XiDerivatives> {
    check_arguments(profile, lambda, mu)?;
    let layers = profile.layers();
    let b_bed = layer_b(&layers[0], lambda, layers[0].lo);
    let mut y = [0.0, b_bed.powi(3), 0.0, 0.0, 0.0, 1.5 * b_bed, 0.0];
    for layer in layers {
        y = rk4_integrate(
            &full_rhs(layer, lambda, mu),
            layer.lo,
            layer.hi,
            y,
            config.steps_per_layer,
            |_, _| {},
        );
    }
    ensure_finite("xi_derivatives", lambda, mu, &y)?;
    let [z, w, z_mu, w_mu, z_l, w_l, energy] = y;
    let g = constants.gravity;
    let sigma = constants.surface_tension;
    let load = g + sigma * mu;
    let xi = w - load * z;
    let xi_mu = w_mu - sigma * z - load * z_mu;
    let ode = w_l - load * z_l;
    let integral = if z != 0.0 {
        Some((energy + z_l * xi) / z)
    } else {
        None
    };
    Ok(XiDerivatives {
        xi,
        xi_mu,
        xi_lambda: XiLambda { ode, integral },
    })
}

/// `∂Ξ/∂μ`.
pub fn xi_mu(
    profile: &VorticityProfile,
    constants: &PhysicalConstants,
    lambda: f64,
    mu: f64,
    config: &SolverConfig,
) -> Result<f64> {
    Ok(xi_derivatives(profile, constants, lambda, mu, config)?.xi_mu)
}

/// `∂Ξ/∂λ`, both channels.
pub fn xi_lambda(
    profile: &VorticityProfile,
    constants: &PhysicalConstants,
    lambda: f64,
    mu: f64,
    config: &SolverConfig,
) -> Result<XiLambda> {
    Ok(xi_derivatives(profile, constants, lambda, mu, config)?.xi_lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rescaled_endpoint_matches_and_survives_overflow() {
        let profile = VorticityProfile::new(vec![-2.0, -1.0, 0.0], vec![1.0, -2.0]).unwrap();
        let plain = left_endpoint(&profile, 7.0, 30.0, 500);
        let (scaled, shift) = left_endpoint_rescaled(&profile, 7.0, 30.0, 500);
        assert_eq!(shift, 0);
        assert_eq!(plain, scaled);
        let mu = 4e6;
        assert!(!left_endpoint(&profile, 7.0, mu, 2000)[1].is_finite());
        let (y, shift) = left_endpoint_rescaled(&profile, 7.0, mu, 2000);
        assert!(shift > 0 && y.iter().all(|v| v.is_finite() && *v > 0.0));
        // the resolved shot agrees with a brute-force one of the same size
        let layer = &profile.layers()[0];
        assert!(resolved_steps(layer, 7.0, mu, 2000) > 2000);
        assert_eq!(resolved_steps(layer, 7.0, 30.0, 2000), 2000);
    }

    fn irrotational() -> VorticityProfile {
        VorticityProfile::irrotational(-1.0).unwrap()
    }

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn left_shot_irrotational_closed_form() {
        let c = PhysicalConstants::new(1.0, 0.0).unwrap();
        let r = shoot_left(&irrotational(), &c, 1.0, 1.0, &cfg()).unwrap();
        let last = r.len() - 1;
        assert_eq!(r.p[0], -1.0);
        assert_eq!(r.p[last], 0.0);
        assert!((r.z[last] - 1f64.sinh()).abs() < 1e-12);
        assert!((r.z_prime(last) - 1f64.cosh()).abs() < 1e-12);
        assert!((r.z[last] - 1.1752012).abs() < 1e-7);
        for i in (0..r.len()).step_by(97) {
            assert!((r.z[i] - (r.p[i] + 1.0).sinh()).abs() < 1e-12);
        }
    }

    #[test]
    fn left_shot_mu_zero_matches_explicit_form() {
        // z(p) = b³(p0) ∫_{p0}^p b^{-3}
        let profile = VorticityProfile::new(vec![-2.0, -1.0, 0.0], vec![1.0, -2.0]).unwrap();
        let c = PhysicalConstants::new(9.81, 0.07).unwrap();
        let lam = 7.0;
        let r = shoot_left(&profile, &c, lam, 0.0, &cfg()).unwrap();
        let b0 = r.b[0];
        for i in (0..r.len()).step_by(131) {
            let p = r.p[i];
            let mut acc = 0.0;
            for l in profile.layers() {
                if p <= l.lo {
                    break;
                }
                acc += crate::laminar::layer_inv_b3_integral(l, lam, p.min(l.hi));
            }
            assert!((r.z[i] - b0.powi(3) * acc).abs() < 1e-10 * (1.0 + r.z[i].abs()), "p={p}");
        }
    }

    #[test]
    fn right_shot_initial_conditions() {
        let c = PhysicalConstants::new(1.0, 0.0).unwrap();
        let r = shoot_right(&irrotational(), &c, 1.0, 0.0, &cfg()).unwrap();
        let last = r.len() - 1;
        assert_eq!(r.z[last], 1.0);
        assert!((r.z_prime(last) - 1.0).abs() < 1e-15);
        // v = 1 + p
        assert!(r.z[0].abs() < 1e-13);

        let c0 = PhysicalConstants::new(1e-300, 0.0).unwrap();
        let r = shoot_right(&irrotational(), &c0, 2.0, 3.0, &cfg()).unwrap();
        let last = r.len() - 1;
        assert_eq!(r.z[last], 2f64.powf(1.5));
        assert!(r.z_prime(last).abs() < 1e-290);
    }

    #[test]
    fn xi_examples() {
        let c = PhysicalConstants::new(1.0, 0.0).unwrap();
        let v = xi(&irrotational(), &c, 1.0, 1.0, &cfg()).unwrap();
        assert!((v.xi - (-1f64).exp()).abs() < 1e-10);
        assert!((v.right_shot - v.xi).abs() < 1e-10);
        let c = PhysicalConstants::new(1.0, 0.37).unwrap();
        let v = xi(&irrotational(), &c, 1.0, 0.0, &cfg()).unwrap();
        assert!(v.xi.abs() < 1e-13);
    }

    #[test]
    fn xi_mu_closed_form() {
        let c = PhysicalConstants::new(1.0, 0.0).unwrap();
        let d = xi_derivatives(&irrotational(), &c, 1.0, 1.0, &cfg()).unwrap();
        // Ξ(1, x²) = cosh x − sinh x / x  ⇒  Ξ_μ = Ξ_x / (2x) at x = 1
        let x: f64 = 1.0;
        let dxi_dx = x.sinh() - (x * x.cosh() - x.sinh()) / (x * x);
        assert!((d.xi_mu - dxi_dx / (2.0 * x)).abs() < 1e-10);
        assert!((d.xi_mu - 0.4036609).abs() < 1e-7);
    }

    #[test]
    fn xi_lambda_irrotational_mu_zero() {
        let c = PhysicalConstants::new(1.0, 0.5).unwrap();
        for lam in [0.5, 1.0, 3.0] {
            let d = xi_lambda(&irrotational(), &c, lam, 0.0, &cfg()).unwrap();
            let expected = 1.5 * f64::sqrt(lam);
            assert!((d.ode - expected).abs() < 1e-11);
            assert!((d.integral.unwrap() - expected).abs() < 1e-11);
        }
    }

    #[test]
    fn domain_errors() {
        let c = PhysicalConstants::new(1.0, 0.0).unwrap();
        let p = VorticityProfile::new(vec![-2.0, -1.0, 0.0], vec![1.0, -2.0]).unwrap();
        assert!(matches!(
            shoot_left(&p, &c, 4.0, 1.0, &cfg()),
            Err(Error::Domain { what: "lambda", .. })
        ));
        assert!(matches!(
            xi(&p, &c, 5.0, -1.0, &cfg()),
            Err(Error::Domain { what: "mu", .. })
        ));
    }

    #[test]
    fn overflow_is_reported() {
        let c = PhysicalConstants::new(1.0, 0.0).unwrap();
        let e = xi_fast(&irrotational(), &c, 1e-6, 1e12, 200).unwrap_err();
        assert!(matches!(e, Error::Numeric { op: "xi", .. }));
    }

    #[test]
    fn flux_is_continuous_across_breakpoints() {
        let profile = VorticityProfile::new(vec![-2.0, -1.0, 0.0], vec![1.0, -2.0]).unwrap();
        let c = PhysicalConstants::new(9.81, 0.07).unwrap();
        let r = shoot_left(&profile, &c, 6.0, 4.0, &cfg()).unwrap();
        let steps = cfg().steps_per_layer;
        // one shared node at p1, and z' is continuous because b is
        assert_eq!(r.len(), 2 * steps + 1);
        assert_eq!(r.p[steps], -1.0);
        let left = (r.z[steps] - r.z[steps - 1]) / (r.p[steps] - r.p[steps - 1]);
        let right = (r.z[steps + 1] - r.z[steps]) / (r.p[steps + 1] - r.p[steps]);
        assert!((left - right).abs() < 1e-2 * left.abs());
    }
}
