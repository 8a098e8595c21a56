//! `λ₀`, the zero curve `μ(λ)` of `Ξ`, the period divisor and the
//! bifurcation points `λ_k` with `μ(λ_k) = (kn)²`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::laminar::{inv_b3_integral, layer_b, layer_inv_b3_integral};
use crate::model::{PhysicalConstants, VorticityProfile};
use crate::quadrature::{composite, gauss_legendre};
use crate::roots::bisect_by_sign;
use crate::sturm::shooting::{check_arguments, left_endpoint_rescaled};
use crate::sturm::{shoot_left, xi_fast, SolverConfig};

/// Relative slack used when comparing `(kn)²` against `μ(λ₀)`.
const SQUARE_SLACK: f64 = 1e-8;

/// Probes on each side of `μ(λ)` used to confirm the sign structure.
const SIGN_PROBES: usize = 16;

/// `λ₀`: the unique root of `∫_{p0}^0 b^{-3}(p; λ) dp = 1/g`.
///
/// The integral decreases strictly in `λ` and blows up at `2 max Γ`, so the
/// root is bracketed by doubling an offset above that floor. The bracket is
/// bisected down to adjacent floating-point numbers.
pub fn lambda0(profile: &VorticityProfile, constants: &PhysicalConstants) -> Result<f64> {
    let floor = 2.0 * profile.gamma_sup();
    let target = 1.0 / constants.gravity;
    let residual = |lam: f64| inv_b3_integral(profile, lam) - target;
    let mut offset = 1.0;
    let mut hi = floor + offset;
    let mut guard = 0;
    while residual(hi) >= 0.0 {
        offset *= 2.0;
        hi = floor + offset;
        guard += 1;
        if guard > 2000 || !hi.is_finite() {
            return Err(Error::numeric("lambda0", "could not bracket the root"));
        }
    }
    bisect_by_sign(|lam| Ok(residual(lam)), floor, hi, false, |_| 0.0, 400)
}

/// Both sides of `∫ b (∫_{p0}^p b^{-3})² dp ≤ σ/g²` at `λ = λ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionD2 {
    pub lambda0: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates the small-`μ` condition deciding whether `μ(λ₀) = 0`.
pub fn check_condition_d2(
    profile: &VorticityProfile,
    constants: &PhysicalConstants,
) -> Result<ConditionD2> {
    let lam = lambda0(profile, constants)?;
    let lhs = d2_integral(profile, lam)?;
    let rhs = constants.surface_tension / (constants.gravity * constants.gravity);
    Ok(ConditionD2 {
        lambda0: lam,
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

/// `∫_{p0}^0 b(p) (∫_{p0}^p b^{-3})² dp` by per-layer composite Gauss–Legendre.
fn d2_integral(profile: &VorticityProfile, lambda: f64) -> Result<f64> {
    let rule = gauss_legendre(64);
    let mut below = 0.0;
    let mut total = 0.0;
    for layer in profile.layers() {
        let f = |p: f64| {
            let inner = below + layer_inv_b3_integral(layer, lambda, p);
            layer_b(layer, lambda, p) * inner * inner
        };
        let mut panels = 1;
        let mut prev = composite(&f, layer.lo, layer.hi, panels, &rule);
        loop {
            panels *= 2;
            let next = composite(&f, layer.lo, layer.hi, panels, &rule);
            let change = (next - prev).abs();
            prev = next;
            if change <= 1e-10 * next.abs() || change == 0.0 {
                break;
            }
            if panels >= 1 << 12 {
                return Err(Error::numeric("check_condition_d2", "quadrature did not settle"));
            }
        }
        total += prev;
        below += layer_inv_b3_integral(layer, lambda, layer.hi);
    }
    Ok(total)
}

/// `Ξ` and the size of the two terms it is the difference of, both divided
/// by the same power of two.
fn xi_with_scale(
    profile: &VorticityProfile,
    constants: &PhysicalConstants,
    lambda: f64,
    mu: f64,
    steps: usize,
) -> Result<(f64, f64)> {
    check_arguments(profile, lambda, mu)?;
    // callers use only signs and noise ratios, which the rescaled,
    // stiffness-resolved endpoint keeps meaningful at large μ
    let ([z0, w0], _) = left_endpoint_rescaled(profile, lambda, mu, steps);
    let load = (constants.gravity + constants.surface_tension * mu) * z0;
    let xi = w0 - load;
    if !xi.is_finite() {
        return Err(Error::numeric(
            "xi",
            format!("non-finite value at lambda={lambda}, mu={mu}"),
        ));
    }
    Ok((xi, w0.abs() + load.abs()))
}

/// Smallest `n ≥ 1` with `n² ≥ μ(λ₀)`; exact squares are admitted up to a
/// relative slack of `1e-8`.
pub fn period_divisor_for(mu0: f64) -> u32 {
    let bound = mu0 - SQUARE_SLACK * mu0.abs().max(1.0);
    if bound <= 1.0 {
        return 1;
    }
    let mut n = bound.sqrt().floor().max(1.0) as u32;
    while (n as f64) * (n as f64) < bound {
        n += 1;
    }
    n
}

/// Samples of the normalised eigenfunction `v` and its slope.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenfunction {
    pub p: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    /// Samples `j·steps ..= (j+1)·steps` belong to layer `j`.
    pub steps_per_layer: usize,
}

impl Eigenfunction {
    /// Index range of the samples on layer `j` (both ends included).
    pub fn layer_range(&self, j: usize) -> std::ops::RangeInclusive<usize> {
        j * self.steps_per_layer..=(j + 1) * self.steps_per_layer
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationPoint {
    pub k: u32,
    pub n: u32,
    /// `kn`.
    pub wavenumber: f64,
    /// `(kn)²`.
    pub mu: f64,
    pub lambda: f64,
    /// Set when `(kn)² = μ(λ₀)` so that `λ_k = λ₀`.
    pub at_lambda0: bool,
    /// `Ξ(λ_k, (kn)²)` as evaluated at the returned root.
    pub xi_residual: f64,
    pub eigenfunction: Eigenfunction,
}

/// A profile and constants with `λ₀` and `μ(λ₀)` cached.
#[derive(Debug)]
pub struct SturmProblem {
    profile: VorticityProfile,
    constants: PhysicalConstants,
    config: SolverConfig,
    lambda0: f64,
    mu0: OnceLock<Result<f64>>,
}

impl SturmProblem {
    pub fn new(
        profile: VorticityProfile,
        constants: PhysicalConstants,
        config: SolverConfig,
    ) -> Result<Self> {
        config.validate()?;
        let lambda0 = lambda0(&profile, &constants)?;
        Ok(SturmProblem {
            profile,
            constants,
            config,
            lambda0,
            mu0: OnceLock::new(),
        })
    }

    pub fn profile(&self) -> &VorticityProfile {
        &self.profile
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// `Ξ(λ, μ)` from the left shot.
    pub fn xi(&self, lambda: f64, mu: f64) -> Result<f64> {
        xi_fast(
            &self.profile,
            &self.constants,
            lambda,
            mu,
            self.config.steps_per_layer,
        )
    }

    /// `Ξ / (|w(0)| + |(g + σμ) z(0)|)`: the bifurcation function relative
    /// to the terms it cancels, computed with stiffness-resolved steps and
    /// overflow-safe scaling. Its sign is that of `Ξ`.
    pub fn xi_relative(&self, lambda: f64, mu: f64) -> Result<f64> {
        let (xi, scale) = xi_with_scale(
            &self.profile,
            &self.constants,
            lambda,
            mu,
            self.config.steps_per_layer,
        )?;
        Ok(if scale > 0.0 { xi / scale } else { xi })
    }

    pub fn condition_d2(&self) -> Result<ConditionD2> {
        let lhs = d2_integral(&self.profile, self.lambda0)?;
        let g = self.constants.gravity;
        let rhs = self.constants.surface_tension / (g * g);
        Ok(ConditionD2 {
            lambda0: self.lambda0,
            lhs,
            rhs,
            holds: lhs <= rhs,
        })
    }

    /// The largest zero of `Ξ(λ, ·)`, for `λ ≥ λ₀`.
    ///
    /// `μ = 0` brackets from below and `μ_hi` doubles from 1 until `Ξ < 0`.
    /// After bisection the sign structure is confirmed on probes either side.
    pub fn mu_of_lambda(&self, lambda: f64) -> Result<f64> {
        let tol = self.config.tolerance(self.lambda0);
        if !(lambda >= self.lambda0 - tol) || !lambda.is_finite() {
            return Err(Error::domain(
                "lambda",
                lambda,
                format!("[lambda0, inf) with lambda0 = {}", self.lambda0),
            ));
        }
        let steps = self.config.steps_per_layer;
        let eval = |mu: f64| xi_with_scale(&self.profile, &self.constants, lambda, mu, steps);
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut guard = 0;
        while eval(hi)?.0 >= 0.0 {
            lo = hi;
            hi *= 2.0;
            guard += 1;
            if guard > 60 {
                let hint = if self.constants.surface_tension == 0.0 {
                    "; without surface tension Ξ need not turn negative as μ grows"
                } else {
                    ""
                };
                return Err(Error::numeric(
                    "mu_of_lambda",
                    format!("Ξ({lambda}, μ) stays non-negative up to μ = {hi:e}{hint}"),
                ));
            }
        }
        let mut mu = bisect_by_sign(
            |m| Ok(eval(m)?.0),
            lo,
            hi,
            false,
            |m| self.config.tolerance(m),
            400,
        )?;
        if mu <= self.config.tolerance(mu) {
            mu = 0.0;
        }
        self.confirm_sign_structure(lambda, mu)?;
        Ok(mu)
    }

    fn confirm_sign_structure(&self, lambda: f64, mu: f64) -> Result<()> {
        let steps = self.config.steps_per_layer;
        let check = |m: f64, positive: bool| -> Result<()> {
            let (xi, scale) = xi_with_scale(&self.profile, &self.constants, lambda, m, steps)?;
            // values below the evaluation noise carry no sign
            let noise = 1e-11 * scale;
            let bad = if positive { xi < -noise } else { xi > noise };
            if bad {
                return Err(Error::numeric(
                    "mu_of_lambda",
                    format!(
                        "sign structure violated at lambda={lambda}, mu={m}: Ξ={xi:e} (root {mu})"
                    ),
                ));
            }
            Ok(())
        };
        let count = SIGN_PROBES as f64;
        for j in 1..=SIGN_PROBES {
            let t = j as f64;
            if mu > 0.0 {
                check(mu * t / (count + 1.0), true)?;
            }
            check(mu + mu.max(1.0) * t / count, false)?;
        }
        Ok(())
    }

    /// `μ(λ₀)`, computed once.
    pub fn mu0(&self) -> Result<f64> {
        self.mu0
            .get_or_init(|| self.mu_of_lambda(self.lambda0))
            .clone()
    }

    /// Smallest `n` with `n² ≥ μ(λ₀)`.
    pub fn min_period_divisor(&self) -> Result<u32> {
        let mu0 = self.mu0()?;
        let n = period_divisor_for(mu0);
        if n != 1 && self.condition_d2()?.holds {
            return Err(Error::numeric(
                "min_period_divisor",
                format!("condition (d2) holds but mu(lambda0) = {mu0} gives n = {n}"),
            ));
        }
        Ok(n)
    }

    /// `λ_k` with `μ(λ_k) = (kn)²` and its eigenfunction.
    ///
    /// For `λ > λ₀`, `Ξ(λ, (kn)²)` is negative below `λ_k` and positive above,
    /// so the root is bisected on that sign directly.
    pub fn bifurcation(&self, k: u32, n: u32) -> Result<BifurcationPoint> {
        if k == 0 || n == 0 {
            return Err(Error::param("k, n", "mode index and divisor must be >= 1"));
        }
        let wavenumber = k as f64 * n as f64;
        let target = wavenumber * wavenumber;
        let mu0 = self.mu0()?;
        let slack = SQUARE_SLACK * mu0.max(1.0);
        if target < mu0 - slack {
            return Err(Error::InfeasibleMode {
                k,
                n,
                target,
                mu0,
            });
        }
        let at_lambda0 = (target - mu0).abs() <= slack;
        let lambda = if at_lambda0 {
            self.lambda0
        } else {
            let lo = self.lambda0;
            let mut delta = 1.0;
            let mut guard = 0;
            while self.xi(lo + delta, target)? <= 0.0 {
                delta *= 2.0;
                guard += 1;
                if guard > 60 {
                    return Err(Error::numeric("bifurcation_lambda", "could not bracket λ_k"));
                }
            }
            bisect_by_sign(
                |lam| self.xi(lam, target),
                lo,
                lo + delta,
                true,
                |lam| self.config.tolerance(lam),
                400,
            )?
        };
        let shot = shoot_left(&self.profile, &self.constants, lambda, target, &self.config)?;
        let (imax, _) = shot
            .z
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |acc, (i, z)| if z.abs() > acc.1 { (i, z.abs()) } else { acc });
        let scale = shot.z[imax];
        if scale == 0.0 {
            return Err(Error::numeric("bifurcation_lambda", "eigenfunction vanishes"));
        }
        let v = shot.z.iter().map(|z| z / scale).collect();
        let dv = (0..shot.len()).map(|i| shot.z_prime(i) / scale).collect();
        Ok(BifurcationPoint {
            k,
            n,
            wavenumber,
            mu: target,
            lambda,
            at_lambda0,
            xi_residual: shot.xi,
            eigenfunction: Eigenfunction {
                p: shot.p,
                v,
                dv,
                steps_per_layer: self.config.steps_per_layer,
            },
        })
    }

    /// Roots of `Ξ(·, μ)` in `(lo, hi]`, located by a geometric scan of
    /// `λ − 2 max Γ` with `samples` points and refined by bisection.
    pub fn xi_roots_in_lambda(&self, mu: f64, lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>> {
        let floor = 2.0 * self.profile.gamma_sup();
        if !(lo > floor && hi > lo) {
            return Err(Error::param(
                "lambda range",
                format!("need 2 max Γ = {floor} < lo = {lo} < hi = {hi}"),
            ));
        }
        let samples = samples.max(2);
        let (a, b) = (lo - floor, hi - floor);
        let grid: Vec<f64> = (0..samples)
            .map(|i| {
                if i + 1 == samples {
                    hi
                } else {
                    floor + a * (b / a).powf(i as f64 / (samples - 1) as f64)
                }
            })
            .collect();
        let sign_of = |lam: f64| self.xi_relative(lam, mu);
        let values = grid.iter().map(|&lam| sign_of(lam)).collect::<Result<Vec<_>>>()?;
        let mut roots = Vec::new();
        for i in 0..samples - 1 {
            let (f0, f1) = (values[i], values[i + 1]);
            if f0 == 0.0 {
                roots.push(grid[i]);
            } else if f0.signum() != f1.signum() && f1 != 0.0 {
                roots.push(bisect_by_sign(
                    sign_of,
                    grid[i],
                    grid[i + 1],
                    f1 > 0.0,
                    |lam| self.config.tolerance(lam),
                    400,
                )?);
            }
        }
        if values[samples - 1] == 0.0 {
            roots.push(hi);
        }
        Ok(roots)
    }
}

/// `μ(λ)`; see [`SturmProblem::mu_of_lambda`].
pub fn mu_of_lambda(
    profile: &VorticityProfile,
    constants: &PhysicalConstants,
    lambda: f64,
    config: &SolverConfig,
) -> Result<f64> {
    SturmProblem::new(profile.clone(), *constants, *config)?.mu_of_lambda(lambda)
}

/// Smallest `n ≥ 1` with `n² ≥ μ(λ₀)`.
pub fn min_period_divisor(
    profile: &VorticityProfile,
    constants: &PhysicalConstants,
    config: &SolverConfig,
) -> Result<u32> {
    SturmProblem::new(profile.clone(), *constants, *config)?.min_period_divisor()
}

/// `λ_k` with `μ(λ_k) = (kn)²`; see [`SturmProblem::bifurcation`].
pub fn bifurcation_lambda(
    profile: &VorticityProfile,
    constants: &PhysicalConstants,
    k: u32,
    n: u32,
    config: &SolverConfig,
) -> Result<BifurcationPoint> {
    SturmProblem::new(profile.clone(), *constants, *config)?.bifurcation(k, n)
}

/// Roots of `Ξ(·, μ)` in `(lo, hi]`; see [`SturmProblem::xi_roots_in_lambda`].
pub fn xi_roots_in_lambda(
    profile: &VorticityProfile,
    constants: &PhysicalConstants,
    mu: f64,
    lo: f64,
    hi: f64,
    samples: usize,
    config: &SolverConfig,
) -> Result<Vec<f64>> {
    SturmProblem::new(profile.clone(), *constants, *config)?.xi_roots_in_lambda(mu, lo, hi, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sturm::xi_derivatives;

    fn irrotational() -> VorticityProfile {
        VorticityProfile::irrotational(-1.0).unwrap()
    }

    fn two_layer() -> VorticityProfile {
        VorticityProfile::new(vec![-2.0, -1.0, 0.0], vec![1.0, -2.0]).unwrap()
    }

    fn consts(g: f64, s: f64) -> PhysicalConstants {
        PhysicalConstants::new(g, s).unwrap()
    }

    fn problem(p: VorticityProfile, g: f64, s: f64) -> SturmProblem {
        SturmProblem::new(p, consts(g, s), SolverConfig::default()).unwrap()
    }

    /// Closed-form `Ξ(λ, μ)` for the irrotational profile with `p0 = −1`.
    fn xi_irrotational(lam: f64, mu: f64, g: f64, s: f64) -> f64 {
        let k = (mu / lam).sqrt();
        let shc = if k == 0.0 { 1.0 } else { k.sinh() / k };
        lam.powf(1.5) * k.cosh() - (g + s * mu) * shc
    }

    #[test]
    fn lambda0_irrotational() {
        for (g, expected) in [(1.0, 1.0), (8.0, 4.0), (9.81, 9.81f64.powf(2.0 / 3.0))] {
            let l = lambda0(&irrotational(), &consts(g, 0.0)).unwrap();
            assert!((l - expected).abs() < 1e-12, "g={g}: {l}");
        }
    }

    #[test]
    fn lambda0_two_layer_against_quadrature() {
        let profile = two_layer();
        let g = 9.81;
        // midpoint rule on 2e5 panels per layer, bisected independently
        let integral = |lam: f64| {
            let n = 200_000;
            let mut acc = 0.0;
            for (lo, hi) in [(-2.0, -1.0), (-1.0, 0.0)] {
                let h: f64 = (hi - lo) / n as f64;
                for i in 0..n {
                    let p = lo + (i as f64 + 0.5) * h;
                    let big_gamma = if p >= -1.0 { -2.0 * p } else { 2.0 + (p + 1.0) };
                    acc += h * (lam - 2.0 * big_gamma).powf(-1.5);
                }
            }
            acc
        };
        let (mut lo, mut hi) = (4.5, 20.0);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if integral(mid) > 1.0 / g {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let l = lambda0(&profile, &consts(g, 0.07)).unwrap();
        assert!((l - 0.5 * (lo + hi)).abs() < 1e-7, "{l} vs {}", 0.5 * (lo + hi));
        assert!((l - 9.94202884007677).abs() < 1e-8);
    }

    #[test]
    fn xi_vanishes_at_lambda0() {
        let p = problem(two_layer(), 9.81, 0.07);
        assert!(p.xi(p.lambda0(), 0.0).unwrap().abs() < 1e-9);
    }

    #[test]
    fn condition_d2_examples() {
        let c = check_condition_d2(&irrotational(), &consts(1.0, 0.5)).unwrap();
        assert!((c.lhs - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(c.rhs, 0.5);
        assert!(c.holds);
        assert!(!check_condition_d2(&irrotational(), &consts(1.0, 0.3)).unwrap().holds);
        assert!(check_condition_d2(&two_layer(), &consts(9.81, 1e6)).unwrap().holds);
        let tiny = check_condition_d2(&two_layer(), &consts(9.81, 0.0)).unwrap();
        assert!(tiny.lhs > 0.0 && !tiny.holds);
    }

    #[test]
    fn condition_d2_matches_sign_of_xi_mu() {
        // Ξ_μ(λ₀, 0) = b³(p0) g (lhs − σ/g²)
        for (profile, g, s) in [(two_layer(), 9.81, 0.07), (two_layer(), 2.0, 0.3), (irrotational(), 1.0, 0.1)] {
            let c = consts(g, s);
            let d2 = check_condition_d2(&profile, &c).unwrap();
            let d = xi_derivatives(&profile, &c, d2.lambda0, 0.0, &SolverConfig::default()).unwrap();
            let b0 = layer_b(&profile.layers()[0], d2.lambda0, profile.p0());
            let expected = b0.powi(3) * g * (d2.lhs - d2.rhs);
            assert!(
                (d.xi_mu - expected).abs() < 1e-8 * expected.abs().max(1.0),
                "{} vs {expected}",
                d.xi_mu
            );
        }
    }

    #[test]
    fn mu_of_lambda_irrotational_closed_form() {
        let p = problem(irrotational(), 1.0, 1.0);
        let mu = p.mu_of_lambda(2.0).unwrap();
        // independent bisection on the closed form
        let f = |m: f64| xi_irrotational(2.0, m, 1.0, 1.0);
        let (mut lo, mut hi) = (1e-9, 100.0);
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((mu - lo).abs() < 1e-8 * lo.max(1.0), "{mu} vs {lo}");
    }

    #[test]
    fn mu_of_lambda_domain_and_zero() {
        let p = problem(irrotational(), 1.0, 1.0);
        assert!(matches!(p.mu_of_lambda(0.9), Err(Error::Domain { .. })));
        // σ = 1 > 1/3: condition (d2) holds, μ(λ₀) = 0
        assert_eq!(p.mu0().unwrap(), 0.0);
        assert_eq!(p.min_period_divisor().unwrap(), 1);
    }

    #[test]
    fn mu_of_lambda_increases() {
        let p = problem(two_layer(), 9.81, 0.5);
        let l0 = p.lambda0();
        let mut prev = p.mu_of_lambda(l0).unwrap();
        for i in 1..8 {
            let mu = p.mu_of_lambda(l0 + 0.1 * i as f64).unwrap();
            assert!(mu > prev, "{mu} <= {prev}");
            prev = mu;
        }
    }

    #[test]
    fn period_divisor_examples() {
        assert_eq!(period_divisor_for(0.0), 1);
        assert_eq!(period_divisor_for(0.7), 1);
        assert_eq!(period_divisor_for(1.0), 1);
        assert_eq!(period_divisor_for(5.3), 3);
        assert_eq!(period_divisor_for(4.0), 2);
        assert_eq!(period_divisor_for(4.0 + 1e-12), 2);
        assert_eq!(period_divisor_for(4.001), 3);
        assert_eq!(period_divisor_for(30000.0), 174);
    }

    #[test]
    fn small_surface_tension_gives_large_divisor() {
        let p = problem(two_layer(), 9.81, 0.07);
        let mu0 = p.mu0().unwrap();
        assert!(mu0 > 1.0);
        let n = p.min_period_divisor().unwrap();
        assert!((n as f64).powi(2) >= mu0 && ((n - 1) as f64).powi(2) < mu0);
        assert!(matches!(p.bifurcation(1, 1), Err(Error::InfeasibleMode { .. })));
    }

    #[test]
    fn bifurcation_sequence() {
        let p = problem(irrotational(), 1.0, 1.0);
        let pts: Vec<_> = (1..=3).map(|k| p.bifurcation(k, 1).unwrap()).collect();
        for w in pts.windows(2) {
            assert!(w[0].lambda < w[1].lambda);
        }
        for pt in &pts {
            assert!(!pt.at_lambda0);
            let ef = &pt.eigenfunction;
            assert_eq!(ef.v[0], 0.0);
            let sup = ef.v.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!((sup - 1.0).abs() < 1e-15);
            assert!(ef.v.iter().any(|&v| v == 1.0));
            // closed form: Ξ(λ_k, k²) = 0
            let r = xi_irrotational(pt.lambda, pt.mu, 1.0, 1.0);
            assert!(r.abs() < 1e-8, "k={} residual {r}", pt.k);
        }
    }

    #[test]
    fn xi_roots_scan_finds_gravity_branch() {
        let p = problem(two_layer(), 9.81, 0.07);
        let floor = 2.0 * p.profile().gamma_sup();
        let roots = p.xi_roots_in_lambda(4.0, floor + 1e-3, p.lambda0(), 200).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(p.xi(roots[0], 4.0).unwrap().abs() < 1e-6);
    }
}
