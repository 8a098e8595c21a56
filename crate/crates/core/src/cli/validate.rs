//! The invariant suite behind `validate`: each check yields a value, an
//! admissible interval and a verdict. Nothing here depends on timing or
//! scheduling, so repeated runs produce identical rows.

use crate::dispersion::dispersion_vs_shooting;
use crate::error::{Error, Result};
use crate::laminar::{inv_b3_integral, LaminarFlow};
use crate::sturm::{xi, xi_derivatives, SturmProblem};
use crate::wavefield::{
    amplitude_bound, bump_family, check_pbc, first_order_height, pb_residual, physical_fields,
    stream_function, vorticity_check, weak_residual, GridSpec, WaveField,
};

use super::config::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

fn within(name: impl Into<String>, value: f64, lower: f64, upper: f64) -> CheckRow {
    CheckRow {
        name: name.into(),
        value,
        lower,
        upper,
        pass: value >= lower && value <= upper,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn slope(s: &[f64], r: &[f64]) -> f64 {
    let n = s.len() as f64;
    let xs: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Rows of a validation run, plus the checks that do not apply to the
/// configuration and why.
#[derive(Debug, Clone, PartialEq)]
pub struct Suite {
    pub rows: Vec<CheckRow>,
    pub skipped: Vec<String>,
}

/// Runs every applicable check. A numeric failure inside a check aborts the
/// suite.
pub fn run_suite(cfg: &RunConfig) -> Result<Suite> {
    let profile = &cfg.profile;
    let c = cfg.constants;
    let solver = cfg.solver;
    let sp = SturmProblem::new(profile.clone(), c, solver)?;
    let l0 = sp.lambda0();
    let floor = 2.0 * profile.gamma_sup();
    let mut rows = Vec::new();

    let defect = (inv_b3_integral(profile, l0) * c.gravity - 1.0).abs();
    rows.push(within("lambda0_root", defect, 0.0, 1e-9));

    let mut worst = 0.0f64;
    for i in 0..5 {
        let lambda = floor + (l0 - floor + 1.0) * (0.2 + 0.4 * i as f64);
        for j in 0..5 {
            let v = xi(profile, &c, lambda, 4.0 * j as f64, &solver)?;
            worst = worst.max((v.xi - v.right_shot).abs() / v.xi.abs().max(1.0));
        }
    }
    rows.push(within("two_sided_shooting", worst, 0.0, 1e-6));

    let (mut e_mu, mut e_l, mut e_ch) = (0.0f64, 0.0f64, 0.0f64);
    for mu in [1.0, 5.0, 9.0] {
        let lambda = 1.3 * l0;
        let d = xi_derivatives(profile, &c, lambda, mu, &solver)?;
        let at = |l: f64, m: f64| xi(profile, &c, l, m, &solver).map(|v| v.xi);
        let (hm, hl) = (1e-4 * mu, 1e-4 * lambda);
        let fd_mu = (at(lambda, mu + hm)? - at(lambda, mu - hm)?) / (2.0 * hm);
        let fd_l = (at(lambda + hl, mu)? - at(lambda - hl, mu)?) / (2.0 * hl);
        e_mu = e_mu.max(rel(fd_mu, d.xi_mu));
        e_l = e_l.max(rel(fd_l, d.xi_lambda.ode));
        e_ch = e_ch.max(match d.xi_lambda.integral {
            Some(v) => rel(v, d.xi_lambda.ode),
            None => f64::INFINITY,
        });
    }
    rows.push(within("xi_mu_vs_fd", e_mu, 0.0, 1e-4));
    rows.push(within("xi_lambda_vs_fd", e_l, 0.0, 1e-4));
    rows.push(within("xi_lambda_channels", e_ch, 0.0, 1e-6));

    let mut min_xi0 = f64::INFINITY;
    for i in 1..=10 {
        min_xi0 = min_xi0.min(sp.xi(l0 * (1.0 + 0.1 * i as f64), 0.0)?);
    }
    rows.push(CheckRow {
        pass: min_xi0 > 0.0,
        ..within("xi_at_mu0_positive", min_xi0, 0.0, f64::INFINITY)
    });

    // Without surface tension Ξ(λ, ·) need not change sign above λ₀, so there
    // is no curve μ(λ) to follow and no bifurcation point on it.
    if c.surface_tension == 0.0 {
        return Ok(Suite {
            rows,
            skipped: vec![
                "mu(lambda) curve, bifurcation, dispersion and wave field checks: \
                 surface_tension is 0, so no mu(lambda) exists above lambda0"
                    .into(),
            ],
        });
    }

    let lambdas: Vec<f64> = (0..20)
        .map(|i| l0 * (1.0 + 1e-3) * f64::powf(10.0, i as f64 / 19.0))
        .collect();
    let mus = lambdas
        .iter()
        .map(|&l| sp.mu_of_lambda(l))
        .collect::<Result<Vec<_>>>()?;
    let min_step = mus.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    rows.push(CheckRow {
        pass: min_step > 0.0,
        ..within("mu_increasing", min_step, 0.0, f64::INFINITY)
    });
    let (mut min_xl, mut max_xm) = (f64::INFINITY, f64::NEG_INFINITY);
    for (&l, &m) in lambdas.iter().zip(&mus) {
        if m > 0.0 {
            let d = xi_derivatives(profile, &c, l, m, &solver)?;
            min_xl = min_xl.min(d.xi_lambda.ode);
            max_xm = max_xm.max(d.xi_mu);
        }
    }
    rows.push(CheckRow {
        pass: min_xl > 0.0,
        ..within("xi_lambda_positive_on_curve", min_xl, 0.0, f64::INFINITY)
    });
    rows.push(CheckRow {
        pass: max_xm < 0.0,
        ..within("xi_mu_negative_on_curve", max_xm, f64::NEG_INFINITY, 0.0)
    });

    let d2 = sp.condition_d2()?;
    let mu0 = sp.mu0()?;
    let n = sp.min_period_divisor()?;
    rows.push(CheckRow {
        pass: !d2.holds || mu0 == 0.0,
        ..within("mu0_zero_under_d2", mu0, 0.0, f64::INFINITY)
    });

    let mut points = Vec::new();
    for k in 1..=3u32 {
        let bp = sp.bifurcation(k, n)?;
        let target = (bp.wavenumber) * (bp.wavenumber);
        let back = sp.mu_of_lambda(bp.lambda)?;
        rows.push(within(format!("bifurcation_k{k}"), rel(back, target), 0.0, 1e-6));
        points.push(bp);
    }

    if profile.n_layers() == 2 {
        for k in [n, 2 * n, 3 * n] {
            let pairs = dispersion_vs_shooting(profile, &c, k, &solver)?;
            let worst = pairs
                .iter()
                .map(|p| {
                    let r = p.residual.fractional.abs() / p.residual.fractional_scale;
                    r.max(p.root_mismatch().unwrap_or(f64::INFINITY))
                })
                .fold(0.0, f64::max);
            rows.push(within(format!("dispersion_k{k}"), worst, 0.0, 1e-6));
        }
    }

    let bp = &points[0];
    let flow = LaminarFlow::new(profile.clone(), bp.lambda)?;
    let head = flow.total_head(c.gravity);
    let laminar_norm = |np| -> Result<f64> {
        let f = WaveField::laminar(flow.clone(), bp.wavenumber, GridSpec { nq: 64, np })?;
        let r = pb_residual(&f, &c, head).extrapolated;
        Ok(r.max_interior().max(r.surface).max(r.bottom))
    };
    let (r1, r2) = (laminar_norm(100)?, laminar_norm(200)?);
    rows.push(within("laminar_residual", r2, 0.0, (r1 / 6.0).max(1e-9)));

    let bound = amplitude_bound(profile, bp)?;
    let s1 = (0.4 * bound).min(1e-2);
    let amplitudes = [s1, 0.5 * s1, 0.25 * s1];
    // At np = 100 the half-resolution pass of a thin layer is not yet in its
    // asymptotic regime and leaves a weak-form floor comparable to s².
    let grid = GridSpec { nq: 64, np: 200 };
    let mut strong = Vec::new();
    let mut weak = Vec::new();
    for &s in &amplitudes {
        let f = first_order_height(profile, bp, s, grid)?;
        let r = pb_residual(&f, &c, head).extrapolated;
        strong.push(r.max_interior().max(r.surface).max(r.bottom));
        weak.push(weak_residual(&f, &bump_family(&f)).max_extrapolated());
    }
    rows.push(within("branch_order_strong", slope(&amplitudes, &strong), 1.8, 2.2));
    rows.push(within("branch_order_weak", slope(&amplitudes, &weak), 1.8, 2.2));

    // the ray checks difference across a few nodes, so keep the wave gentler
    let s_field = (0.1 * bound).min(1e-2);
    let field = first_order_height(profile, bp, s_field, GridSpec { nq: 32, np: 20 })?;
    let pbc = check_pbc(&field);
    rows.push(CheckRow {
        pass: pbc.holds,
        ..within("min_h_p", pbc.min_h_p, 0.0, f64::INFINITY)
    });
    let x = 0.3 * field.period();
    let s = stream_function(&field, x, 400)?;
    rows.push(within("bed_stream_value", (s.psi[0] + profile.p0()).abs(), 0.0, 1e-8));
    let dx = 0.01 * field.period();
    let ray = physical_fields(&field, &c, x, dx, 200)?;
    let max_u = ray.u_minus_c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    rows.push(CheckRow {
        pass: max_u < 0.0,
        ..within("u_minus_c_negative", max_u, f64::NEG_INFINITY, 0.0)
    });
    let coarse = vorticity_check(&field, x, 2.0 * dx, 40)?;
    let fine = vorticity_check(&field, x, dx, 80)?;
    if !(fine.max_discretisation_error > 0.0) {
        return Err(Error::numeric("validate", "vorticity check found no interior nodes"));
    }
    let order = (coarse.max_discretisation_error / fine.max_discretisation_error).log2();
    rows.push(within("vorticity_order", order, 1.8, 2.2));
    Ok(Suite {
        rows,
        skipped: Vec::new(),
    })
}
