//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach stdout.

use std::path::Path;
use std::process::{Command, ExitCode, Stdio};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearwave::dispersion::{
    dispersion_vs_shooting, solve_dispersion, special_case_equal_vorticity, symbol_decay_check,
    multiplier_symbol, DispersionInput, MultiplierSymbolInput,
};
use shearwave::sturm::{lambda0, xi, xi_derivatives, SturmProblem};
use shearwave::wavefield::{
    bump_family, first_order_height, pb_residual, physical_fields, stream_function,
    vorticity_check, weak_residual, GridSpec, WaveField,
};
use shearwave::{LaminarFlow, PhysicalConstants, SolverConfig, VorticityProfile};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn two_layer() -> VorticityProfile {
    VorticityProfile::new(vec![-2.0, -1.0, 0.0], vec![1.0, -2.0]).unwrap()
}

/// The three profiles used by the shooting criteria.
fn shooting_profiles() -> Vec<(&'static str, VorticityProfile)> {
    vec![
        ("irrotational", VorticityProfile::irrotational(-1.0).unwrap()),
        ("one-layer gamma=2", VorticityProfile::constant(-1.0, 2.0).unwrap()),
        ("two-layer {1,-2}", two_layer()),
    ]
}

fn water() -> PhysicalConstants {
    PhysicalConstants::new(9.81, 0.07).unwrap()
}

fn floor(profile: &VorticityProfile) -> f64 {
    2.0 * profile.gamma_sup()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn criterion_1() -> Outcome {
    let profile = VorticityProfile::irrotational(-1.0).unwrap();
    let mut worst = 0.0f64;
    for g in [1.0, 8.0, 9.81] {
        let c = PhysicalConstants::new(g, 0.0).unwrap();
        let l0 = lambda0(&profile, &c).map_err(|e| e.to_string())?;
        let err = (l0 - f64::powf(g, 2.0 / 3.0)).abs();
        worst = worst.max(err);
        check(err < 1e-9, format!("g={g}: lambda0={l0}, err={err:e}"))?;
    }
    let c = PhysicalConstants::new(1.0, 0.0).unwrap();
    let v = xi(&profile, &c, 1.0, 1.0, &SolverConfig::default()).map_err(|e| e.to_string())?;
    let err = (v.xi - (-1.0f64).exp()).abs();
    check(err < 1e-8, format!("Xi(1,1)={}, err={err:e}", v.xi))?;
    Ok(format!("max lambda0 err {worst:.1e}, Xi(1,1) err {err:.1e}"))
}

fn criterion_2() -> Outcome {
    let c = water();
    let cfg = SolverConfig::default();
    let mut worst = 0.0f64;
    for (name, profile) in shooting_profiles() {
        let f = floor(&profile);
        for i in 0..10 {
            let lambda = f + 0.25 + 1.5 * i as f64;
            for j in 0..10 {
                let mu = 5.0 * j as f64;
                let v = xi(&profile, &c, lambda, mu, &cfg).map_err(|e| e.to_string())?;
                let err = (v.xi - v.right_shot).abs() / v.xi.abs().max(1.0);
                worst = worst.max(err);
                check(err < 1e-6, format!("{name} at ({lambda}, {mu}): err {err:e}"))?;
            }
        }
    }
    Ok(format!("300 points, max rel err {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let c = water();
    let cfg = SolverConfig::default();
    let profiles = shooting_profiles();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_fd, mut worst_channels) = (0.0f64, 0.0f64);
    for t in 0..20 {
        let (name, profile) = &profiles[t % profiles.len()];
        let lambda = floor(profile) + rng.gen_range(0.5..15.0);
        let mu = rng.gen_range(0.0..30.0);
        let d = xi_derivatives(profile, &c, lambda, mu, &cfg).map_err(|e| e.to_string())?;
        let at = |l: f64, m: f64| xi(profile, &c, l, m, &cfg).map(|v| v.xi).map_err(|e| e.to_string());
        let hm = 1e-4 * mu.max(1.0);
        let hl = 1e-4 * lambda.max(1.0);
        let fd_mu = (at(lambda, mu + hm)? - at(lambda, (mu - hm).max(0.0))?) / (mu + hm - (mu - hm).max(0.0));
        let fd_l = (at(lambda + hl, mu)? - at(lambda - hl, mu)?) / (2.0 * hl);
        let e_mu = rel(fd_mu, d.xi_mu);
        let e_l = rel(fd_l, d.xi_lambda.ode);
        worst_fd = worst_fd.max(e_mu).max(e_l);
        check(
            e_mu < 1e-4 && e_l < 1e-4,
            format!("{name} at ({lambda:.4}, {mu:.4}): xi_mu err {e_mu:e}, xi_lambda err {e_l:e}"),
        )?;
        let integral = d
            .xi_lambda
            .integral
            .ok_or_else(|| format!("{name} at ({lambda}, {mu}): z(0) = 0"))?;
        let e_ch = rel(integral, d.xi_lambda.ode);
        worst_channels = worst_channels.max(e_ch);
        check(e_ch < 1e-6, format!("{name} at ({lambda:.4}, {mu:.4}): channels differ by {e_ch:e}"))?;
    }
    let mut zeros = 0;
    for (name, profile) in &profiles {
        let sp = SturmProblem::new(profile.clone(), c, cfg).map_err(|e| e.to_string())?;
        let l0 = sp.lambda0();
        for i in 1..=8 {
            let lambda = l0 * (1.0 + 0.25 * i as f64);
            let mu = sp.mu_of_lambda(lambda).map_err(|e| e.to_string())?;
            if mu <= 0.0 {
                continue;
            }
            let d = xi_derivatives(profile, &c, lambda, mu, &cfg).map_err(|e| e.to_string())?;
            check(
                d.xi_lambda.ode > 0.0 && d.xi_mu < 0.0,
                format!("{name} zero ({lambda}, {mu}): xi_lambda={}, xi_mu={}", d.xi_lambda.ode, d.xi_mu),
            )?;
            zeros += 1;
        }
    }
    check(zeros >= 20, format!("only {zeros} zeros with mu > 0"))?;
    Ok(format!(
        "FD max rel err {worst_fd:.1e}, channel max rel err {worst_channels:.1e}, signs at {zeros} zeros"
    ))
}

fn criterion_4() -> Outcome {
    let cfg = SolverConfig::default();
    let setups = [
        ("irrotational g=1 sigma=1", VorticityProfile::irrotational(-1.0).unwrap(), PhysicalConstants::new(1.0, 1.0).unwrap()),
        ("one-layer gamma=2", VorticityProfile::constant(-1.0, 2.0).unwrap(), water()),
        ("two-layer {1,-2}", two_layer(), water()),
    ];
    for (name, profile, c) in setups {
        let sp = SturmProblem::new(profile, c, cfg).map_err(|e| e.to_string())?;
        let l0 = sp.lambda0();
        for i in 0..25 {
            let lambda = l0 * (1.0 + 1e-3 * f64::powf(1.4, i as f64));
            let v = sp.xi(lambda, 0.0).map_err(|e| e.to_string())?;
            check(v > 0.0, format!("{name}: Xi({lambda}, 0) = {v}"))?;
        }
        for i in 0..10 {
            let lambda = l0 * (1.05 + 0.5 * i as f64);
            let mu_star = sp.mu_of_lambda(lambda).map_err(|e| e.to_string())?;
            let top = 3.0 * mu_star + 3.0;
            let mut changes = 0;
            let mut prev = sp.xi(lambda, 0.0).map_err(|e| e.to_string())?;
            for j in 1..=300 {
                let cur = sp.xi(lambda, top * j as f64 / 300.0).map_err(|e| e.to_string())?;
                if (cur < 0.0) != (prev < 0.0) {
                    changes += 1;
                }
                prev = cur;
            }
            check(changes == 1, format!("{name}: {changes} sign changes along mu at lambda={lambda}"))?;
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..50 {
            let lambda = l0 * (1.0 + 1e-3) * f64::powf(1e3, i as f64 / 49.0);
            let mu = sp.mu_of_lambda(lambda).map_err(|e| e.to_string())?;
            check(mu > prev, format!("{name}: mu({lambda}) = {mu} <= {prev}"))?;
            prev = mu;
        }
        let ratio = |l: f64| sp.mu_of_lambda(l).map(|m| m / l).map_err(|e| e.to_string());
        let (lo, hi) = (ratio(10.0 * l0)?, ratio(1e3 * l0)?);
        check(hi > lo, format!("{name}: mu/lambda {hi} at 1e3*lambda0 vs {lo} at 10*lambda0"))?;
    }
    Ok("3 profiles: Xi(.,0)>0, one sign change, mu increasing, mu/lambda growing".into())
}

fn criterion_5() -> Outcome {
    let c = water();
    let cfg = SolverConfig::default();
    let mut worst_res = 0.0f64;
    let mut worst_root = 0.0f64;
    let mut count = 0;
    for k in 1..=3 {
        let pairs = dispersion_vs_shooting(&two_layer(), &c, k, &cfg).map_err(|e| e.to_string())?;
        check(!pairs.is_empty(), format!("k={k}: no Xi root"))?;
        for pair in pairs {
            let r = pair.residual.fractional.abs() / pair.residual.fractional_scale;
            let m = pair
                .root_mismatch()
                .ok_or_else(|| format!("k={k}, lambda*={}: cubic has no positive root", pair.lambda))?;
            worst_res = worst_res.max(r);
            worst_root = worst_root.max(m);
            check(r < 1e-6, format!("k={k}, lambda*={}: residual {r:e}", pair.lambda))?;
            check(m < 1e-6, format!("k={k}, lambda*={}: root mismatch {m:e}", pair.lambda))?;
            count += 1;
        }
    }
    Ok(format!("{count} roots, max scaled residual {worst_res:.1e}, max root mismatch {worst_root:.1e}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut accepted, mut rejected) = (0, 0);
    let (mut worst, mut worst_irr) = (0.0f64, 0.0f64);
    while accepted < 100 {
        let gamma = rng.gen_range(-5.0..5.0);
        let d = rng.gen_range(0.2..3.0);
        let k: u32 = rng.gen_range(1..=10);
        let g = rng.gen_range(0.5..20.0);
        let sigma = rng.gen_range(0.0..2.0);
        let split = rng.gen_range(0.2..0.8);
        let (d1, d2) = (d * split, d * (1.0 - split));
        let exact = special_case_equal_vorticity(gamma, d, k, g, sigma).map_err(|e| e.to_string())?;
        // the top layer must not stagnate: b(0) = x + γ d2 > 0
        if exact + gamma * d2 <= 1e-9 * exact.max(gamma.abs() * d2) {
            rejected += 1;
            continue;
        }
        accepted += 1;
        let input = DispersionInput { d1, d2, gamma1: gamma, gamma2: gamma, g, sigma, k };
        let roots = solve_dispersion(&input).map_err(|e| e.to_string())?;
        let err = roots
            .iter()
            .map(|r| (r - exact).abs() / exact.max(1.0))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(err);
        check(err < 1e-10, format!("{input:?}: roots {roots:?} vs {exact}"))?;

        let irr = DispersionInput { gamma1: 0.0, gamma2: 0.0, ..input };
        let kf = k as f64;
        let formula = ((g + sigma * kf * kf) * (kf * d).tanh() / kf).sqrt();
        let zero = special_case_equal_vorticity(0.0, d, k, g, sigma).map_err(|e| e.to_string())?;
        let roots = solve_dispersion(&irr).map_err(|e| e.to_string())?;
        let err = roots
            .iter()
            .map(|r| (r - formula).abs() / formula.max(1.0))
            .fold(f64::INFINITY, f64::min)
            .max((zero - formula).abs() / formula.max(1.0));
        worst_irr = worst_irr.max(err);
        check(err < 1e-10, format!("{irr:?}: roots {roots:?}, special {zero} vs {formula}"))?;
    }
    Ok(format!(
        "100 draws ({rejected} stagnating rejected), max rel err {worst:.1e}, irrotational {worst_irr:.1e}"
    ))
}

fn criterion_7() -> Outcome {
    let input = MultiplierSymbolInput { a_p1: 1.0, gamma1: 1.0, gamma2: 0.0, theta1: 1.0, theta2: 1.0 };
    let half = symbol_decay_check(&input, 5000).map_err(|e| e.to_string())?;
    let full = symbol_decay_check(&input, 10_000).map_err(|e| e.to_string())?;
    for (what, a, b) in [
        ("|k lambda_k|", half.max_k_lambda, full.max_k_lambda),
        ("|k^2 diff|", half.max_k2_diff, full.max_k2_diff),
    ] {
        check(a.is_finite() && b.is_finite(), format!("{what} not finite"))?;
        check(rel(b, a) < 1e-2, format!("{what}: {a} at K=5000, {b} at K=10000"))?;
    }
    let tail = 1e4 * multiplier_symbol(&input, 10_000).map_err(|e| e.to_string())?;
    check((tail - 0.5).abs() < 1e-3, format!("k lambda_k at 1e4 = {tail}"))?;
    Ok(format!(
        "max|k lambda_k| {:.6}, max|k^2 diff| {:.6}, k lambda_k(1e4) {tail:.6}",
        full.max_k_lambda, full.max_k2_diff
    ))
}

fn slope(s: &[f64], r: &[f64]) -> f64 {
    let xs: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

fn criterion_8() -> Outcome {
    let setups = [
        ("irrotational g=1 sigma=1", VorticityProfile::irrotational(-1.0).unwrap(), PhysicalConstants::new(1.0, 1.0).unwrap()),
        ("two-layer {1,-2} g=9.81 sigma=2", two_layer(), PhysicalConstants::new(9.81, 2.0).unwrap()),
    ];
    let amplitudes = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
    let grid = GridSpec { nq: 64, np: 100 };
    let mut summary = Vec::new();
    for (name, profile, c) in setups {
        let sp = SturmProblem::new(profile.clone(), c, SolverConfig::default()).map_err(|e| e.to_string())?;
        let n = sp.min_period_divisor().map_err(|e| e.to_string())?;
        let bp = sp.bifurcation(1, n).map_err(|e| e.to_string())?;
        let head = LaminarFlow::new(profile.clone(), bp.lambda)
            .map_err(|e| e.to_string())?
            .total_head(c.gravity);
        let mut strong = Vec::new();
        let mut weak = Vec::new();
        for &s in &amplitudes {
            let f = first_order_height(&profile, &bp, s, grid).map_err(|e| e.to_string())?;
            let r = pb_residual(&f, &c, head).extrapolated;
            strong.push(r.max_interior().max(r.surface).max(r.bottom));
            weak.push(weak_residual(&f, &bump_family(&f)).max_extrapolated());
        }
        let (ss, sw) = (slope(&amplitudes, &strong), slope(&amplitudes, &weak));
        check(
            (ss - 2.0).abs() <= 0.2,
            format!("{name}: strong slope {ss:.3}, norms {strong:?}"),
        )?;
        check((sw - 2.0).abs() <= 0.2, format!("{name}: weak slope {sw:.3}, values {weak:?}"))?;
        summary.push(format!("{name} (n={n}): strong {ss:.3}, weak {sw:.3}"));
    }
    Ok(summary.join("; "))
}

fn criterion_9() -> Outcome {
    let c = water();
    let profile = two_layer();
    let flow = LaminarFlow::new(profile.clone(), 6.0).map_err(|e| e.to_string())?;
    let head = flow.total_head(c.gravity);
    let laminar = |np| WaveField::laminar(flow.clone(), 2.0, GridSpec { nq: 64, np });
    let f100 = laminar(100).map_err(|e| e.to_string())?;
    let f200 = laminar(200).map_err(|e| e.to_string())?;
    let r100 = pb_residual(&f100, &c, head).extrapolated;
    let r200 = pb_residual(&f200, &c, head).extrapolated;
    check(
        r100.max_interior() < 1e-7 && r100.surface < 1e-6 && r100.bottom == 0.0,
        format!("laminar strong residual {r100:?}"),
    )?;
    check(
        r200.max_interior() < r100.max_interior() / 8.0 && r200.surface < r100.surface / 6.0,
        format!("laminar residual does not converge: {r100:?} -> {r200:?}"),
    )?;
    let w100 = weak_residual(&f100, &bump_family(&f100)).max_extrapolated();
    let w200 = weak_residual(&f200, &bump_family(&f200)).max_extrapolated();
    check(w100 < 1e-7 && w200 < w100 / 8.0, format!("laminar weak residual {w100:e} -> {w200:e}"))?;

    let ray = physical_fields(&f100, &c, 0.3, 0.05, 400).map_err(|e| e.to_string())?;
    for i in 0..ray.y.len() {
        let b = flow.coefficient_b(-ray.psi[i]).map_err(|e| e.to_string())?;
        check(ray.v[i].abs() <= 1e-10, format!("laminar v = {} at y = {}", ray.v[i], ray.y[i]))?;
        check(
            (ray.u_minus_c[i] + b).abs() <= 1e-10,
            format!("u-c = {} vs -b = {} at y = {}", ray.u_minus_c[i], -b, ray.y[i]),
        )?;
    }
    let lam_vort = vorticity_check(&f100, 0.3, 0.05, 400).map_err(|e| e.to_string())?;
    check(lam_vort.max_error < 1e-6, format!("laminar vorticity error {:e}", lam_vort.max_error))?;

    let wave_c = PhysicalConstants::new(9.81, 2.0).unwrap();
    let sp = SturmProblem::new(profile.clone(), wave_c, SolverConfig::default()).map_err(|e| e.to_string())?;
    let n = sp.min_period_divisor().map_err(|e| e.to_string())?;
    let bp = sp.bifurcation(1, n).map_err(|e| e.to_string())?;
    let wave = first_order_height(&profile, &bp, 2e-2, GridSpec { nq: 32, np: 20 }).map_err(|e| e.to_string())?;
    let p0 = profile.p0();
    let mut worst_bed = 0.0f64;
    for field in [&f100, &wave] {
        for x in [0.0, 0.37, 1.1] {
            let s = stream_function(field, x, 400).map_err(|e| e.to_string())?;
            let err = (s.psi[0] + p0).abs();
            worst_bed = worst_bed.max(err);
            check(err < 1e-8, format!("bed value {} at x = {x}", s.psi[0]))?;
        }
    }
    let coarse = vorticity_check(&wave, 0.4, 0.04, 40).map_err(|e| e.to_string())?;
    let fine = vorticity_check(&wave, 0.4, 0.02, 80).map_err(|e| e.to_string())?;
    let order = (coarse.max_discretisation_error / fine.max_discretisation_error).log2();
    check(
        (order - 2.0).abs() < 0.2,
        format!(
            "vorticity error order {order:.3} ({:e} -> {:e})",
            coarse.max_discretisation_error, fine.max_discretisation_error
        ),
    )?;
    Ok(format!(
        "laminar residuals {:.1e}/{:.1e}/{w100:.1e}, bed err {worst_bed:.1e}, vorticity order {order:.2}",
        r100.max_interior(),
        r100.surface
    ))
}

/// Runs `validate` on a shipped configuration into `out` and returns the
/// CSV files it wrote, by name.
fn validate_run(config: &Path, out: &Path, threads: &str) -> Result<Vec<(String, Vec<u8>)>, String> {
    let _ = std::fs::remove_dir_all(out);
    let status = Command::new(env!("CARGO_BIN_EXE_shearwave"))
        .arg("validate")
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .env("SHEARWAVE_THREADS", threads)
        .stdout(Stdio::null())
        .status()
        .map_err(|e| format!("cannot start shearwave: {e}"))?;
    if !status.success() {
        return Err(format!("validate on {} exited with {status}", config.display()));
    }
    let mut files = Vec::new();
    for entry in std::fs::read_dir(out).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
            files.push((path.file_name().unwrap().to_string_lossy().into_owned(), bytes));
        }
    }
    files.sort();
    Ok(files)
}

fn criterion_10() -> Outcome {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let scratch = std::env::temp_dir().join(format!("shearwave-determinism-{}", std::process::id()));
    let mut compared = 0;
    let mut outcome = Ok(());
    for name in ["two_layer", "three_layer"] {
        let config = configs.join(format!("{name}.json"));
        let a = validate_run(&config, &scratch.join(format!("{name}-a")), "1")?;
        let b = validate_run(&config, &scratch.join(format!("{name}-b")), "4")?;
        if a.is_empty() {
            outcome = Err(format!("{name}: no CSV written"));
            break;
        }
        if a != b {
            outcome = Err(format!("{name}: CSV bytes differ between runs"));
            break;
        }
        compared += a.len();
    }
    let _ = std::fs::remove_dir_all(&scratch);
    outcome?;
    Ok(format!("{compared} CSV files byte-identical across runs with 1 and 4 threads"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle exactness (irrotational)", criterion_1),
        ("two-sided shooting agreement", criterion_2),
        ("derivative identities", criterion_3),
        ("sign and monotonicity structure", criterion_4),
        ("shooting vs dispersion relation", criterion_5),
        ("equal-vorticity reduction chain", criterion_6),
        ("multiplier symbol decay", criterion_7),
        ("first-order branch residual slope", criterion_8),
        ("field consistency", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{secs:.2}s] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{secs:.2}s] {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
