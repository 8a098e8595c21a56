//! Command-line front end: configuration, dispatch and artifact writing.
//!
//! Exit status 0 on success, 2 for an invalid configuration or invalid
//! arguments, 3 for a numeric failure or a failed `validate` check.

pub mod config;
pub mod csv;
pub mod validate;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::dispersion::{solve_dispersion, symbol_decay_check, multiplier_symbol, DispersionInput, MultiplierSymbolInput};
use crate::error::Error;
use crate::laminar::LaminarFlow;
use crate::sturm::{xi, xi_derivatives, SturmProblem};
use crate::wavefield::{check_pbc, first_order_height, GridSpec};

pub use config::{ConfigError, RunConfig};
use csv::Table;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "shearwave", version, about = "Capillary-gravity waves over piecewise-constant vorticity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output_dir` from the configuration.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Laminar flow b(p), H(p) at λ (default λ₀); writes laminar.csv.
    Laminar {
        #[command(flatten)]
        common: ConfigArgs,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Prints λ₀ with ten decimals.
    Lambda0 {
        #[command(flatten)]
        common: ConfigArgs,
    },
    /// Ξ and its derivatives at λ: sampled over [μ_min, μ_max] into xi.csv,
    /// or printed as JSON at a single --mu.
    Xi {
        #[command(flatten)]
        common: ConfigArgs,
        #[arg(long)]
        lambda: f64,
        #[arg(long, conflicts_with_all = ["mu_min", "mu_max"])]
        mu: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        mu_min: f64,
        #[arg(long, default_value_t = 100.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Samples the zero curve μ(λ) on [λ₀, λ_max]; writes mu_curve.csv.
    MuCurve {
        #[command(flatten)]
        common: ConfigArgs,
        /// Upper end of the λ range (default 10 λ₀).
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Bifurcation points for k = 1..K; writes bifurcation.csv and
    /// eigenfunction_k<k>.csv.
    Bifurcate {
        #[command(flatten)]
        common: ConfigArgs,
        #[arg(long, default_value_t = 5)]
        k_max: u32,
    },
    /// Positive roots of the two-layer dispersion relation as a JSON list.
    Dispersion {
        /// Thickness of the bottom layer.
        #[arg(long)]
        d1: f64,
        /// Thickness of the top layer.
        #[arg(long)]
        d2: f64,
        /// Vorticity of the bottom layer.
        #[arg(long)]
        gamma1: f64,
        /// Vorticity of the top layer.
        #[arg(long)]
        gamma2: f64,
        /// Gravitational acceleration.
        #[arg(long)]
        g: f64,
        /// Surface tension coefficient.
        #[arg(long)]
        sigma: f64,
        /// Wavenumber.
        #[arg(long)]
        k: u32,
    },
    /// Multiplier symbol of a two-layer laminar flow at λ (default λ₀);
    /// writes symbol.csv.
    Symbol {
        #[command(flatten)]
        common: ConfigArgs,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        k_max: u32,
    },
    /// First-order wave field; writes field.csv and surface.csv.
    Field {
        #[command(flatten)]
        common: ConfigArgs,
        /// Mode index; the wavenumber is k n.
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Amplitude s of the first-order term.
        #[arg(long)]
        amplitude: f64,
        #[arg(long, default_value_t = 128)]
        nq: usize,
        #[arg(long, default_value_t = 100)]
        np: usize,
    },
    /// Runs the invariant suite; writes validate.csv and fails on any check.
    Validate {
        #[command(flatten)]
        common: ConfigArgs,
    },
}

/// A failure carrying the exit status it maps to.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numeric { op: &'static str, detail: String },
}

impl Failure {
    fn numeric(op: &'static str, params: impl AsRef<str>, e: Error) -> Self {
        Failure::Numeric {
            op,
            detail: format!("{} ({})", e, params.as_ref()),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::Numeric {
            op: "write",
            detail: format!("{}: {e}", path.display()),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Numeric { .. } => EXIT_NUMERIC,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "invalid configuration: {m}"),
            Failure::Numeric { op, detail } => write!(f, "{op} failed: {detail}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

struct Context {
    cfg: RunConfig,
    out: PathBuf,
}

impl Context {
    fn load(args: &ConfigArgs) -> Result<Self, Failure> {
        let cfg = RunConfig::load(&args.config)?;
        let out = args.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
        Ok(Context { cfg, out })
    }

    fn problem(&self) -> Result<SturmProblem, Failure> {
        SturmProblem::new(self.cfg.profile.clone(), self.cfg.constants, self.cfg.solver)
            .map_err(|e| Failure::numeric("lambda0", "config", e))
    }

    fn write(&self, name: &str, table: &Table) -> Result<PathBuf, Failure> {
        std::fs::create_dir_all(&self.out).map_err(|e| Failure::io(&self.out, e))?;
        let path = self.out.join(name);
        table.write(&path, &self.cfg.hash).map_err(|e| Failure::io(&path, e))?;
        Ok(path)
    }
}

/// Caps the global rayon pool from `SHEARWAVE_THREADS`.
fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("SHEARWAVE_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("SHEARWAVE_THREADS must be a positive integer, got {value:?}")))?;
    // a second initialisation in the same process is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Laminar {
            common,
            lambda,
            samples,
        } => {
            let ctx = Context::load(&common)?;
            let lambda = match lambda {
                Some(l) => l,
                None => ctx.problem()?.lambda0(),
            };
            let flow = LaminarFlow::new(ctx.cfg.profile.clone(), lambda)
                .map_err(|e| Failure::numeric("laminar", format!("lambda={lambda}"), e))?;
            let rows = flow
                .samples(samples)
                .map_err(|e| Failure::numeric("laminar", format!("samples={samples}"), e))?;
            let mut t = Table::new(&["p", "b", "H", "gamma", "Gamma"]);
            for s in rows {
                t.push(vec![s.p.into(), s.b.into(), s.height.into(), s.gamma.into(), s.big_gamma.into()]);
            }
            let path = ctx.write("laminar.csv", &t)?;
            println!("lambda = {lambda:.10}, depth = {:.10}", flow.depth());
            println!("wrote {}", path.display());
        }
        Command::Lambda0 { common } => {
            let ctx = Context::load(&common)?;
            println!("{:.10}", ctx.problem()?.lambda0());
        }
        Command::Xi {
            common,
            lambda,
            mu,
            mu_min,
            mu_max,
            samples,
        } => {
            let ctx = Context::load(&common)?;
            let (p, c, s) = (&ctx.cfg.profile, &ctx.cfg.constants, &ctx.cfg.solver);
            if let Some(mu) = mu {
                let params = format!("lambda={lambda}, mu={mu}");
                let v = xi(p, c, lambda, mu, s).map_err(|e| Failure::numeric("xi", &params, e))?;
                let d = xi_derivatives(p, c, lambda, mu, s).map_err(|e| Failure::numeric("xi", &params, e))?;
                let json = serde_json::json!({
                    "lambda": lambda,
                    "mu": mu,
                    "xi": v.xi,
                    "right_shot": v.right_shot,
                    "xi_mu": d.xi_mu,
                    "xi_lambda": d.xi_lambda.ode,
                    "xi_lambda_integral": d.xi_lambda.integral,
                });
                println!("{json}");
                return Ok(());
            }
            if !(mu_min >= 0.0 && mu_max > mu_min) || samples < 2 {
                return Err(Failure::Config(
                    "need 0 <= --mu-min < --mu-max and --samples >= 2".into(),
                ));
            }
            let rows = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let mu = mu_min + (mu_max - mu_min) * i as f64 / (samples - 1) as f64;
                    xi_derivatives(p, c, lambda, mu, s)
                        .map(|d| (mu, d))
                        .map_err(|e| Failure::numeric("xi", format!("lambda={lambda}, mu={mu}"), e))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut t = Table::new(&["mu", "xi", "xi_mu", "xi_lambda"]);
            for (mu, d) in rows {
                t.push(vec![mu.into(), d.xi.into(), d.xi_mu.into(), d.xi_lambda.ode.into()]);
            }
            println!("wrote {}", ctx.write("xi.csv", &t)?.display());
        }
        Command::MuCurve {
            common,
            lambda,
            samples,
        } => {
            let ctx = Context::load(&common)?;
            let sp = ctx.problem()?;
            let l0 = sp.lambda0();
            let top = lambda.unwrap_or(10.0 * l0);
            if !(top > l0) || samples < 2 {
                return Err(Failure::Config(format!(
                    "need --lambda > lambda0 = {l0} and --samples >= 2"
                )));
            }
            let lambdas: Vec<f64> = (0..samples)
                .map(|i| l0 * (top / l0).powf(i as f64 / (samples - 1) as f64))
                .collect();
            let mus = lambdas
                .par_iter()
                .map(|&l| sp.mu_of_lambda(l).map_err(|e| Failure::numeric("mu_of_lambda", format!("lambda={l}"), e)))
                .collect::<Result<Vec<_>, _>>()?;
            let mut t = Table::new(&["lambda", "mu"]);
            for (l, m) in lambdas.iter().zip(&mus) {
                t.push(vec![(*l).into(), (*m).into()]);
            }
            println!("wrote {}", ctx.write("mu_curve.csv", &t)?.display());
        }
        Command::Bifurcate { common, k_max } => {
            let ctx = Context::load(&common)?;
            let sp = ctx.problem()?;
            let n = sp
                .min_period_divisor()
                .map_err(|e| Failure::numeric("min_period_divisor", "config", e))?;
            let points = (1..=k_max)
                .into_par_iter()
                .map(|k| sp.bifurcation(k, n).map_err(|e| Failure::numeric("bifurcation", format!("k={k}, n={n}"), e)))
                .collect::<Result<Vec<_>, _>>()?;
            let mut t = Table::new(&["k", "n", "wavenumber", "mu", "lambda", "at_lambda0", "xi_residual"]);
            for bp in &points {
                t.push(vec![
                    bp.k.into(),
                    bp.n.into(),
                    bp.wavenumber.into(),
                    bp.mu.into(),
                    bp.lambda.into(),
                    bp.at_lambda0.into(),
                    bp.xi_residual.into(),
                ]);
            }
            println!("lambda0 = {:.10}, n = {n}", sp.lambda0());
            println!("wrote {}", ctx.write("bifurcation.csv", &t)?.display());
            for bp in &points {
                let e = &bp.eigenfunction;
                let mut t = Table::new(&["p", "v", "v_p"]);
                for i in 0..e.p.len() {
                    t.push(vec![e.p[i].into(), e.v[i].into(), e.dv[i].into()]);
                }
                let name = format!("eigenfunction_k{}.csv", bp.k);
                println!("wrote {}", ctx.write(&name, &t)?.display());
            }
        }
        Command::Dispersion {
            d1,
            d2,
            gamma1,
            gamma2,
            g,
            sigma,
            k,
        } => {
            let input = DispersionInput { d1, d2, gamma1, gamma2, g, sigma, k };
            input.validate().map_err(|e| Failure::Config(e.to_string()))?;
            let roots = solve_dispersion(&input)
                .map_err(|e| Failure::numeric("solve_dispersion", format!("{input:?}"), e))?;
            println!("{}", serde_json::to_string(&roots).expect("floats serialise"));
        }
        Command::Symbol {
            common,
            lambda,
            k_max,
        } => {
            let ctx = Context::load(&common)?;
            let lambda = match lambda {
                Some(l) => l,
                None => ctx.problem()?.lambda0(),
            };
            let params = format!("lambda={lambda}, k_max={k_max}");
            let flow = LaminarFlow::new(ctx.cfg.profile.clone(), lambda)
                .map_err(|e| Failure::numeric("symbol", &params, e))?;
            let input = MultiplierSymbolInput::from_laminar(&flow)
                .map_err(|e| Failure::Config(e.to_string()))?;
            let decay = symbol_decay_check(&input, k_max.max(2))
                .map_err(|e| Failure::numeric("symbol", &params, e))?;
            let values = (0..=k_max as i64 + 1)
                .map(|k| multiplier_symbol(&input, k))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::numeric("symbol", &params, e))?;
            let mut t = Table::new(&["k", "lambda_k", "k_lambda_k", "k2_diff"]);
            for k in 0..=k_max as usize {
                let kf = k as f64;
                t.push(vec![
                    k.into(),
                    values[k].into(),
                    (kf * values[k]).into(),
                    (kf * kf * (values[k + 1] - values[k])).into(),
                ]);
            }
            println!(
                "max |k lambda_k| = {:.10}, max |k^2 diff| = {:.10}",
                decay.max_k_lambda, decay.max_k2_diff
            );
            println!("wrote {}", ctx.write("symbol.csv", &t)?.display());
        }
        Command::Field {
            common,
            k,
            amplitude,
            nq,
            np,
        } => {
            let ctx = Context::load(&common)?;
            let grid = GridSpec { nq, np };
            grid.validate().map_err(|e| Failure::Config(e.to_string()))?;
            let sp = ctx.problem()?;
            let n = sp
                .min_period_divisor()
                .map_err(|e| Failure::numeric("min_period_divisor", "config", e))?;
            let params = format!("k={k}, n={n}, amplitude={amplitude}");
            let bp = sp.bifurcation(k, n).map_err(|e| Failure::numeric("bifurcation", &params, e))?;
            let field = first_order_height(&ctx.cfg.profile, &bp, amplitude, grid)
                .map_err(|e| Failure::numeric("field", &params, e))?;
            let pbc = check_pbc(&field);
            let mut t = Table::new(&["q", "p", "h", "h_p", "h_q"]);
            for r in 0..field.rows() {
                let j = field.layer_of_row(r);
                for c in 0..field.nq() {
                    let d = field.eval_in_layer(j, field.q()[c], field.p()[r]);
                    t.push(vec![field.q()[c].into(), field.p()[r].into(), field.h(r, c).into(), d.h_p.into(), d.h_q.into()]);
                }
            }
            let mut surface = Table::new(&["q", "eta"]);
            for &q in field.q() {
                surface.push(vec![q.into(), field.eta(q).into()]);
            }
            println!(
                "lambda = {:.10}, wavenumber = {}, min h_p = {:.6e}",
                bp.lambda, bp.wavenumber, pbc.min_h_p
            );
            println!("wrote {}", ctx.write("field.csv", &t)?.display());
            println!("wrote {}", ctx.write("surface.csv", &surface)?.display());
        }
        Command::Validate { common } => {
            let ctx = Context::load(&common)?;
            let suite = validate::run_suite(&ctx.cfg)
                .map_err(|e| Failure::numeric("validate", common.config.display().to_string(), e))?;
            let rows = suite.rows;
            let mut t = Table::new(&["check", "value", "lower", "upper", "pass"]);
            let mut failed = Vec::new();
            for r in &rows {
                t.push(vec![r.name.as_str().into(), r.value.into(), r.lower.into(), r.upper.into(), r.pass.into()]);
                let mark = if r.pass { "PASS" } else { "FAIL" };
                println!("{mark} {:<28} {}", r.name, csv::format_float(r.value));
                if !r.pass {
                    failed.push(r.name.clone());
                }
            }
            for note in &suite.skipped {
                println!("SKIP {note}");
            }
            println!("wrote {}", ctx.write("validate.csv", &t)?.display());
            if !failed.is_empty() {
                return Err(Failure::Numeric {
                    op: "validate",
                    detail: format!("{} of {} checks failed: {}", failed.len(), rows.len(), failed.join(", ")),
                });
            }
            println!("all {} checks passed", rows.len());
        }
    }
    Ok(())
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
