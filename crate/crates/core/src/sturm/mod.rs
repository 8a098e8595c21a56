//! Sturm–Liouville reduction of the linearised problem: shooting, the
//! bifurcation function `Ξ(λ, μ)`, its zero curve and the bifurcation points.

mod analytic;
mod shooting;
mod spectrum;

pub use analytic::{analytic_layer_solution, AnalyticLayerSolution, BoundaryData};
pub use shooting::{
    shoot_left, shoot_right, xi, xi_derivatives, xi_lambda, xi_mu, ShootingResult,
    ShotDirection, Variational, XiDerivatives, XiLambda, XiValue,
};
pub use spectrum::{
    bifurcation_lambda, check_condition_d2, lambda0, min_period_divisor, mu_of_lambda,
    period_divisor_for, xi_roots_in_lambda, BifurcationPoint, ConditionD2, Eigenfunction,
    SturmProblem,
};

pub(crate) use shooting::xi_fast;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::scaled_tolerance;

/// Discretisation and root-finding controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// RK4 steps per layer.
    pub steps_per_layer: usize,
    /// Relative root tolerance; absolute tolerance is this times `max(1, |root|)`.
    pub root_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            steps_per_layer: 2000,
            root_tolerance: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps_per_layer < 4 {
            return Err(Error::param(
                "steps_per_layer",
                format!("must be at least 4, got {}", self.steps_per_layer),
            ));
        }
        if !(self.root_tolerance > 0.0 && self.root_tolerance < 1e-2) {
            return Err(Error::param(
                "root_tolerance",
                format!("must lie in (0, 1e-2), got {}", self.root_tolerance),
            ));
        }
        Ok(())
    }

    /// Absolute tolerance for a root near `x`.
    pub fn tolerance(&self, x: f64) -> f64 {
        scaled_tolerance(self.root_tolerance, x)
    }
}
