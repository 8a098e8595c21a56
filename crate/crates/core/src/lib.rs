//! Steady periodic capillary-gravity waves over shear currents with
//! piecewise-constant vorticity: laminar flows, the Sturm–Liouville
//! bifurcation function, dispersion relations and first-order wave fields.

pub mod cli;
pub mod dispersion;
pub mod error;
pub mod integrate;
pub mod laminar;
pub mod model;
pub mod quadrature;
pub mod roots;
pub mod sturm;
pub mod wavefield;

pub use error::{Error, Result};
pub use laminar::{LaminarFlow, LaminarSample};
pub use model::{Layer, PhysicalConstants, VorticityProfile};
pub use sturm::SolverConfig;
