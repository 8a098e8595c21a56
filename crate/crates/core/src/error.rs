use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid profile: entry {index}: {reason}")]
    InvalidProfile { index: usize, reason: String },

    #[error("{what} = {value} is outside the admissible domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("numeric failure in {op}: {detail}")]
    Numeric { op: &'static str, detail: String },

    #[error("mode k={k}, n={n} is infeasible: (kn)^2 = {target} < mu(lambda0) = {mu0}")]
    InfeasibleMode { k: u32, n: u32, target: f64, mu0: f64 },

    #[error("amplitude |s| = {s} exceeds the admissible bound {bound}")]
    Amplitude { s: f64, bound: f64 },

    #[error("singular {what}: {detail}")]
    Singular { what: &'static str, detail: String },

    #[error("min h_p = {min_h_p} <= 0: the field has stagnation (PBC violated)")]
    PbcViolated { min_h_p: f64 },

    #[error("no root found: {0}")]
    NotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn numeric(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Numeric {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn domain(what: &'static str, value: f64, domain: impl Into<String>) -> Self {
        Error::Domain {
            what,
            value,
            domain: domain.into(),
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
