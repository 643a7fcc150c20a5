use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e} below -{tol:e}")]
    NotPsd { min_eigenvalue: f64, tol: f64 },

    #[error("not a contraction: {which} has norm {norm} > 1 + {tol:e}")]
    NotContraction {
        which: &'static str,
        norm: f64,
        tol: f64,
    },

    #[error("pair does not commute: ||T1 T2 - T2 T1|| = {residual:e} > {tol:e}")]
    NotCommuting { residual: f64, tol: f64 },

    #[error("{which} is not pure: spectral radius {spectral_radius} >= 1 - {tol:e} (the dilation requires a pure T1)")]
    NotPure {
        which: &'static str,
        spectral_radius: f64,
        tol: f64,
    },

    #[error("boundary pole at z = {z}: resolvent condition number {condition:e}")]
    BoundaryPole { z: Complex64, condition: f64 },

    #[error("canonical split leakage {residual:e} exceeds {tol:e}")]
    SplitLeakage { residual: f64, tol: f64 },

    #[error("von Neumann chain violated: {0}")]
    ChainViolation(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 1,
            Error::Dimension(_)
            | Error::NotPsd { .. }
            | Error::NotContraction { .. }
            | Error::NotCommuting { .. }
            | Error::NotPure { .. } => 2,
            Error::BoundaryPole { .. }
            | Error::SplitLeakage { .. }
            | Error::ChainViolation(_)
            | Error::Numeric(_) => 3,
        }
    }
}
