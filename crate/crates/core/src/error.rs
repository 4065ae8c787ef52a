// Copyright 2026 The hybridcool Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode of the library.
///
/// Variants are grouped by the process exit code the CLI maps them to; see
/// [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate junction: effective Josephson energy is zero, mixing angle undefined")]
    DegenerateJunction,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |H - H^dag| = {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("fixed point did not converge after {iterations} iterations (last residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("ambiguous steady state: {} real branches with no selection rule satisfied ({branches:?})", branches.len())]
    Ambiguous { branches: Vec<f64> },

    #[error("steady state is not unique: {count} eigenvalues within {tolerance:.1e} of zero")]
    Multiplicity { count: usize, tolerance: f64 },

    #[error("linear solve failed: {0}")]
    Solve(String),

    #[error("integration failed at t = {time}: {reason}")]
    Integration { time: f64, reason: String },

    #[error("heating regime: net cooling rate {rate:.6e} is not positive")]
    HeatingRegime { rate: f64 },

    #[error("divergent phonon number: total damping rate {total_rate:.6e} is not positive")]
    Divergence { total_rate: f64 },

    #[error("moment generator is unstable: eigenvalue {re:.6e}{im:+.6e}i has non-negative real part")]
    Unstable { re: f64, im: f64 },

    #[error("unphysical state: {0}")]
    Physicality(String),

    #[error("Fock truncation too small: top-level population of the {subsystem} is {leakage:.3e} (limit {limit:.1e}); raise cutoff")]
    Cutoff {
        subsystem: &'static str,
        leakage: f64,
        limit: f64,
    },

    #[error("config error{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config {
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config_field(field: &str, message: impl Into<String>) -> Self {
        Error::Config {
            line: None,
            field: Some(field.to_string()),
            message: message.into(),
        }
    }

    /// Process exit code: config=2, convergence=3, physicality=4, cutoff=5,
    /// anything else 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            Error::Convergence { .. } | Error::Ambiguous { .. } => 3,
            Error::Physicality(_) | Error::Unstable { .. } | Error::NotHermitian { .. } => 4,
            Error::Cutoff { .. } => 5,
            _ => 1,
        }
    }

    /// Name of the module the failure class belongs to, for error reports.
    pub fn module(&self) -> &'static str {
        match self {
            Error::DegenerateJunction | Error::Convergence { .. } | Error::Ambiguous { .. } => {
                "device"
            }
            Error::NotHermitian { .. } | Error::DimensionMismatch { .. } => "operators",
            Error::Multiplicity { .. } | Error::Solve(_) | Error::Integration { .. } => "lindblad",
            Error::HeatingRegime { .. } | Error::Divergence { .. } => "cooling_weak",
            Error::Unstable { .. } | Error::Physicality(_) => "cooling_strong",
            Error::Cutoff { .. } => "oracle",
            Error::Config { .. } => "config",
            Error::Domain(_) => "domain",
            Error::Io(_) => "io",
        }
    }

    /// Variant-specific machine-readable detail.
    pub fn context(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            Error::Convergence {
                iterations,
                residual,
            } => json!({ "iterations": iterations, "residual": residual }),
            Error::Ambiguous { branches } => json!({ "branches": branches }),
            Error::Multiplicity { count, tolerance } => {
                json!({ "count": count, "tolerance": tolerance })
            }
            Error::Cutoff {
                subsystem,
                leakage,
                limit,
            } => json!({ "subsystem": subsystem, "leakage": leakage, "limit": limit }),
            Error::Config { line, field, .. } => json!({ "line": line, "field": field }),
            Error::Unstable { re, im } => json!({ "eigenvalue": [re, im] }),
            Error::HeatingRegime { rate } => json!({ "rate": rate }),
            Error::Divergence { total_rate } => json!({ "total_rate": total_rate }),
            Error::Integration { time, .. } => json!({ "time": time }),
            Error::DimensionMismatch { expected, found } => {
                json!({ "expected": expected, "found": found })
            }
            Error::NotHermitian { defect } => json!({ "defect": defect }),
            _ => json!({}),
        }
    }
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Solve(e.to_string())
    }
}
