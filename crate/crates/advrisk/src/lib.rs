//! Risk analysis for linear classifiers under adversarial perturbations.
//!
//! The crate evaluates standard and adversarial risks of linear classifiers
//! on two synthetic testbeds (a symmetric Gaussian mixture and a 2-D
//! two-squares distribution), solves the worst-case perturbation problem
//! exactly (with and without a sign-preservation constraint on a base
//! classifier), trains linear classifiers on the joint standard/adversarial
//! objective by full-batch gradient descent, and ships a CLI that runs the
//! whole pipeline as reproducible experiments with CSV/SVG output.

pub mod attack;
pub mod cli;
pub mod model;
pub mod numerics;
pub mod plot;
pub mod risk;
pub mod train;

mod rng;

use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector or dataset dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The requested combination is intentionally not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Gradient descent produced a non-finite objective.
    #[error("objective diverged at iteration {iter}")]
    Diverged { iter: usize },

    /// An I/O operation failed; the path is included for context.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
