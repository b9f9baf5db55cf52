//! Incremental proximal gradient method with a smooth penalty term for
//! bilevel convex problems
//!
//! ```text
//! minimize   Σᵢ fᵢ(x) + hᵢ(x)
//! subject to x ∈ argmin g
//! ```
//!
//! together with proximal-gradient and FISTA baselines, an orthonormal Haar
//! transform, and builders for wavelet inpainting and generalized Heron
//! problems.
//!
//! ```
//! use penalty_ipg::problems::build_heron;
//! use penalty_ipg::solver::{solve, StoppingRule};
//!
//! let inst = build_heron(3, 2, true, 7)?;
//! let report = solve(&inst.problem()?, &inst.schedule(0.6, 1.9)?, &StoppingRule::relative_change(1e-4, 50_000)?)?;
//! assert!(report.converged());
//! # Ok::<(), penalty_ipg::Error>(())
//! ```

pub mod baselines;
pub mod error;
pub mod functions;
pub mod haar;
pub mod linalg;
pub mod manifest;
pub mod netpbm;
pub mod problems;
pub mod prox;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, DiagonalMask, Vector};
