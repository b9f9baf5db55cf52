//! The incremental proximal gradient method with a smooth penalty term.
//!
//! Solves
//!
//! ```text
//! minimize   Σᵢ fᵢ(x) + hᵢ(x)
//! subject to x ∈ argmin g
//! ```
//!
//! where each `fᵢ` is reached through its prox, each `hᵢ` and `g` through
//! their gradients. One outer iteration takes a penalty gradient step with
//! weight `αₖβₖ` and then one forward-backward step per component, in
//! index order.

mod diagnostics;
mod hypotheses;
mod ipg;
mod stopping;

use std::sync::Arc;

pub use diagnostics::{
    quasi_fejer_check, FejerReport, FejerTolerances, IterRecord, SolveReport, SolveStatus,
    TRACE_CSV_HEADER,
};
pub use hypotheses::{validate_hypotheses, HypothesisCheck, HypothesisStatus, ValidationReport};
pub use ipg::{incremental_pass, ipg_step, solve, solve_with, SolveOptions, SolverState};
pub use stopping::{stopping_check, Checkpoint, StopMode, StoppingRule};

use crate::error::{check_dim, contract, Result};
use crate::functions::{ProxMap, SmoothFn};
use crate::linalg::Vector;

/// Per-iteration scalar computed from the iterate, e.g. ISNR.
pub type Metric = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;

/// One component `Fᵢ = fᵢ + hᵢ`.
#[derive(Clone)]
pub struct ObjectiveTerm {
    pub nonsmooth: Arc<dyn ProxMap>,
    pub smooth: Arc<dyn SmoothFn>,
}

impl ObjectiveTerm {
    pub fn new(nonsmooth: Arc<dyn ProxMap>, smooth: Arc<dyn SmoothFn>) -> Result<Self> {
        let l = smooth.lipschitz();
        if !(l >= 0.0 && l.is_finite()) {
            return Err(contract(format!("Lipschitz constant must be >= 0, got {l}")));
        }
        Ok(Self { nonsmooth, smooth })
    }

    pub fn lipschitz(&self) -> f64 {
        self.smooth.lipschitz()
    }

    pub fn value(&self, x: &Vector) -> f64 {
        self.nonsmooth.value(x) + self.smooth.value(x)
    }
}

/// The constraint function `g`.
#[derive(Clone)]
pub struct PenaltyFunction {
    func: Arc<dyn SmoothFn>,
    min_value: f64,
    growth_constant: Option<f64>,
}

impl PenaltyFunction {
    /// Requires `∇g` to have a positive Lipschitz constant.
    pub fn new(func: Arc<dyn SmoothFn>, min_value: f64) -> Result<Self> {
        let l = func.lipschitz();
        if !(l > 0.0 && l.is_finite()) {
            return Err(contract(format!("penalty Lipschitz constant must be > 0, got {l}")));
        }
        Ok(Self {
            func,
            min_value,
            growth_constant: None,
        })
    }

    /// Declares `g ≥ (a/2) dist²(·, argmin g)`.
    pub fn with_growth_constant(mut self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(contract(format!("growth constant must be > 0, got {a}")));
        }
        self.growth_constant = Some(a);
        Ok(self)
    }

    pub fn lipschitz(&self) -> f64 {
        self.func.lipschitz()
    }

    pub fn min_value(&self) -> f64 {
        self.min_value
    }

    pub fn growth_constant(&self) -> Option<f64> {
        self.growth_constant
    }

    pub fn value(&self, x: &Vector) -> f64 {
        self.func.value(x)
    }

    /// `g(x) - min g`
    pub fn excess(&self, x: &Vector) -> f64 {
        self.func.value(x) - self.min_value
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        self.func.gradient(x)
    }

    pub fn function(&self) -> &Arc<dyn SmoothFn> {
        &self.func
    }
}

/// `αₖ = a/k`, `βₖ = b·scale·k`, counted from `k = 1`.
///
/// `scale` is 1 for the plain family; the Heron experiments use
/// `scale = 1/‖A‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule {
    a: f64,
    b: f64,
    scale: f64,
}

impl StepSchedule {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        Self::scaled(a, b, 1.0)
    }

    pub fn scaled(a: f64, b: f64, scale: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("scale", scale)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(contract(format!("schedule parameter {name} must be > 0, got {v}")));
            }
        }
        Ok(Self { a, b, scale })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn alpha(&self, k: usize) -> f64 {
        self.a / k as f64
    }

    pub fn beta(&self, k: usize) -> f64 {
        self.b * self.scale * k as f64
    }

    /// `αₖβₖ`, constant in `k`.
    pub fn penalty_weight(&self) -> f64 {
        self.a * self.b * self.scale
    }
}

/// Terms, penalty, starting point and (when known) the solution.
#[derive(Clone)]
pub struct ProblemInstance {
    pub terms: Vec<ObjectiveTerm>,
    pub penalty: PenaltyFunction,
    pub start: Vector,
    pub oracle: Option<Vector>,
}

impl ProblemInstance {
    pub fn new(terms: Vec<ObjectiveTerm>, penalty: PenaltyFunction, start: Vector) -> Result<Self> {
        if terms.is_empty() {
            return Err(contract("problem needs at least one objective term"));
        }
        Ok(Self {
            terms,
            penalty,
            start,
            oracle: None,
        })
    }

    pub fn with_oracle(mut self, oracle: Vector) -> Result<Self> {
        check_dim(self.dim(), oracle.len())?;
        self.oracle = Some(oracle);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.start.len()
    }

    /// `Σᵢ Fᵢ(x)`
    pub fn objective(&self, x: &Vector) -> f64 {
        self.terms.iter().map(|t| t.value(x)).sum()
    }
}
