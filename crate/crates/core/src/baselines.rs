//! Proximal gradient (PGM) and FISTA for the unconstrained composite problem
//! `minimize f(x) + h(x)`.

use std::sync::Arc;
use std::time::Instant;

use crate::error::{contract, Error, Result};
use crate::functions::{ProxMap, SmoothFn};
use crate::linalg::Vector;
use crate::solver::{
    stopping_check, Checkpoint, IterRecord, Metric, SolveReport, SolveStatus, StopMode,
    StoppingRule,
};

/// `f + h` with `f` accessed by prox and `∇h` Lipschitz with constant
/// `lipschitz`.
///
/// `reported_penalty` optionally names the part of `h` reported as the
/// penalty value (the data-fit term `½‖Bx - b‖²` in inpainting); the
/// objective column then holds `f + h` minus that part.
#[derive(Clone)]
pub struct CompositeProblem {
    pub nonsmooth: Arc<dyn ProxMap>,
    pub smooth: Arc<dyn SmoothFn>,
    pub reported_penalty: Option<Arc<dyn SmoothFn>>,
    lipschitz: f64,
}

impl CompositeProblem {
    pub fn new(nonsmooth: Arc<dyn ProxMap>, smooth: Arc<dyn SmoothFn>) -> Result<Self> {
        let l = smooth.lipschitz();
        Self::with_lipschitz(nonsmooth, smooth, l)
    }

    /// Overrides the Lipschitz constant, e.g. a tiny positive value for
    /// `h ≡ 0`.
    pub fn with_lipschitz(nonsmooth: Arc<dyn ProxMap>, smooth: Arc<dyn SmoothFn>, lipschitz: f64) -> Result<Self> {
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(contract(format!("L_h must be > 0, got {lipschitz}")));
        }
        Ok(Self {
            nonsmooth,
            smooth,
            reported_penalty: None,
            lipschitz,
        })
    }

    pub fn with_reported_penalty(mut self, part: Arc<dyn SmoothFn>) -> Self {
        self.reported_penalty = Some(part);
        self
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn value(&self, x: &Vector) -> f64 {
        self.nonsmooth.value(x) + self.smooth.value(x)
    }

    fn split_values(&self, x: &Vector) -> (f64, f64) {
        let total = self.value(x);
        match &self.reported_penalty {
            Some(p) => {
                let b = p.value(x);
                (total - b, b)
            }
            None => (total, 0.0),
        }
    }
}

/// `prox_{γf}(x - γ∇h(x))`, requiring `0 < γ < 2/L_h`.
pub fn pgm_step(x: &Vector, p: &CompositeProblem, gamma: f64) -> Result<Vector> {
    if !(gamma > 0.0 && gamma < 2.0 / p.lipschitz) {
        return Err(contract(format!(
            "PGM step {gamma} outside (0, 2/L_h) = (0, {})",
            2.0 / p.lipschitz
        )));
    }
    pgm_step_unchecked(x, p, gamma)
}

pub fn pgm_step_unchecked(x: &Vector, p: &CompositeProblem, gamma: f64) -> Result<Vector> {
    let fwd = x.add_scaled(-gamma, &p.smooth.gradient(x));
    p.nonsmooth.prox(&fwd, gamma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FistaState {
    pub x: Vector,
    pub y: Vector,
    pub t: f64,
}

impl FistaState {
    pub fn start(x: Vector) -> Self {
        Self {
            y: x.clone(),
            x,
            t: 1.0,
        }
    }
}

/// `t' = (1 + √(1 + 4t²))/2`
pub fn fista_momentum(t: f64) -> f64 {
    0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt())
}

/// One FISTA step with fixed step `1/L_h`:
///
/// ```text
/// x' = prox_{f/L}(y - ∇h(y)/L)
/// t' = (1 + √(1 + 4t²))/2
/// y' = x' + ((t - 1)/t')(x' - x)
/// ```
pub fn fista_step(state: &FistaState, p: &CompositeProblem) -> Result<FistaState> {
    if !(state.t >= 1.0) {
        return Err(contract(format!("FISTA momentum must be >= 1, got {}", state.t)));
    }
    let step = 1.0 / p.lipschitz;
    let fwd = state.y.add_scaled(-step, &p.smooth.gradient(&state.y));
    let x = p.nonsmooth.prox(&fwd, step)?;
    let t = fista_momentum(state.t);
    let y = x.add_scaled((state.t - 1.0) / t, &x.sub(&state.x));
    Ok(FistaState { x, y, t })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineMethod {
    Pgm { gamma: f64, allow_out_of_range: bool },
    Fista,
}

impl BaselineMethod {
    /// PGM with the default step `1.9/L_h`.
    pub fn pgm_default(p: &CompositeProblem) -> Self {
        Self::Pgm {
            gamma: 1.9 / p.lipschitz,
            allow_out_of_range: false,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Pgm { .. } => "pgm",
            Self::Fista => "fista",
        }
    }
}

/// Runs PGM or FISTA from `start`; returns the same report shape as the
/// penalty solver.
pub fn run_baseline(
    p: &CompositeProblem,
    method: BaselineMethod,
    start: &Vector,
    stop: &StoppingRule,
    metric: Option<&Metric>,
) -> Result<SolveReport> {
    if let BaselineMethod::Pgm {
        gamma,
        allow_out_of_range: false,
    } = method
    {
        // validates the range once up front
        pgm_step(start, p, gamma)?;
    }
    let clock = Instant::now();
    let record = |k: usize, x: &Vector, obj: f64, pen: f64| IterRecord {
        k,
        penalty: pen,
        grad_penalty_norm: p.reported_penalty.as_ref().map(|g| g.gradient(x).norm()),
        inner_disp_sq: None,
        objective: obj,
        dist_to_oracle: None,
        metric: metric.map(|m| m(x)),
        elapsed_s: clock.elapsed().as_secs_f64(),
    };

    let mut fista = FistaState::start(start.clone());
    let mut trace = Vec::new();
    let (mut obj, mut pen) = p.split_values(start);
    trace.push(record(1, start, obj, pen));
    let mut status = match stop.mode {
        StopMode::FixedIterations => SolveStatus::FixedIterationsCompleted,
        StopMode::RelativeChange => SolveStatus::MaxIterationsReached,
    };
    let mut iterations = 0;

    for k in 1..=stop.max_iters {
        let next = match method {
            BaselineMethod::Pgm { gamma, .. } => {
                let x = pgm_step_unchecked(&fista.x, p, gamma)?;
                FistaState {
                    y: x.clone(),
                    x,
                    t: 1.0,
                }
            }
            BaselineMethod::Fista => fista_step(&fista, p)?,
        };
        if !next.x.is_finite() || !next.y.is_finite() {
            return Err(Error::Divergence { k, component: 0 });
        }
        iterations = k;
        let (nobj, npen) = p.split_values(&next.x);
        let done = stopping_check(
            &Checkpoint {
                x: &fista.x,
                objective: obj,
                penalty: pen,
            },
            &Checkpoint {
                x: &next.x,
                objective: nobj,
                penalty: npen,
            },
            stop,
        );
        fista = next;
        obj = nobj;
        pen = npen;
        trace.push(record(k + 1, &fista.x, obj, pen));
        if done {
            status = SolveStatus::Converged;
            break;
        }
    }

    Ok(SolveReport {
        method: method.name().into(),
        x: fista.x,
        iterations,
        status,
        elapsed: clock.elapsed(),
        trace,
    })
}
