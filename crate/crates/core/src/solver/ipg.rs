use std::time::Instant;

use super::diagnostics::{IterRecord, SolveReport, SolveStatus};
use super::stopping::{stopping_check, Checkpoint, StopMode, StoppingRule};
use super::{validate_hypotheses, Metric, ObjectiveTerm, ProblemInstance, StepSchedule};
use crate::error::{Error, Result};
use crate::linalg::Vector;

#[derive(Debug, Clone, Copy)]
struct PointValues {
    objective: f64,
    penalty: f64,
}

fn point_values(problem: &ProblemInstance, x: &Vector) -> PointValues {
    PointValues {
        objective: problem.objective(x),
        penalty: problem.penalty.value(x),
    }
}

/// Iterate, counter and diagnostics of a running solve.
#[derive(Debug, Clone)]
pub struct SolverState {
    k: usize,
    x: Vector,
    values: Option<PointValues>,
    trace: Vec<IterRecord>,
    clock: Instant,
}

impl SolverState {
    /// Starts at `k = 1`.
    pub fn new(start: Vector) -> Self {
        Self {
            k: 1,
            x: start,
            values: None,
            trace: Vec::new(),
            clock: Instant::now(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn x(&self) -> &Vector {
        &self.x
    }

    pub fn trace(&self) -> &[IterRecord] {
        &self.trace
    }

    fn values(&mut self, problem: &ProblemInstance) -> PointValues {
        *self.values.get_or_insert_with(|| point_values(problem, &self.x))
    }

    fn record(
        &self,
        problem: &ProblemInstance,
        values: PointValues,
        grad_norm: f64,
        inner_disp_sq: Option<f64>,
        metric: Option<&Metric>,
    ) -> IterRecord {
        IterRecord {
            k: self.k,
            penalty: values.penalty - problem.penalty.min_value(),
            grad_penalty_norm: Some(grad_norm),
            inner_disp_sq,
            objective: values.objective,
            dist_to_oracle: problem.oracle.as_ref().map(|u| self.x.dist(u)),
            metric: metric.map(|m| m(&self.x)),
            elapsed_s: self.clock.elapsed().as_secs_f64(),
        }
    }
}

/// One outer iteration:
///
/// ```text
/// φ₁     = x_k - αₖβₖ ∇g(x_k)
/// φᵢ₊₁   = prox_{αₖ fᵢ}(φᵢ - αₖ ∇hᵢ(φᵢ)),   i = 1..m
/// x_{k+1} = φ_{m+1}
/// ```
///
/// Appends the record for `x_k` and advances `k`. A non-finite
/// intermediate point yields [`Error::Divergence`] with component 0 for the
/// penalty step and `i` for the `i`-th term.
pub fn ipg_step(state: &mut SolverState, problem: &ProblemInstance, sched: &StepSchedule) -> Result<()> {
    step_impl(state, problem, sched, None)
}

fn step_impl(
    state: &mut SolverState,
    problem: &ProblemInstance,
    sched: &StepSchedule,
    metric: Option<&Metric>,
) -> Result<()> {
    let k = state.k;
    let alpha = sched.alpha(k);
    let weight = alpha * sched.beta(k);
    let diverged = |component| Error::Divergence { k, component };

    let values = state.values(problem);
    let grad_g = problem.penalty.gradient(&state.x);
    let mut phi = state.x.add_scaled(-weight, &grad_g);
    if !phi.is_finite() {
        return Err(diverged(0));
    }

    let mut disp = 0.0;
    for (i, term) in problem.terms.iter().enumerate() {
        let forward = phi.add_scaled(-alpha, &term.smooth.gradient(&phi));
        if !forward.is_finite() {
            return Err(diverged(i + 1));
        }
        let next = term.nonsmooth.prox(&forward, alpha)?;
        if !next.is_finite() {
            return Err(diverged(i + 1));
        }
        disp += next.dist_sq(&phi);
        phi = next;
    }

    let rec = state.record(problem, values, grad_g.norm(), Some(disp), metric);
    state.trace.push(rec);
    state.x = phi;
    state.values = None;
    state.k += 1;
    Ok(())
}

/// Penalty-free incremental proximal gradient pass: `φ₁ = x`, then the same
/// component loop as [`ipg_step`].
pub fn incremental_pass(x: &Vector, terms: &[ObjectiveTerm], alpha: f64) -> Result<Vector> {
    terms.iter().try_fold(x.clone(), |phi, term| {
        let grad = term.smooth.gradient(&phi);
        term.nonsmooth.prox(&phi.add_scaled(-alpha, &grad), alpha)
    })
}

#[derive(Clone, Default)]
pub struct SolveOptions {
    /// Run even when a step-size hypothesis fails.
    pub allow_hypothesis_violation: bool,
    /// Evaluated at every iterate and stored in the trace.
    pub metric: Option<Metric>,
}

/// Runs [`ipg_step`] until the stopping rule fires or `max_iters` outer
/// iterations have been taken.
pub fn solve(problem: &ProblemInstance, sched: &StepSchedule, stop: &StoppingRule) -> Result<SolveReport> {
    solve_with(problem, sched, stop, &SolveOptions::default())
}

pub fn solve_with(
    problem: &ProblemInstance,
    sched: &StepSchedule,
    stop: &StoppingRule,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let validation = validate_hypotheses(sched, &problem.penalty);
    if !validation.passed() && !opts.allow_hypothesis_violation {
        return Err(Error::Hypotheses(validation.to_string()));
    }

    let mut state = SolverState::new(problem.start.clone());
    let metric = opts.metric.as_ref();
    let mut status = match stop.mode {
        StopMode::FixedIterations => SolveStatus::FixedIterationsCompleted,
        StopMode::RelativeChange => SolveStatus::MaxIterationsReached,
    };

    for _ in 0..stop.max_iters {
        let prev_x = state.x.clone();
        let prev = state.values(problem);
        step_impl(&mut state, problem, sched, metric)?;
        let next = state.values(problem);
        let done = stopping_check(
            &Checkpoint {
                x: &prev_x,
                objective: prev.objective,
                penalty: prev.penalty,
            },
            &Checkpoint {
                x: &state.x,
                objective: next.objective,
                penalty: next.penalty,
            },
            stop,
        );
        if done {
            status = SolveStatus::Converged;
            break;
        }
    }

    let values = state.values(problem);
    let grad_norm = problem.penalty.gradient(&state.x).norm();
    let last = state.record(problem, values, grad_norm, None, metric);
    state.trace.push(last);

    Ok(SolveReport {
        method: "ipg".into(),
        iterations: state.k - 1,
        status,
        elapsed: state.clock.elapsed(),
        x: state.x,
        trace: state.trace,
    })
}
