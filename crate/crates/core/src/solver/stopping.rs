use crate::error::{contract, Result};
use crate::linalg::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopMode {
    /// Stop once the largest of the three relative changes (iterate,
    /// objective, penalty) is at most `eps`.
    RelativeChange,
    /// Run exactly `max_iters` iterations.
    FixedIterations,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    pub eps: f64,
    pub max_iters: usize,
    pub mode: StopMode,
}

impl StoppingRule {
    pub fn relative_change(eps: f64, max_iters: usize) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(contract(format!("tolerance must be > 0, got {eps}")));
        }
        Ok(Self {
            eps,
            max_iters,
            mode: StopMode::RelativeChange,
        })
    }

    pub fn fixed_iterations(iters: usize) -> Self {
        Self {
            eps: f64::MIN_POSITIVE,
            max_iters: iters,
            mode: StopMode::FixedIterations,
        }
    }
}

/// Iterate with its objective value (`F`, or `A` in the inpainting
/// formulation) and raw penalty value (`g`, or `B`).
#[derive(Debug, Clone, Copy)]
pub struct Checkpoint<'a> {
    pub x: &'a Vector,
    pub objective: f64,
    pub penalty: f64,
}

impl Checkpoint<'_> {
    /// The three relative changes from `self` to `next`.
    pub fn relative_changes(&self, next: &Checkpoint<'_>) -> [f64; 3] {
        [
            next.x.dist(self.x) / (self.x.norm() + 1.0),
            (next.objective - self.objective).abs() / (self.objective.abs() + 1.0),
            (next.penalty - self.penalty).abs() / (self.penalty.abs() + 1.0),
        ]
    }
}

/// True iff the maximum relative change between consecutive checkpoints is
/// at most `eps`. Always false in fixed-iteration mode.
pub fn stopping_check(prev: &Checkpoint<'_>, next: &Checkpoint<'_>, stop: &StoppingRule) -> bool {
    match stop.mode {
        StopMode::FixedIterations => false,
        StopMode::RelativeChange => {
            let worst = prev
                .relative_changes(next)
                .into_iter()
                .fold(0.0, f64::max);
            worst <= stop.eps
        }
    }
}
