use std::fmt::Write as _;
use std::io::Write;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::linalg::Vector;

pub const TRACE_CSV_HEADER: &str = "k,g,grad_g_norm,inner_disp_sq,obj_F,dist_to_oracle,elapsed_s";

/// Quantities evaluated once per outer iteration at the iterate `x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterRecord {
    pub k: usize,
    /// `g(x_k) - min g`
    pub penalty: f64,
    pub grad_penalty_norm: Option<f64>,
    /// `Σᵢ ‖φ_{i+1,k} - φ_{i,k}‖²` for the step leaving `x_k`; absent for
    /// the final iterate.
    pub inner_disp_sq: Option<f64>,
    pub objective: f64,
    pub dist_to_oracle: Option<f64>,
    /// Optional caller metric such as ISNR.
    pub metric: Option<f64>,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    FixedIterationsCompleted,
    MaxIterationsReached,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub method: String,
    pub x: Vector,
    /// Outer iterations performed.
    pub iterations: usize,
    pub status: SolveStatus,
    pub elapsed: Duration,
    /// One record per iterate `x_1, …, x_{K+1}`.
    pub trace: Vec<IterRecord>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn completed(&self) -> bool {
        self.status != SolveStatus::MaxIterationsReached
    }

    pub fn final_record(&self) -> Option<&IterRecord> {
        self.trace.last()
    }

    /// Trace as CSV with [`TRACE_CSV_HEADER`]. Optional columns are left
    /// blank when absent.
    pub fn trace_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.trace.len() + 1));
        out.push_str(TRACE_CSV_HEADER);
        out.push('\n');
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for r in &self.trace {
            let _ = writeln!(
                out,
                "{},{:e},{},{},{:e},{},{:.4}",
                r.k,
                r.penalty,
                opt(r.grad_penalty_norm),
                opt(r.inner_disp_sq),
                r.objective,
                opt(r.dist_to_oracle),
                r.elapsed_s
            );
        }
        out
    }

    pub fn write_trace_csv(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.trace_csv().as_bytes())?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FejerTolerances {
    /// Bound on the slack summed over the last half of the trace.
    pub tail_slack: f64,
    pub penalty: f64,
    pub grad_penalty: f64,
    pub inner_disp: f64,
}

impl Default for FejerTolerances {
    fn default() -> Self {
        Self {
            tail_slack: 1e-6,
            penalty: 1e-8,
            grad_penalty: 1e-4,
            inner_disp: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FejerReport {
    /// `δ_k = max(0, ‖x_{k+1} - u*‖² - ‖x_k - u*‖²)`
    pub slacks: Vec<f64>,
    pub slack_sum: f64,
    pub tail_slack_sum: f64,
    pub tail_ok: bool,
    pub final_penalty: f64,
    pub penalty_ok: bool,
    pub final_grad_penalty: Option<f64>,
    pub grad_ok: bool,
    pub final_inner_disp: Option<f64>,
    pub inner_disp_ok: bool,
}

impl FejerReport {
    pub fn passed(&self) -> bool {
        self.tail_ok && self.penalty_ok && self.grad_ok && self.inner_disp_ok
    }
}

pub const MIN_FEJER_RECORDS: usize = 10;

/// Checks the trace against quasi-Fejér monotonicity relative to the oracle
/// point recorded in `dist_to_oracle`, and whether the penalty, its
/// gradient and the inner displacement have dropped below tolerance by the
/// end of the run.
pub fn quasi_fejer_check(trace: &[IterRecord], tol: &FejerTolerances) -> Result<FejerReport> {
    if trace.len() < MIN_FEJER_RECORDS {
        return Err(Error::InsufficientData {
            needed: MIN_FEJER_RECORDS,
            got: trace.len(),
        });
    }
    let dists = trace
        .iter()
        .map(|r| r.dist_to_oracle)
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| Error::Contract("trace has no oracle distances".into()))?;
    let slacks: Vec<f64> = dists
        .windows(2)
        .map(|w| (w[1] * w[1] - w[0] * w[0]).max(0.0))
        .collect();
    let slack_sum = slacks.iter().sum();
    let tail_slack_sum: f64 = slacks[slacks.len() / 2..].iter().sum();

    let last = trace.last().expect("non-empty");
    let final_grad_penalty = last.grad_penalty_norm;
    let final_inner_disp = trace.iter().rev().find_map(|r| r.inner_disp_sq);

    Ok(FejerReport {
        tail_ok: tail_slack_sum < tol.tail_slack,
        penalty_ok: last.penalty < tol.penalty,
        grad_ok: final_grad_penalty.is_some_and(|g| g < tol.grad_penalty),
        inner_disp_ok: final_inner_disp.is_some_and(|d| d < tol.inner_disp),
        slacks,
        slack_sum,
        tail_slack_sum,
        final_penalty: last.penalty,
        final_grad_penalty,
        final_inner_disp,
    })
}
