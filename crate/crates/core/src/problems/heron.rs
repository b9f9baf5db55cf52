use std::sync::Arc;

use crate::error::{contract, Result};
use crate::functions::{DistanceToBall, LeastSquares, ScaledSqNorm, SmoothFn};
use crate::linalg::{
    operator_norm, solve_spd, symmetric_eigenvalues, DenseMatrix, Vector, DEFAULT_SPECTRAL_MAX_ITER,
    DEFAULT_SPECTRAL_TOL, RANK_THRESHOLD,
};
use crate::manifest::Manifest;
use crate::prox::BallSet;
use crate::rng::SeededRng;
use crate::solver::{ObjectiveTerm, PenaltyFunction, ProblemInstance, StepSchedule};

pub const HERON_BALL_RADIUS: f64 = 0.2;
/// The least-squares oracle is attached only when `cond(AᵀA)` is below this.
pub const ORACLE_MAX_CONDITION: f64 = 1e12;

/// Generalized Heron problem over a least-squares solution set:
///
/// ```text
/// minimize   Σᵢ dist(x, Cᵢ) + ½‖x‖²
/// subject to x ∈ argmin ½‖Ax - b‖²
/// ```
///
/// with `m` balls `Cᵢ ⊂ ℝⁿ` and `A ∈ ℝ^{m²×n}`.
#[derive(Debug, Clone)]
pub struct HeronInstance {
    pub m: usize,
    pub n: usize,
    pub consistent: bool,
    pub seed: u64,
    pub balls: Vec<BallSet>,
    pub matrix: DenseMatrix,
    pub rhs: Vector,
    pub start: Vector,
    /// Power-iteration estimate of `‖A‖`.
    pub norm_a: f64,
    /// Eigenvalues of `AᵀA`, ascending.
    pub gram_eigenvalues: Vec<f64>,
    /// Least-squares solution; `None` when `AᵀA` is too ill-conditioned.
    pub oracle: Option<Vector>,
}

/// Draws, in this order and all from `(-n², n²)` unless noted: the `m` ball
/// centers, the entries of `A` row by row, `b ∈ (0, 1)^{m²}` when
/// inconsistent, and the starting point.
pub fn build_heron(m: usize, n: usize, consistent: bool, seed: u64) -> Result<HeronInstance> {
    if m == 0 || n == 0 {
        return Err(contract(format!("Heron needs m, n >= 1, got m = {m}, n = {n}")));
    }
    let rows = m * m;
    let span = (n * n) as f64;
    let mut rng = SeededRng::new(seed);

    let balls = (0..m)
        .map(|_| BallSet::new(Vector::from_vec_unchecked(rng.uniform_vec(n, -span, span)), HERON_BALL_RADIUS))
        .collect::<Result<Vec<_>>>()?;
    let matrix = DenseMatrix::new(rows, n, rng.uniform_vec(rows * n, -span, span))?;
    let rhs = if consistent {
        Vector::zeros(rows)
    } else {
        Vector::from_vec_unchecked(rng.uniform_vec(rows, 0.0, 1.0))
    };
    let start = Vector::from_vec_unchecked(rng.uniform_vec(n, -span, span));

    let norm_a = operator_norm(&matrix, DEFAULT_SPECTRAL_TOL, DEFAULT_SPECTRAL_MAX_ITER)?;
    let gram = matrix.gram();
    let gram_eigenvalues = symmetric_eigenvalues(&gram, DEFAULT_SPECTRAL_TOL)?;
    let largest = *gram_eigenvalues.last().expect("n >= 1");
    let smallest = gram_eigenvalues[0];
    let oracle = if smallest > RANK_THRESHOLD * largest && largest / smallest < ORACLE_MAX_CONDITION {
        let atb = matrix.apply_transpose(&rhs)?;
        Some(solve_spd(&gram, &atb)?)
    } else {
        log::warn!("Heron seed {seed}: AᵀA is singular or ill-conditioned, oracle omitted");
        None
    };

    Ok(HeronInstance {
        m,
        n,
        consistent,
        seed,
        balls,
        matrix,
        rhs,
        start,
        norm_a,
        gram_eigenvalues,
        oracle,
    })
}

impl HeronInstance {
    pub fn oracle_omitted(&self) -> bool {
        self.oracle.is_none()
    }

    pub fn least_squares(&self) -> LeastSquares {
        LeastSquares::new(self.matrix.clone(), self.rhs.clone(), self.norm_a * self.norm_a)
            .expect("shapes agree by construction")
    }

    /// `½‖Ax - b‖²`
    pub fn penalty_value(&self, x: &Vector) -> f64 {
        self.least_squares().value(x)
    }

    /// `Aᵀ(Ax - b)`
    pub fn penalty_gradient(&self, x: &Vector) -> Vector {
        self.least_squares().gradient(x)
    }

    /// `min g`, i.e. `g(x_ls)`; 0 without an oracle.
    pub fn penalty_min(&self) -> f64 {
        match &self.oracle {
            Some(x) if !self.consistent => self.penalty_value(x),
            _ => 0.0,
        }
    }

    /// `fᵢ = dist(·, Cᵢ)`, `hᵢ = ‖·‖²/(2m)`, `g = ½‖A· - b‖²` with
    /// `L_g = ‖A‖²`. With full column rank the solution set is `{x_ls}`, so
    /// the oracle is attached as the bilevel solution and the growth
    /// constant is `λ_min(AᵀA)`.
    pub fn problem(&self) -> Result<ProblemInstance> {
        let smooth = Arc::new(ScaledSqNorm {
            weight: 1.0 / self.m as f64,
        });
        let terms = self
            .balls
            .iter()
            .map(|b| ObjectiveTerm::new(Arc::new(DistanceToBall { ball: b.clone() }), smooth.clone()))
            .collect::<Result<Vec<_>>>()?;
        let mut penalty = PenaltyFunction::new(Arc::new(self.least_squares()), self.penalty_min())?;
        if self.oracle.is_some() {
            penalty = penalty.with_growth_constant(self.gram_eigenvalues[0])?;
        }
        let p = ProblemInstance::new(terms, penalty, self.start.clone())?;
        match &self.oracle {
            Some(x) => p.with_oracle(x.clone()),
            None => Ok(p),
        }
    }

    /// `αₖ = a/k`, `βₖ = bk/‖A‖²`.
    pub fn schedule(&self, a: f64, b: f64) -> Result<StepSchedule> {
        StepSchedule::scaled(a, b, 1.0 / (self.norm_a * self.norm_a))
    }

    pub fn manifest(&self) -> Manifest {
        let mut m = Manifest::new();
        m.set("experiment", "heron")
            .set("m", self.m)
            .set("n", self.n)
            .set("consistent", self.consistent)
            .set("seed", self.seed)
            .set("radius", HERON_BALL_RADIUS)
            .set("norm_a", self.norm_a);
        m
    }
}
