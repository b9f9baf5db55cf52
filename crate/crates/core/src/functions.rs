//! Function objects: nonsmooth terms exposed through their prox, smooth
//! terms exposed through value, gradient and a Lipschitz constant.

use std::sync::Arc;

use crate::error::{check_dim, contract, Result};
use crate::linalg::{DenseMatrix, DiagonalMask, Vector};
use crate::prox::{
    prox_dist_ball, prox_l1_orthogonal, prox_scaled_sq_norm, soft_threshold, BallSet,
    OrthogonalTransform,
};

/// A convex function accessed through its proximal map.
pub trait ProxMap: Send + Sync {
    /// `prox_{step f}(x)`
    fn prox(&self, x: &Vector, step: f64) -> Result<Vector>;
    fn value(&self, x: &Vector) -> f64;
}

/// A convex differentiable function with Lipschitz gradient.
pub trait SmoothFn: Send + Sync {
    fn value(&self, x: &Vector) -> f64;
    fn gradient(&self, x: &Vector) -> Vector;
    fn lipschitz(&self) -> f64;
}

/// `f ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl ProxMap for Zero {
    fn prox(&self, x: &Vector, _step: f64) -> Result<Vector> {
        Ok(x.clone())
    }

    fn value(&self, _x: &Vector) -> f64 {
        0.0
    }
}

impl SmoothFn for Zero {
    fn value(&self, _x: &Vector) -> f64 {
        0.0
    }

    fn gradient(&self, x: &Vector) -> Vector {
        Vector::zeros(x.len())
    }

    fn lipschitz(&self) -> f64 {
        0.0
    }
}

/// `weight ‖x‖₁`.
#[derive(Debug, Clone, Copy)]
pub struct L1Norm {
    pub weight: f64,
}

impl ProxMap for L1Norm {
    fn prox(&self, x: &Vector, step: f64) -> Result<Vector> {
        soft_threshold(x, step * self.weight)
    }

    fn value(&self, x: &Vector) -> f64 {
        self.weight * x.norm_l1()
    }
}

/// `weight ‖W x‖₁` for an orthogonal `W`.
#[derive(Clone)]
pub struct TransformedL1 {
    transform: Arc<dyn OrthogonalTransform>,
    weight: f64,
}

impl TransformedL1 {
    pub fn new(transform: Arc<dyn OrthogonalTransform>, weight: f64) -> Result<Self> {
        if !(weight >= 0.0) {
            return Err(contract("l1 weight must be nonnegative"));
        }
        Ok(Self { transform, weight })
    }

    pub fn transform(&self) -> &Arc<dyn OrthogonalTransform> {
        &self.transform
    }
}

impl ProxMap for TransformedL1 {
    fn prox(&self, x: &Vector, step: f64) -> Result<Vector> {
        prox_l1_orthogonal(x, step * self.weight, self.transform.as_ref())
    }

    fn value(&self, x: &Vector) -> f64 {
        self.transform
            .forward(x)
            .map(|c| self.weight * c.norm_l1())
            .unwrap_or(f64::NAN)
    }
}

/// `weight ‖W x‖₁ + (sq_weight / 2)‖x‖²`; its prox is still closed form
/// because `W` is orthogonal.
#[derive(Clone)]
pub struct ElasticTransformedL1 {
    l1: TransformedL1,
    sq_weight: f64,
}

impl ElasticTransformedL1 {
    pub fn new(l1: TransformedL1, sq_weight: f64) -> Self {
        Self { l1, sq_weight }
    }
}

impl ProxMap for ElasticTransformedL1 {
    fn prox(&self, x: &Vector, step: f64) -> Result<Vector> {
        let s = 1.0 + step * self.sq_weight;
        self.l1.prox(&x.scaled(1.0 / s), step / s)
    }

    fn value(&self, x: &Vector) -> f64 {
        self.l1.value(x) + 0.5 * self.sq_weight * x.norm_sq()
    }
}

/// `dist(x, C)` for a ball `C`.
#[derive(Debug, Clone)]
pub struct DistanceToBall {
    pub ball: BallSet,
}

impl ProxMap for DistanceToBall {
    fn prox(&self, x: &Vector, step: f64) -> Result<Vector> {
        prox_dist_ball(x, step, &self.ball)
    }

    fn value(&self, x: &Vector) -> f64 {
        self.ball.distance(x).unwrap_or(f64::NAN)
    }
}

/// `(weight / 2)‖x‖²`, usable as a smooth term or through its prox.
#[derive(Debug, Clone, Copy)]
pub struct ScaledSqNorm {
    pub weight: f64,
}

impl ProxMap for ScaledSqNorm {
    fn prox(&self, x: &Vector, step: f64) -> Result<Vector> {
        prox_scaled_sq_norm(x, step, self.weight)
    }

    fn value(&self, x: &Vector) -> f64 {
        0.5 * self.weight * x.norm_sq()
    }
}

impl SmoothFn for ScaledSqNorm {
    fn value(&self, x: &Vector) -> f64 {
        0.5 * self.weight * x.norm_sq()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        x.scaled(self.weight)
    }

    fn lipschitz(&self) -> f64 {
        self.weight
    }
}

/// `½‖x - c‖²`.
#[derive(Debug, Clone)]
pub struct SquaredDistance {
    pub center: Vector,
}

impl SmoothFn for SquaredDistance {
    fn value(&self, x: &Vector) -> f64 {
        0.5 * x.dist_sq(&self.center)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        x.sub(&self.center)
    }

    fn lipschitz(&self) -> f64 {
        1.0
    }
}

/// `½‖A x - b‖²` with `∇ = Aᵀ(Ax - b)`; the Lipschitz constant is supplied
/// by the caller (normally `‖A‖²`).
#[derive(Debug, Clone)]
pub struct LeastSquares {
    matrix: DenseMatrix,
    rhs: Vector,
    lipschitz: f64,
}

impl LeastSquares {
    pub fn new(matrix: DenseMatrix, rhs: Vector, lipschitz: f64) -> Result<Self> {
        check_dim(matrix.rows(), rhs.len())?;
        Ok(Self {
            matrix,
            rhs,
            lipschitz,
        })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &Vector {
        &self.rhs
    }

    fn residual(&self, x: &Vector) -> Vector {
        self.matrix.apply_unchecked(x).sub(&self.rhs)
    }
}

impl SmoothFn for LeastSquares {
    fn value(&self, x: &Vector) -> f64 {
        0.5 * self.residual(x).norm_sq()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        self.matrix.apply_transpose_unchecked(&self.residual(x))
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// `½‖B x - b‖²` for a 0/1 diagonal `B` and an observation with `B b = b`,
/// so `∇ = B x - b` and the Lipschitz constant is 1.
#[derive(Debug, Clone)]
pub struct MaskedLeastSquares {
    mask: DiagonalMask,
    observed: Vector,
}

impl MaskedLeastSquares {
    pub fn new(mask: DiagonalMask, observed: Vector) -> Result<Self> {
        check_dim(mask.len(), observed.len())?;
        if mask.apply_unchecked(&observed) != observed {
            return Err(contract("observation must vanish on masked entries"));
        }
        if mask.kept_count() == 0 {
            return Err(contract("mask keeps no entries"));
        }
        Ok(Self { mask, observed })
    }

    pub fn mask(&self) -> &DiagonalMask {
        &self.mask
    }

    pub fn observed(&self) -> &Vector {
        &self.observed
    }
}

impl SmoothFn for MaskedLeastSquares {
    fn value(&self, x: &Vector) -> f64 {
        0.5 * self.gradient(x).norm_sq()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        self.mask.apply_unchecked(x).sub(&self.observed)
    }

    fn lipschitz(&self) -> f64 {
        1.0
    }
}

/// Sum of smooth terms; the Lipschitz constant is the sum of the parts'.
#[derive(Clone)]
pub struct SmoothSum(pub Vec<Arc<dyn SmoothFn>>);

impl SmoothFn for SmoothSum {
    fn value(&self, x: &Vector) -> f64 {
        self.0.iter().map(|f| f.value(x)).sum()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        self.0
            .iter()
            .fold(Vector::zeros(x.len()), |acc, f| acc.add(&f.gradient(x)))
    }

    fn lipschitz(&self) -> f64 {
        self.0.iter().map(|f| f.lipschitz()).sum()
    }
}

type ProxClosure = dyn Fn(&Vector, f64) -> Result<Vector> + Send + Sync;
type ValueClosure = dyn Fn(&Vector) -> f64 + Send + Sync;
type GradClosure = dyn Fn(&Vector) -> Vector + Send + Sync;

/// Prox map assembled from closures.
pub struct FnProx {
    prox: Box<ProxClosure>,
    value: Box<ValueClosure>,
}

impl FnProx {
    pub fn new(
        prox: impl Fn(&Vector, f64) -> Result<Vector> + Send + Sync + 'static,
        value: impl Fn(&Vector) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            prox: Box::new(prox),
            value: Box::new(value),
        }
    }
}

impl ProxMap for FnProx {
    fn prox(&self, x: &Vector, step: f64) -> Result<Vector> {
        (self.prox)(x, step)
    }

    fn value(&self, x: &Vector) -> f64 {
        (self.value)(x)
    }
}

/// Smooth function assembled from closures.
pub struct FnSmooth {
    value: Box<ValueClosure>,
    gradient: Box<GradClosure>,
    lipschitz: f64,
}

impl FnSmooth {
    pub fn new(
        value: impl Fn(&Vector) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
        lipschitz: f64,
    ) -> Self {
        Self {
            value: Box::new(value),
            gradient: Box::new(gradient),
            lipschitz,
        }
    }
}

impl SmoothFn for FnSmooth {
    fn value(&self, x: &Vector) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        (self.gradient)(x)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// Largest observed ratio `‖∇f(x) - ∇f(y)‖ / ‖x - y‖` over the given probe
/// pairs. Used to sanity-check declared Lipschitz constants.
pub fn observed_lipschitz(f: &dyn SmoothFn, probes: &[(Vector, Vector)]) -> f64 {
    probes
        .iter()
        .filter(|(x, y)| x.dist(y) > 0.0)
        .map(|(x, y)| f.gradient(x).dist(&f.gradient(y)) / x.dist(y))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::HaarTransform;
    use crate::rng::SeededRng;

    #[test]
    fn elastic_prox_matches_composition() {
        let w: Arc<dyn OrthogonalTransform> = Arc::new(HaarTransform::new(4, 4, 2).unwrap());
        let l1 = TransformedL1::new(w, 0.3).unwrap();
        let el = ElasticTransformedL1::new(l1.clone(), 0.5);
        let mut rng = SeededRng::new(5);
        let x = Vector::new(rng.uniform_vec(16, -1.0, 1.0)).unwrap();
        let p = el.prox(&x, 0.7).unwrap();
        // optimality: p minimizes value + ‖·-x‖²/(2·0.7) against perturbations
        let obj = |u: &Vector| el.value(u) + u.dist_sq(&x) / 1.4;
        for _ in 0..200 {
            let q = p.add(&Vector::new(rng.uniform_vec(16, -0.05, 0.05)).unwrap());
            assert!(obj(&p) <= obj(&q) + 1e-12);
        }
    }

    #[test]
    fn masked_least_squares_checks_observation() {
        let mask = DiagonalMask::new(vec![true, false]);
        assert!(MaskedLeastSquares::new(mask.clone(), Vector::from_slice(&[1.0, 2.0])).is_err());
        let g = MaskedLeastSquares::new(mask, Vector::from_slice(&[1.0, 0.0])).unwrap();
        assert_eq!(g.value(&Vector::from_slice(&[1.0, 9.0])), 0.0);
        assert!(MaskedLeastSquares::new(DiagonalMask::new(vec![false]), Vector::zeros(1)).is_err());
    }

    #[test]
    fn lipschitz_probe_respects_declared_constant() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0], &[3.0, -1.0]]);
        let l = crate::linalg::operator_norm(&a, 1e-12, 10_000).unwrap().powi(2);
        let ls = LeastSquares::new(a, Vector::from_slice(&[1.0, 0.0, 2.0]), l).unwrap();
        let mut rng = SeededRng::new(9);
        let probes: Vec<_> = (0..200)
            .map(|_| {
                (
                    Vector::new(rng.uniform_vec(2, -5.0, 5.0)).unwrap(),
                    Vector::new(rng.uniform_vec(2, -5.0, 5.0)).unwrap(),
                )
            })
            .collect();
        assert!(observed_lipschitz(&ls, &probes) <= l * (1.0 + 1e-8));
    }
}
