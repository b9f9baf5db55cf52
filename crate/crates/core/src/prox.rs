//! Closed-form proximal operators and projections.
//!
//! `prox_{r f}(x)` is the unique minimizer of `f(u) + ‖u - x‖² / (2r)`.

use crate::error::{check_dim, contract, Result};
use crate::linalg::Vector;

/// Distances below this are treated as zero in the distance-prox branch.
pub const DIST_GUARD: f64 = 1e-14;

/// A linear map `W` with `WᵀW = WWᵀ = I`.
pub trait OrthogonalTransform: Send + Sync {
    fn len(&self) -> usize;
    fn forward(&self, x: &Vector) -> Result<Vector>;
    /// Inverse, equal to the adjoint.
    fn inverse(&self, c: &Vector) -> Result<Vector>;
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityTransform(pub usize);

impl OrthogonalTransform for IdentityTransform {
    fn len(&self) -> usize {
        self.0
    }

    fn forward(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.0, x.len())?;
        Ok(x.clone())
    }

    fn inverse(&self, c: &Vector) -> Result<Vector> {
        check_dim(self.0, c.len())?;
        Ok(c.clone())
    }
}

fn check_step(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(contract(format!("prox step must be a finite nonnegative number, got {r}")))
    }
}

#[inline]
pub(crate) fn shrink(v: f64, r: f64) -> f64 {
    let m = v.abs() - r;
    if m > 0.0 {
        v.signum() * m
    } else {
        0.0
    }
}

/// Componentwise `sign(x_j) max(|x_j| - r, 0)`: the prox of `r‖·‖₁`.
pub fn soft_threshold(x: &Vector, r: f64) -> Result<Vector> {
    check_step(r)?;
    Ok(x.map(|v| shrink(v, r)))
}

/// Prox of `r‖W·‖₁` for orthogonal `W`: `Wᵀ soft_threshold(Wx, r)`.
pub fn prox_l1_orthogonal(x: &Vector, r: f64, w: &dyn OrthogonalTransform) -> Result<Vector> {
    check_step(r)?;
    let c = w.forward(x)?;
    w.inverse(&c.map(|v| shrink(v, r)))
}

/// Closed Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSet {
    center: Vector,
    radius: f64,
}

impl BallSet {
    pub fn new(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(contract(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn distance(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok((x.dist(&self.center) - self.radius).max(0.0))
    }
}

pub fn project_ball(x: &Vector, ball: &BallSet) -> Result<Vector> {
    check_dim(ball.dim(), x.len())?;
    let d = x.dist(&ball.center);
    if d <= ball.radius {
        Ok(x.clone())
    } else {
        let s = ball.radius / d;
        Ok(ball.center.zip_map(x, |c, v| c + s * (v - c)))
    }
}

/// Prox of `r dist(·, C)`. Moves `x` a distance `r` toward its projection,
/// or onto the projection when it is closer than `r`.
pub fn prox_dist_ball(x: &Vector, r: f64, ball: &BallSet) -> Result<Vector> {
    check_step(r)?;
    let p = project_ball(x, ball)?;
    let d = x.dist(&p);
    if d < DIST_GUARD || d <= r {
        Ok(p)
    } else {
        let t = r / d;
        Ok(x.zip_map(&p, |v, q| v + t * (q - v)))
    }
}

/// Prox of `r (λ/2)‖·‖²`: `x / (1 + rλ)`.
pub fn prox_scaled_sq_norm(x: &Vector, r: f64, lambda: f64) -> Result<Vector> {
    check_step(r)?;
    if !(lambda >= 0.0) {
        return Err(contract(format!("weight must be nonnegative, got {lambda}")));
    }
    Ok(x.scaled(1.0 / (1.0 + r * lambda)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x)
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft_threshold(&v(&[3.0]), 1.0).unwrap().as_slice(), &[2.0]);
        assert_eq!(
            soft_threshold(&v(&[0.5, -0.5]), 1.0).unwrap().as_slice(),
            &[0.0, 0.0]
        );
        assert!(soft_threshold(&v(&[1.0]), -0.1).is_err());
    }

    #[test]
    fn prox_l1_identity_reduces_to_threshold() {
        let p = prox_l1_orthogonal(&v(&[3.0]), 1.0, &IdentityTransform(1)).unwrap();
        assert_eq!(p.as_slice(), &[2.0]);
    }

    #[test]
    fn project_ball_examples() {
        let unit = BallSet::new(v(&[0.0, 0.0]), 1.0).unwrap();
        assert_eq!(project_ball(&v(&[0.3, 0.0]), &unit).unwrap().as_slice(), &[0.3, 0.0]);
        assert_eq!(project_ball(&v(&[3.0, 0.0]), &unit).unwrap().as_slice(), &[1.0, 0.0]);
        assert!(BallSet::new(v(&[0.0]), 0.0).is_err());
        assert!(project_ball(&v(&[1.0]), &unit).is_err());
    }

    #[test]
    fn prox_dist_inside_is_fixed() {
        let unit = BallSet::new(v(&[0.0, 0.0]), 1.0).unwrap();
        let x = v(&[0.2, -0.4]);
        assert_eq!(prox_dist_ball(&x, 5.0, &unit).unwrap(), x);
    }

    #[test]
    fn prox_scaled_sq_norm_examples() {
        assert_eq!(prox_scaled_sq_norm(&v(&[2.0]), 1.0, 0.0).unwrap().as_slice(), &[2.0]);
        assert_eq!(prox_scaled_sq_norm(&v(&[2.0]), 1.0, 1.0).unwrap().as_slice(), &[1.0]);
        let p = prox_scaled_sq_norm(&v(&[3.0, -3.0]), 2.0, 0.5).unwrap();
        assert_relative_eq!(p[0], 1.5);
        assert_relative_eq!(p[1], -1.5);
    }
}
