use std::sync::Arc;

use crate::baselines::CompositeProblem;
use crate::error::{contract, Result};
use crate::functions::{ElasticTransformedL1, MaskedLeastSquares, ProxMap, ScaledSqNorm, SmoothFn, SmoothSum, TransformedL1};
use crate::haar::{HaarTransform, Image};
use crate::linalg::{DiagonalMask, Vector};
use crate::manifest::Manifest;
use crate::rng::SeededRng;
use crate::solver::{Metric, ObjectiveTerm, PenaltyFunction, ProblemInstance};

use super::isnr_raw;

/// Wavelet-regularized inpainting:
///
/// ```text
/// minimize   λ₁‖Wx‖₁ + (λ₂/2)‖x‖²
/// subject to x ∈ argmin ½‖Bx - b‖²
/// ```
#[derive(Clone)]
pub struct InpaintingInstance {
    pub clean: Image,
    pub mask: DiagonalMask,
    /// `b = B x_clean`, zero at masked pixels.
    pub observed: Vector,
    pub lambda1: f64,
    pub lambda2: f64,
    pub transform: Arc<HaarTransform>,
    pub missing_fraction: f64,
    pub seed: u64,
}

/// Masks exactly `⌊missing_fraction · n⌋` pixels chosen by a seeded shuffle.
/// `levels = None` uses the deepest Haar decomposition the image allows.
pub fn build_inpainting(
    clean: &Image,
    missing_fraction: f64,
    lambda1: f64,
    lambda2: f64,
    seed: u64,
    levels: Option<usize>,
) -> Result<InpaintingInstance> {
    if !(missing_fraction > 0.0 && missing_fraction < 1.0) {
        return Err(contract(format!("missing fraction must lie in (0, 1), got {missing_fraction}")));
    }
    if !(lambda1 > 0.0 && lambda2 > 0.0) {
        return Err(contract("lambda1 and lambda2 must be positive"));
    }
    let n = clean.len();
    let missing = (missing_fraction * n as f64).floor() as usize;
    if missing == 0 || missing == n {
        return Err(contract(format!("masking {missing} of {n} pixels is degenerate")));
    }
    let transform = Arc::new(HaarTransform::for_image(clean.height(), clean.width(), levels)?);

    let mut rng = SeededRng::new(seed);
    let mut keep = vec![true; n];
    for i in rng.sample_indices(n, missing) {
        keep[i] = false;
    }
    let mask = DiagonalMask::new(keep);
    let observed = mask.apply(&clean.vectorize())?;

    Ok(InpaintingInstance {
        clean: clean.clone(),
        mask,
        observed,
        lambda1,
        lambda2,
        transform,
        missing_fraction,
        seed,
    })
}

impl InpaintingInstance {
    pub fn dim(&self) -> usize {
        self.observed.len()
    }

    pub fn noisy_image(&self) -> Image {
        Image::from_vector(self.clean.height(), self.clean.width(), &self.observed)
            .expect("observation has image shape")
    }

    pub fn to_image(&self, x: &Vector) -> Result<Image> {
        Image::from_vector(self.clean.height(), self.clean.width(), x)
    }

    fn data_fit(&self) -> Arc<MaskedLeastSquares> {
        Arc::new(MaskedLeastSquares::new(self.mask.clone(), self.observed.clone()).expect("valid by construction"))
    }

    fn wavelet_l1(&self) -> TransformedL1 {
        TransformedL1::new(self.transform.clone(), self.lambda1).expect("positive weight")
    }

    /// One term (`f₁ = λ₁‖W·‖₁`, `h₁ = (λ₂/2)‖·‖²`), penalty
    /// `g = ½‖B· - b‖²` with `L_g = 1` and growth constant 1, started at
    /// the observation.
    pub fn problem(&self) -> Result<ProblemInstance> {
        let term = ObjectiveTerm::new(
            Arc::new(self.wavelet_l1()),
            Arc::new(ScaledSqNorm { weight: self.lambda2 }),
        )?;
        let penalty = PenaltyFunction::new(self.data_fit(), 0.0)?.with_growth_constant(1.0)?;
        ProblemInstance::new(vec![term], penalty, self.observed.clone())
    }

    /// Unconstrained baseline formulation: `f = λ₁‖W·‖₁`,
    /// `h = (λ₂/2)‖·‖² + ½‖B· - b‖²` with `L_h = λ₂ + 1`.
    pub fn composite(&self) -> Result<CompositeProblem> {
        let data_fit = self.data_fit();
        let smooth = SmoothSum(vec![Arc::new(ScaledSqNorm { weight: self.lambda2 }), data_fit.clone()]);
        Ok(CompositeProblem::new(Arc::new(self.wavelet_l1()), Arc::new(smooth))?.with_reported_penalty(data_fit))
    }

    /// ISNR of an iterate against the clean image and the observation.
    pub fn isnr(&self, x: &Vector) -> f64 {
        isnr_raw(self.clean.pixels(), &self.observed, x)
    }

    pub fn isnr_metric(&self) -> Metric {
        let clean = self.clean.pixels().to_vec();
        let observed = self.observed.clone();
        Arc::new(move |x: &Vector| isnr_raw(&clean, &observed, x))
    }

    /// `λ₁‖Wx‖₁ + (λ₂/2)‖x‖²`
    pub fn regularizer(&self, x: &Vector) -> f64 {
        self.wavelet_l1().value(x) + 0.5 * self.lambda2 * x.norm_sq()
    }

    pub fn data_fit_value(&self, x: &Vector) -> f64 {
        self.data_fit().value(x)
    }

    pub fn manifest(&self) -> Manifest {
        let mut m = Manifest::new();
        m.set("experiment", "inpaint")
            .set("height", self.clean.height())
            .set("width", self.clean.width())
            .set("missing_fraction", self.missing_fraction)
            .set("lambda1", self.lambda1)
            .set("lambda2", self.lambda2)
            .set("levels", self.transform.levels())
            .set("seed", self.seed);
        m
    }
}

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub x: Vector,
    pub iterations: usize,
    /// Douglas–Rachford fixed-point residual per iteration; non-increasing.
    pub residuals: Vec<f64>,
}

pub const ORACLE_TOL: f64 = 1e-12;

/// Reference solution of the constrained inpainting problem by
/// Douglas–Rachford splitting between the exact prox of
/// `λ₁‖W·‖₁ + (λ₂/2)‖·‖²` and the exact projection onto `{x : Bx = b}`
/// (observed pixels pinned to `b`, masked pixels free).
///
/// Runs until the fixed-point residual drops below `1e-12` or `iters`
/// iterations; intended for small images. The returned point is exactly
/// feasible.
pub fn inpainting_oracle(inst: &InpaintingInstance, iters: usize) -> Result<OracleSolution> {
    let f = ElasticTransformedL1::new(inst.wavelet_l1(), inst.lambda2);
    let project = |v: &Vector| -> Vector {
        Vector::from_vec_unchecked(
            v.iter()
                .zip(inst.observed.iter())
                .enumerate()
                .map(|(i, (&x, &b))| if inst.mask.is_kept(i) { b } else { x })
                .collect(),
        )
    };
    let step = 1.0;
    let mut z = inst.observed.clone();
    let mut residuals = Vec::new();
    let mut iterations = 0;
    for _ in 0..iters {
        let x = f.prox(&z, step)?;
        let y = project(&x.scaled(2.0).sub(&z));
        let delta = y.sub(&x);
        let res = delta.norm();
        z = z.add(&delta);
        residuals.push(res);
        iterations += 1;
        if res <= ORACLE_TOL {
            break;
        }
    }
    let x = project(&f.prox(&z, step)?);
    Ok(OracleSolution {
        x,
        iterations,
        residuals,
    })
}
