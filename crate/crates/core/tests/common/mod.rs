//! Independent reference implementations used by the integration tests.
//! Everything here works on plain `Vec<f64>` and avoids the library's
//! vector and prox code.

#![allow(dead_code)]

use std::io::Write;
use std::sync::Arc;

use penalty_ipg::functions::{
    DistanceToBall, L1Norm, LeastSquares, ProxMap, ScaledSqNorm, SmoothFn, SquaredDistance, Zero,
};
use penalty_ipg::prox::BallSet;
use penalty_ipg::rng::SeededRng;
use penalty_ipg::solver::{ObjectiveTerm, PenaltyFunction, ProblemInstance};
use penalty_ipg::{DenseMatrix, Vector};

/// Writes straight to the process stderr so the line shows up even when
/// the test harness captures output.
pub fn verdict(criterion: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[acceptance] {tag} {criterion}: {detail}");
}

#[derive(Debug, Clone)]
pub enum NonSmooth {
    Zero,
    L1(f64),
    Ball(Vec<f64>, f64),
    SqNorm(f64),
}

#[derive(Debug, Clone)]
pub enum Smooth {
    Zero,
    SqNorm(f64),
    SqDist(Vec<f64>),
}

/// Plain description of a small random instance.
#[derive(Debug, Clone)]
pub struct RawInstance {
    pub n: usize,
    pub terms: Vec<(NonSmooth, Smooth)>,
    /// Row-major `r × n`.
    pub a: Vec<f64>,
    pub rows: usize,
    pub rhs: Vec<f64>,
    pub start: Vec<f64>,
}

pub fn random_instance(rng: &mut SeededRng) -> RawInstance {
    let n = 1 + (rng.next_unit() * 5.0) as usize;
    let m = 1 + (rng.next_unit() * 4.0) as usize;
    let rows = 1 + (rng.next_unit() * 6.0) as usize;
    let mut terms = Vec::new();
    for _ in 0..m {
        let f = match (rng.next_unit() * 4.0) as usize {
            0 => NonSmooth::Zero,
            1 => NonSmooth::L1(rng.uniform_open(0.05, 2.0)),
            2 => NonSmooth::Ball(rng.uniform_vec(n, -3.0, 3.0), rng.uniform_open(0.1, 1.5)),
            _ => NonSmooth::SqNorm(rng.uniform_open(0.05, 2.0)),
        };
        let h = match (rng.next_unit() * 3.0) as usize {
            0 => Smooth::Zero,
            1 => Smooth::SqNorm(rng.uniform_open(0.05, 1.0)),
            _ => Smooth::SqDist(rng.uniform_vec(n, -3.0, 3.0)),
        };
        terms.push((f, h));
    }
    RawInstance {
        n,
        terms,
        a: rng.uniform_vec(rows * n, -2.0, 2.0),
        rows,
        rhs: rng.uniform_vec(rows, -1.0, 1.0),
        start: rng.uniform_vec(n, -4.0, 4.0),
    }
}

impl RawInstance {
    pub fn frobenius_sq(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum()
    }

    pub fn to_problem(&self) -> ProblemInstance {
        let terms = self
            .terms
            .iter()
            .map(|(f, h)| {
                let f: Arc<dyn ProxMap> = match f {
                    NonSmooth::Zero => Arc::new(Zero),
                    NonSmooth::L1(w) => Arc::new(L1Norm { weight: *w }),
                    NonSmooth::Ball(c, r) => Arc::new(DistanceToBall {
                        ball: BallSet::new(Vector::from_slice(c), *r).unwrap(),
                    }),
                    NonSmooth::SqNorm(w) => Arc::new(ScaledSqNorm { weight: *w }),
                };
                let h: Arc<dyn SmoothFn> = match h {
                    Smooth::Zero => Arc::new(Zero),
                    Smooth::SqNorm(w) => Arc::new(ScaledSqNorm { weight: *w }),
                    Smooth::SqDist(c) => Arc::new(SquaredDistance {
                        center: Vector::from_slice(c),
                    }),
                };
                ObjectiveTerm::new(f, h).unwrap()
            })
            .collect();
        let ls = LeastSquares::new(
            DenseMatrix::new(self.rows, self.n, self.a.clone()).unwrap(),
            Vector::from_slice(&self.rhs),
            self.frobenius_sq(),
        )
        .unwrap();
        let penalty = PenaltyFunction::new(Arc::new(ls), 0.0).unwrap();
        ProblemInstance::new(terms, penalty, Vector::from_slice(&self.start)).unwrap()
    }

    /// `Aᵀ(Ax - b)` written out with index loops.
    pub fn grad_g(&self, x: &[f64]) -> Vec<f64> {
        let mut res = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut s = -self.rhs[i];
            for j in 0..self.n {
                s += self.a[i * self.n + j] * x[j];
            }
            res[i] = s;
        }
        let mut g = vec![0.0; self.n];
        for j in 0..self.n {
            for i in 0..self.rows {
                g[j] += self.a[i * self.n + j] * res[i];
            }
        }
        g
    }

    /// One outer iteration written directly from the three update formulas.
    pub fn reference_step(&self, x: &[f64], alpha: f64, beta: f64) -> Vec<f64> {
        let gg = self.grad_g(x);
        let mut phi: Vec<f64> = (0..self.n).map(|j| x[j] - alpha * beta * gg[j]).collect();
        for (f, h) in &self.terms {
            let grad: Vec<f64> = match h {
                Smooth::Zero => vec![0.0; self.n],
                Smooth::SqNorm(w) => phi.iter().map(|v| w * v).collect(),
                Smooth::SqDist(c) => phi.iter().zip(c).map(|(v, c)| v - c).collect(),
            };
            let y: Vec<f64> = phi.iter().zip(&grad).map(|(p, g)| p - alpha * g).collect();
            phi = reference_prox(f, &y, alpha);
        }
        phi
    }
}

pub fn reference_prox(f: &NonSmooth, y: &[f64], t: f64) -> Vec<f64> {
    match f {
        NonSmooth::Zero => y.to_vec(),
        NonSmooth::L1(w) => y
            .iter()
            .map(|&v| {
                let s = t * w;
                if v > s {
                    v - s
                } else if v < -s {
                    v + s
                } else {
                    0.0
                }
            })
            .collect(),
        NonSmooth::SqNorm(w) => y.iter().map(|v| v / (1.0 + t * w)).collect(),
        NonSmooth::Ball(c, r) => {
            let d: f64 = y.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if d <= *r {
                return y.to_vec();
            }
            // projection onto the ball, then move toward it by at most t
            let proj: Vec<f64> = y.iter().zip(c).map(|(a, b)| b + r * (a - b) / d).collect();
            let gap = d - r;
            if gap <= t {
                proj
            } else {
                y.iter().zip(&proj).map(|(a, p)| a - t * (a - p) / gap).collect()
            }
        }
    }
}

/// Dense `n × n` matrix of a one-dimensional orthonormal Haar analysis step
/// (averages first, then details).
fn haar_1d_step(n: usize) -> Vec<Vec<f64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n / 2 {
        m[i][2 * i] = s;
        m[i][2 * i + 1] = s;
        m[n / 2 + i][2 * i] = s;
        m[n / 2 + i][2 * i + 1] = -s;
    }
    m
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let k = b.len();
    let p = b[0].len();
    let mut out = vec![vec![0.0; p]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l] != 0.0 {
                for j in 0..p {
                    out[i][j] += a[i][l] * b[l][j];
                }
            }
        }
    }
    out
}

fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Multilevel 2-D Haar analysis built from dense 1-D matrices:
/// `C ← H_r C H_cᵀ` applied to the shrinking low-pass block only, then the coefficient
/// grid is read out in the library's layout
/// `[LL_L | LH_L | HL_L | HH_L | … | LH_1 | HL_1 | HH_1]`, each block row-major.
pub fn dense_haar_forward(h: usize, w: usize, levels: usize, x: &[f64]) -> Vec<f64> {
    let mut c: Vec<Vec<f64>> = (0..h).map(|r| x[r * w..(r + 1) * w].to_vec()).collect();
    for l in 0..levels {
        let (hh, ww) = (h >> l, w >> l);
        let ll: Vec<Vec<f64>> = c[..hh].iter().map(|r| r[..ww].to_vec()).collect();
        let out = matmul(&matmul(&haar_1d_step(hh), &ll), &transpose(&haar_1d_step(ww)));
        for (r, row) in out.into_iter().enumerate() {
            c[r][..ww].copy_from_slice(&row);
        }
    }
    let block = |r0: usize, c0: usize, bh: usize, bw: usize, out: &mut Vec<f64>| {
        for r in r0..r0 + bh {
            for cc in c0..c0 + bw {
                out.push(c[r][cc]);
            }
        }
    };
    let mut out = Vec::with_capacity(h * w);
    let (lh, lw) = (h >> levels, w >> levels);
    block(0, 0, lh, lw, &mut out);
    for l in (1..=levels).rev() {
        let (bh, bw) = (h >> l, w >> l);
        // row-detail (vertical high-pass), column-detail, diagonal
        block(bh, 0, bh, bw, &mut out);
        block(0, bw, bh, bw, &mut out);
        block(bh, bw, bh, bw, &mut out);
    }
    out
}
