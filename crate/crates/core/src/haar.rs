//! Orthonormal multilevel 2-D Haar transform.
//!
//! Coefficient layout for `L` levels on an `h x w` image, with
//! `s_l = (h / 2^l) * (w / 2^l)`:
//!
//! ```text
//! [ LL_L | LH_L | HL_L | HH_L | LH_{L-1} | HL_{L-1} | HH_{L-1} | ... | LH_1 | HL_1 | HH_1 ]
//! ```
//!
//! Level `l` detail bands occupy `[s_l, 4 s_l)`. Each band is row-major.
//! For a 2x2 block `[[a, b], [c, d]]` the four outputs are
//! `LL = (a+b+c+d)/2`, `LH = (a+b-c-d)/2`, `HL = (a-b+c-d)/2`,
//! `HH = (a-b-c+d)/2`, which is separable filtering with the analysis pair
//! `(1, 1)/√2` and `(1, -1)/√2` along rows then columns.

use log::warn;

use crate::error::{check_dim, contract, Result};
use crate::linalg::Vector;
use crate::prox::OrthogonalTransform;

/// Grayscale image with pixel values nominally in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(contract("image dimensions must be positive"));
        }
        check_dim(height * width, pixels.len())?;
        Vector::new(pixels).map(|v| Self {
            height,
            width,
            pixels: v.into_vec(),
        })
    }

    pub fn from_vector(height: usize, width: usize, v: &Vector) -> Result<Self> {
        Self::new(height, width, v.to_vec())
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    pub fn vectorize(&self) -> Vector {
        Vector::from_vec_unchecked(self.pixels.clone())
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.height == other.height && self.width == other.width
    }
}

/// Largest `L` such that `2^L` divides both dimensions.
pub fn max_levels(height: usize, width: usize) -> usize {
    if height == 0 || width == 0 {
        return 0;
    }
    height.trailing_zeros().min(width.trailing_zeros()) as usize
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaarTransform {
    height: usize,
    width: usize,
    levels: usize,
}

impl HaarTransform {
    /// Fails unless `levels >= 1` and `2^levels` divides both dimensions.
    pub fn new(height: usize, width: usize, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(contract("Haar transform needs at least one level"));
        }
        if levels > max_levels(height, width) {
            return Err(contract(format!(
                "{height}x{width} image is not divisible by 2^{levels}"
            )));
        }
        let t = Self {
            height,
            width,
            levels,
        };
        t.verify_round_trip()?;
        Ok(t)
    }

    /// Uses `max_levels` when `requested` is `None`; reduces an infeasible
    /// request to the largest feasible depth with a warning.
    pub fn for_image(height: usize, width: usize, requested: Option<usize>) -> Result<Self> {
        let max = max_levels(height, width);
        if max == 0 {
            return Err(contract(format!(
                "{height}x{width} image admits no Haar level (odd dimension)"
            )));
        }
        let levels = match requested {
            None => max,
            Some(l) if l > max => {
                warn!("requested {l} Haar levels but {height}x{width} allows {max}; using {max}");
                max
            }
            Some(l) => l,
        };
        Self::new(height, width, levels)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    fn verify_round_trip(&self) -> Result<()> {
        let n = self.len();
        let probe: Vec<f64> = (0..n).map(|i| ((i * 7919) % 97) as f64 / 97.0 - 0.5).collect();
        let back = self.inverse_raw(&self.forward_raw(&probe));
        let err = probe
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if err > 1e-10 {
            return Err(contract(format!("Haar round trip error {err:e}")));
        }
        Ok(())
    }

    pub fn forward(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.len(), x.len())?;
        Ok(Vector::from_vec_unchecked(self.forward_raw(x)))
    }

    pub fn inverse(&self, c: &Vector) -> Result<Vector> {
        check_dim(self.len(), c.len())?;
        Ok(Vector::from_vec_unchecked(self.inverse_raw(c)))
    }

    fn forward_raw(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        let mut cur = x.to_vec();
        let (mut h, mut w) = (self.height, self.width);
        for _ in 0..self.levels {
            let (h2, w2) = (h / 2, w / 2);
            let s = h2 * w2;
            let mut ll = vec![0.0; s];
            for r in 0..h2 {
                for c in 0..w2 {
                    let a = cur[2 * r * w + 2 * c];
                    let b = cur[2 * r * w + 2 * c + 1];
                    let cc = cur[(2 * r + 1) * w + 2 * c];
                    let d = cur[(2 * r + 1) * w + 2 * c + 1];
                    let i = r * w2 + c;
                    ll[i] = 0.5 * (a + b + cc + d);
                    out[s + i] = 0.5 * (a + b - cc - d);
                    out[2 * s + i] = 0.5 * (a - b + cc - d);
                    out[3 * s + i] = 0.5 * (a - b - cc + d);
                }
            }
            cur = ll;
            h = h2;
            w = w2;
        }
        out[..cur.len()].copy_from_slice(&cur);
        out
    }

    fn inverse_raw(&self, coeffs: &[f64]) -> Vec<f64> {
        let (hl, wl) = (self.height >> self.levels, self.width >> self.levels);
        let mut cur = coeffs[..hl * wl].to_vec();
        for level in (1..=self.levels).rev() {
            let (h2, w2) = (self.height >> level, self.width >> level);
            let (h, w) = (2 * h2, 2 * w2);
            let s = h2 * w2;
            let mut next = vec![0.0; h * w];
            for r in 0..h2 {
                for c in 0..w2 {
                    let i = r * w2 + c;
                    let ll = cur[i];
                    let lh = coeffs[s + i];
                    let hl = coeffs[2 * s + i];
                    let hh = coeffs[3 * s + i];
                    next[2 * r * w + 2 * c] = 0.5 * (ll + lh + hl + hh);
                    next[2 * r * w + 2 * c + 1] = 0.5 * (ll + lh - hl - hh);
                    next[(2 * r + 1) * w + 2 * c] = 0.5 * (ll - lh + hl - hh);
                    next[(2 * r + 1) * w + 2 * c + 1] = 0.5 * (ll - lh - hl + hh);
                }
            }
            cur = next;
        }
        cur
    }
}

impl OrthogonalTransform for HaarTransform {
    fn len(&self) -> usize {
        self.height * self.width
    }

    fn forward(&self, x: &Vector) -> Result<Vector> {
        HaarTransform::forward(self, x)
    }

    fn inverse(&self, c: &Vector) -> Result<Vector> {
        HaarTransform::inverse(self, c)
    }
}
